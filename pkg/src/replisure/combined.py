"""Combined-effect confidence intervals and heterogeneity testing.

The sceptical interval inverts the controlled sceptical p-value over the
margin: the upper limit is the margin at which the squared p-value equals
the overall one-sided level.  The fixed-effect meta-analysis is the usual
inverse-variance pooling, reported for comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .assessment import sceptical_p_controlled
from .errors import DomainError, InversionError
from .numerics import Bracket, find_root, norm_pdf, norm_quantile, norm_sf
from .studies import StudyPair, normalize_pair

MAX_CHI2_DF = 5


@dataclass(frozen=True)
class MetaResult:
    estimate: float
    se: float
    lo: float
    hi: float

    @property
    def hr(self) -> tuple[float, float, float]:
        return math.exp(self.estimate), math.exp(self.lo), math.exp(self.hi)


@dataclass(frozen=True)
class QTest:
    q: float
    df: int
    p: float


@dataclass(frozen=True)
class CombinedCI:
    meta_hr: float
    meta_lo: float
    meta_hi: float
    sceptical_upper_hr: float
    overall_level: float


def _validate(estimates: Sequence[tuple[float, float]]) -> list[tuple[float, float]]:
    out = [(float(t), float(s)) for t, s in estimates]
    if len(out) < 2:
        raise DomainError(f"need at least two estimates, got {len(out)}")
    for t, s in out:
        if not (math.isfinite(t) and s > 0 and math.isfinite(s)):
            raise DomainError(f"invalid estimate ({t}, {s})")
    return out


def fixed_effect_meta(estimates: Iterable[tuple[float, float]], level: float = 0.95) -> MetaResult:
    """Inverse-variance pooled estimate with a two-sided ``level`` CI."""
    est = _validate(list(estimates))
    w = [1.0 / s**2 for _, s in est]
    total = sum(w)
    pooled = sum(wi * t for wi, (t, _) in zip(w, est)) / total
    se = 1.0 / math.sqrt(total)
    half = norm_quantile((1.0 + level) / 2.0) * se
    return MetaResult(pooled, se, pooled - half, pooled + half)


def chi2_sf(x: float, df: int) -> float:
    """Chi-squared survival function for integer ``1 <= df <= 5``.

    Even ``df`` use the Poisson series ``exp(-x/2) * sum (x/2)^k / k!``;
    odd ``df`` start from ``2 * (1 - Phi(sqrt(x)))`` and add the
    half-integer terms.
    """
    if int(df) != df or not 1 <= df <= MAX_CHI2_DF:
        raise DomainError(f"df must be an integer in [1, {MAX_CHI2_DF}], got {df!r}")
    if x < 0 or math.isnan(x):
        raise DomainError(f"chi-squared statistic must be non-negative, got {x!r}")
    if x == 0:
        return 1.0
    df = int(df)
    half = x / 2.0
    if df % 2 == 0:
        term = 1.0
        total = 1.0
        for k in range(1, df // 2):
            term *= half / k
            total += term
        return math.exp(-half) * total
    root = math.sqrt(x)
    total = 2.0 * norm_sf(root)
    # d.o.f. 3, 5: add 2*phi(sqrt x) * sum_{k} x^(k-1/2) / (1*3*...*(2k-1))
    term = root
    acc = 0.0
    for k in range(1, (df - 1) // 2 + 1):
        if k > 1:
            term *= x / (2 * k - 1)
        acc += term
    return total + 2.0 * norm_pdf(root) * acc


def cochran_q(estimates: Iterable[tuple[float, float]]) -> QTest:
    est = _validate(list(estimates))
    pooled = fixed_effect_meta(est).estimate
    q = sum((t - pooled) ** 2 / s**2 for t, s in est)
    df = len(est) - 1
    return QTest(q, df, chi2_sf(q, df))


def _controlled_at(pair: StudyPair, log_margin: float) -> float:
    n = normalize_pair(pair, log_margin)
    p = sceptical_p_controlled(n.z_o, n.z_r, n.c)
    return 1.0 if p is None else p


def sceptical_ci_upper(pair: StudyPair, overall_alpha: float = 0.025) -> float:
    """Upper limit (HR scale) of the one-sided sceptical confidence interval.

    The interval is ``(0, upper]`` with coverage ``1 - overall_alpha``.
    """
    if not 0.0 < overall_alpha < 0.25:
        raise DomainError(f"overall_alpha must lie in (0, 0.25), got {overall_alpha!r}")
    target = math.sqrt(overall_alpha)
    n = normalize_pair(pair)
    start = max(n.theta_o, n.theta_r)
    step = max(n.se_o, n.se_r)
    limit = start + 20.0 * step

    def gap(log_margin: float) -> float:
        return _controlled_at(pair, log_margin) - target

    upper = start + step
    while gap(upper) > 0:
        if upper >= limit:
            raise InversionError(
                f"{pair.label}: controlled sceptical p-value stays above {target:.4g} "
                f"for margins up to HR {math.exp(limit):.4g}"
            )
        upper = min(start + 2.0 * (upper - start), limit)
    return math.exp(find_root(gap, Bracket(start, upper), tol=1e-12))


def combined_ci(pair: StudyPair, overall_alpha: float = 0.025) -> CombinedCI:
    meta = fixed_effect_meta(
        [(pair.original.log_hr, pair.original.se), (pair.replication.log_hr, pair.replication.se)]
    )
    hr, lo, hi = meta.hr
    return CombinedCI(hr, lo, hi, sceptical_ci_upper(pair, overall_alpha), 1.0 - overall_alpha)
