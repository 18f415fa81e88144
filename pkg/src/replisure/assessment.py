"""Replication success: two-trials rule and the sceptical p-value.

All functions work on direction-normalised z-statistics (positive means
the estimate lies on the beneficial side of the margin) and the variance
ratio ``c = se_o**2 / se_r**2``.

The sceptical z-value ``zeta`` is the largest ``z`` with
``(z_o**2/z**2 - 1) * (z_r**2/z**2 - 1) = c``.  The controlled sceptical
p-value recalibrates it so that, with both true effects at the margin,
``P(p_controlled <= alpha) = alpha**2`` for every ``c``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError
from .numerics import Bracket, find_root, integrate, norm_cdf, norm_pdf, norm_quantile, norm_sf
from .studies import StudyPair, normalize_pair

# the T1E integrand is negligible beyond this distance above the threshold
_TAIL_WIDTH = 40.0
T1E_ABS_TOL = 1e-11


@dataclass(frozen=True)
class ScepticalZ:
    zeta: float
    defined: bool


@dataclass(frozen=True)
class AssessmentResult:
    label: str
    p_o: float
    p_r: float
    c: float
    p_ttr: float
    p_s_nominal: float | None
    p_s_controlled: float | None
    success_ttr: bool
    success_sceptical: bool
    alpha: float

    @property
    def success_nominal(self) -> bool:
        return self.p_s_nominal is not None and self.p_s_nominal <= self.alpha


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"alpha must lie in (0, 1), got {alpha!r}")
    return alpha


def sceptical_prior_variance(se_o: float, z_o: float, alpha: float) -> float:
    """Variance of the sceptical prior that makes the original just unconvincing.

    Defined only when the original is significant at ``alpha``.
    """
    z_a = norm_quantile(1.0 - _check_alpha(alpha))
    if not z_o > z_a:
        raise DomainError(
            f"no sceptical prior exists: z_o={z_o:.6g} does not exceed z_(1-alpha)={z_a:.6g}"
        )
    return se_o**2 / (z_o**2 / z_a**2 - 1.0)


def box_tail_probability(theta_r: float, se_r: float, tau2: float, delta: float = 0.0) -> float:
    """Prior-predictive tail probability of the replication under the sceptical prior.

    Small values mean strong conflict with the prior, i.e. support for
    replication success.  Oriented for effects below the margin ``delta``.
    """
    if tau2 < 0:
        raise DomainError(f"tau2 must be non-negative, got {tau2!r}")
    if not se_r > 0:
        raise DomainError(f"se_r must be positive, got {se_r!r}")
    return norm_cdf((theta_r - delta) / math.sqrt(tau2 + se_r**2))


def sceptical_z(z_o: float, z_r: float, c: float) -> ScepticalZ:
    if not c > 0:
        raise DomainError(f"variance ratio must be positive, got {c!r}")
    if not z_o > 0:
        return ScepticalZ(math.nan, False)
    if z_r == 0:
        return ScepticalZ(0.0, True)
    a = z_o * z_o
    b = z_r * z_r
    # zeta^2 = 2ab / (a + b + sqrt((a - b)^2 + 4cab)), the larger root of the
    # quadratic in 1/zeta^2, written so tiny z's cannot divide by zero
    zeta2 = 2.0 * a * b / ((a + b) + math.sqrt((a - b) ** 2 + 4.0 * c * a * b))
    return ScepticalZ(math.copysign(math.sqrt(zeta2), z_r), True)


def sceptical_z_array(z_o, z_r, c) -> np.ndarray:
    """Vectorised :func:`sceptical_z`; ``nan`` where ``z_o <= 0``."""
    z_o, z_r, c = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (z_o, z_r, c)))
    a = z_o * z_o
    b = z_r * z_r
    with np.errstate(divide="ignore", invalid="ignore"):
        zeta2 = 2.0 * a * b / ((a + b) + np.sqrt((a - b) ** 2 + 4.0 * c * a * b))
    zeta = np.copysign(np.sqrt(np.nan_to_num(zeta2)), z_r)
    return np.where(z_o > 0, zeta, np.nan)


def _required_z_r(x: float, c: float, t: float) -> float:
    # replication z that puts the sceptical z exactly at t, given z_o = x > t
    return t * math.sqrt(1.0 + c / ((x / t) ** 2 - 1.0))


def t1e_sceptical(t: float, c: float) -> float:
    """P(Z_o > 0, Z_r > 0, zeta >= t) for independent standard normal z's.

    Integrates the conditional success probability over ``z_o in (t, inf)``;
    the stretch beyond ``t + 40`` is replaced by its upper bound
    ``(1 - Phi(t)) * (1 - Phi(t + 40))``, which underflows to zero.
    """
    t = float(t)
    if not (math.isfinite(t) and t > 0):
        raise DomainError(f"threshold must be positive, got {t!r}")
    if not c > 0:
        raise DomainError(f"variance ratio must be positive, got {c!r}")

    def integrand(x: float) -> float:
        if x <= t:
            return 0.0
        return norm_sf(_required_z_r(x, c, t)) * norm_pdf(x)

    upper = t + _TAIL_WIDTH
    # the integrand rises from 0 at x = t over a scale of order t;
    # split there so small thresholds are resolved
    knot = min(t + max(4.0 * t, 1e-3), upper)
    head = integrate(integrand, t, knot, abs_tol=T1E_ABS_TOL)
    body = integrate(integrand, knot, upper, abs_tol=T1E_ABS_TOL)
    tail = norm_sf(t) * norm_sf(upper)
    return head.value + body.value + tail


def sceptical_p_nominal(z_o: float, z_r: float, c: float) -> float | None:
    s = sceptical_z(z_o, z_r, c)
    if not s.defined:
        return None
    return norm_sf(s.zeta)


def _controlled_from_zeta(zeta: float, c: float) -> float:
    if zeta > 0:
        return math.sqrt(t1e_sceptical(zeta, c))
    if zeta < 0:
        return 1.0 - math.sqrt(t1e_sceptical(-zeta, c))
    return 0.5


def sceptical_p_controlled(z_o: float, z_r: float, c: float) -> float | None:
    """Type-I-error controlled sceptical p-value, ``None`` if ``z_o <= 0``.

    For ``zeta > 0`` this is ``sqrt(T1E(zeta, c))``; negative ``zeta`` is
    mirrored to ``1 - sqrt(T1E(-zeta, c))`` so the value joins at 0.5.
    """
    s = sceptical_z(z_o, z_r, c)
    if not s.defined:
        return None
    return _controlled_from_zeta(s.zeta, c)


@lru_cache(maxsize=4096)
def _threshold(alpha: float, c: float) -> float:
    target = alpha * alpha
    return find_root(lambda t: t1e_sceptical(t, c) - target, Bracket(1e-8, 10.0), tol=1e-12)


def controlled_threshold(alpha: float, c: float) -> float:
    """Sceptical z-threshold ``t`` with ``T1E(t, c) = alpha**2``.

    Success at level ``alpha`` is ``zeta >= t``.  Returns 0 when
    ``alpha**2 >= 1/4`` (every pair with positive estimates succeeds).
    """
    alpha = _check_alpha(alpha)
    if not c > 0:
        raise DomainError(f"variance ratio must be positive, got {c!r}")
    if alpha * alpha >= 0.25:
        return 0.0
    return _threshold(alpha, float(c))


def controlled_level(alpha: float, c: float) -> float:
    """Nominal one-sided level ``1 - Phi(t)`` matching :func:`controlled_threshold`."""
    return norm_sf(controlled_threshold(alpha, c))


def two_trials_p(p_o: float, p_r: float) -> float:
    return max(p_o, p_r)


def assess_normalized(z_o: float, z_r: float, c: float, alpha: float = 0.025, label: str = "") -> AssessmentResult:
    alpha = _check_alpha(alpha)
    p_o = norm_sf(z_o)
    p_r = norm_sf(z_r)
    p_ttr = two_trials_p(p_o, p_r)
    s = sceptical_z(z_o, z_r, c)
    nominal = norm_sf(s.zeta) if s.defined else None
    controlled = _controlled_from_zeta(s.zeta, c) if s.defined else None
    return AssessmentResult(
        label=label,
        p_o=p_o,
        p_r=p_r,
        c=c,
        p_ttr=p_ttr,
        p_s_nominal=nominal,
        p_s_controlled=controlled,
        success_ttr=p_ttr <= alpha,
        success_sceptical=controlled is not None and controlled <= alpha,
        alpha=alpha,
    )


def assess_pair(pair: StudyPair, alpha: float = 0.025) -> AssessmentResult:
    n = normalize_pair(pair)
    return assess_normalized(n.z_o, n.z_r, n.c, alpha, label=pair.label)
