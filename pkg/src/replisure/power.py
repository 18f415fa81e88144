"""Power of the replication study and replication sample-size planning.

Under the normal model the replication z-statistic given the true effect
at the original estimate is ``N(sqrt(c) * z_o, 1)``; averaging over the
uncertainty of the original estimate gives ``N(sqrt(c) * z_o, 1 + c)``.
Conditional power uses the first, predictive power the second.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .assessment import _check_alpha, _required_z_r, controlled_threshold
from .errors import DomainError, PlanningError
from .numerics import Bracket, find_root, norm_cdf, norm_quantile, norm_sf
from .studies import NormalizedPair, StudyPair, normalize_pair

C_SEARCH = (1e-3, 1e3)


class Method(str, enum.Enum):
    TTR = "ttr"
    SCEPTICAL = "sceptical"


class PowerKind(str, enum.Enum):
    CONDITIONAL = "conditional"
    PREDICTIVE = "predictive"


@dataclass(frozen=True)
class PowerResult:
    cp_ttr: float
    pp_ttr: float
    cp_sceptical: float
    pp_sceptical: float
    alpha: float


def required_z_r(z_o: float, c: float, t: float) -> float:
    """Smallest replication z whose sceptical z reaches ``t``.

    Returns ``inf`` when ``z_o <= t``: no replication result can succeed.
    """
    if not c > 0:
        raise DomainError(f"variance ratio must be positive, got {c!r}")
    if not t > 0:
        raise DomainError(f"threshold must be positive, got {t!r}")
    if not z_o > t:
        return math.inf
    return _required_z_r(z_o, c, t)


def _significant(z_o: float, alpha: float) -> bool:
    return norm_sf(z_o) <= alpha


def ttr_conditional_power(z_o: float, c: float, alpha: float = 0.025) -> float:
    alpha = _check_alpha(alpha)
    if not _significant(z_o, alpha):
        return 0.0
    return norm_cdf(math.sqrt(c) * z_o - norm_quantile(1.0 - alpha))


def ttr_predictive_power(z_o: float, c: float, alpha: float = 0.025) -> float:
    alpha = _check_alpha(alpha)
    if not _significant(z_o, alpha):
        return 0.0
    return norm_cdf((math.sqrt(c) * z_o - norm_quantile(1.0 - alpha)) / math.sqrt(1.0 + c))


def _sceptical_shift(z_o: float, c: float, alpha: float) -> float | None:
    # sqrt(c)*z_o - required z_r, or None if the original rules out success
    t = controlled_threshold(_check_alpha(alpha), c)
    if t == 0.0:
        return math.inf if z_o > 0 else None
    if not z_o > t:
        return None
    return math.sqrt(c) * z_o - _required_z_r(z_o, c, t)


def sceptical_conditional_power(z_o: float, c: float, alpha: float = 0.025) -> float:
    shift = _sceptical_shift(z_o, c, alpha)
    return 0.0 if shift is None else norm_cdf(shift)


def sceptical_predictive_power(z_o: float, c: float, alpha: float = 0.025) -> float:
    shift = _sceptical_shift(z_o, c, alpha)
    return 0.0 if shift is None else norm_cdf(shift / math.sqrt(1.0 + c))


def power(z_o: float, c: float, alpha: float, method: Method | str, kind: PowerKind | str) -> float:
    method, kind = Method(method), PowerKind(kind)
    fn = {
        (Method.TTR, PowerKind.CONDITIONAL): ttr_conditional_power,
        (Method.TTR, PowerKind.PREDICTIVE): ttr_predictive_power,
        (Method.SCEPTICAL, PowerKind.CONDITIONAL): sceptical_conditional_power,
        (Method.SCEPTICAL, PowerKind.PREDICTIVE): sceptical_predictive_power,
    }[method, kind]
    return fn(z_o, c, alpha)


def conditional_type1(z_o: float, c: float, alpha: float = 0.025, method: Method | str = Method.SCEPTICAL) -> float:
    """Probability of success when the true replication effect sits at the margin."""
    alpha = _check_alpha(alpha)
    if Method(method) is Method.TTR:
        return alpha if _significant(z_o, alpha) else 0.0
    t = controlled_threshold(alpha, c)
    if t == 0.0:
        return 0.5 if z_o > 0 else 0.0
    if not z_o > t:
        return 0.0
    return norm_sf(_required_z_r(z_o, c, t))


def replication_power(pair: StudyPair | NormalizedPair, alpha: float = 0.025) -> PowerResult:
    n = normalize_pair(pair) if isinstance(pair, StudyPair) else pair
    return PowerResult(
        cp_ttr=ttr_conditional_power(n.z_o, n.c, alpha),
        pp_ttr=ttr_predictive_power(n.z_o, n.c, alpha),
        cp_sceptical=sceptical_conditional_power(n.z_o, n.c, alpha),
        pp_sceptical=sceptical_predictive_power(n.z_o, n.c, alpha),
        alpha=alpha,
    )


def required_relative_sample_size(
    z_o: float,
    alpha: float = 0.025,
    target_power: float = 0.8,
    method: Method | str = Method.TTR,
    power_kind: PowerKind | str = PowerKind.CONDITIONAL,
) -> float:
    """Variance ratio ``c`` at which the replication reaches ``target_power``.

    The TTR conditional case is closed form; the others are solved on
    ``c`` in ``[1e-3, 1e3]``.
    """
    alpha = _check_alpha(alpha)
    method, power_kind = Method(method), PowerKind(power_kind)
    if not 0.0 < target_power < 1.0:
        raise DomainError(f"target power must lie in (0, 1), got {target_power!r}")
    if method is Method.TTR and not _significant(z_o, alpha):
        raise PlanningError(f"original result (z={z_o:.4g}) is not significant at {alpha}")
    if method is Method.TTR and power_kind is PowerKind.CONDITIONAL:
        return ((norm_quantile(1.0 - alpha) + norm_quantile(target_power)) / z_o) ** 2

    def gap(log_c: float) -> float:
        return power(z_o, math.exp(log_c), alpha, method, power_kind) - target_power

    lo, hi = (math.log(v) for v in C_SEARCH)
    if gap(lo) >= 0:
        return C_SEARCH[0]
    if gap(hi) < 0:
        raise PlanningError(
            f"{power_kind.value} power of {target_power} is not reachable for "
            f"c <= {C_SEARCH[1]:g} (z_o={z_o:.4g}, method={method.value})"
        )
    return math.exp(find_root(gap, Bracket(lo, hi), tol=1e-12))
