"""Normal distribution helpers, bracketed root finding and quadrature.

Scalar functions use the standard library (``math.erfc`` and
``statistics.NormalDist``); root finding and adaptive quadrature delegate
to :mod:`scipy` behind small wrappers that validate inputs and translate
failures into :mod:`replisure.errors` exceptions.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from statistics import NormalDist
from typing import Callable

from scipy import integrate as _integrate
from scipy import optimize as _optimize

from .errors import BracketError, ConvergenceError, DomainError

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
_STD_NORMAL = NormalDist()

DEFAULT_ROOT_TOL = 1e-10


def _check_finite(x: float, name: str = "x") -> float:
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"{name} must be finite, got {x!r}")
    return x


def norm_cdf(x: float) -> float:
    """Standard normal cumulative distribution function."""
    x = _check_finite(x)
    return 0.5 * math.erfc(-x / _SQRT2)


def norm_sf(x: float) -> float:
    """Upper tail ``1 - norm_cdf(x)`` without cancellation for large ``x``."""
    x = _check_finite(x)
    return 0.5 * math.erfc(x / _SQRT2)


def norm_pdf(x: float) -> float:
    x = _check_finite(x)
    return _INV_SQRT_2PI * math.exp(-0.5 * x * x)


def norm_quantile(p: float) -> float:
    """Inverse of :func:`norm_cdf` on the open interval (0, 1)."""
    p = float(p)
    if not 0.0 < p < 1.0:
        raise DomainError(f"probability must lie in (0, 1), got {p!r}")
    x = _STD_NORMAL.inv_cdf(p)
    # one Newton step against norm_cdf so the pair round-trips tightly
    dens = norm_pdf(x)
    if dens > 0.0:
        x -= (norm_cdf(x) - p) / dens
    return x


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float

    def __post_init__(self):
        lo = _check_finite(self.lo, "lo")
        hi = _check_finite(self.hi, "hi")
        if not lo < hi:
            raise DomainError(f"bracket requires lo < hi, got [{lo}, {hi}]")


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    evaluations: int


def find_root(
    f: Callable[[float], float],
    bracket: Bracket,
    tol: float = DEFAULT_ROOT_TOL,
    maxiter: int = 200,
) -> float:
    """Brent's method on ``bracket``; ``f`` must change sign across it.

    Raises :class:`BracketError` when the endpoints share a sign and
    :class:`ConvergenceError` when ``maxiter`` is exhausted.
    """
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol!r}")
    flo = f(bracket.lo)
    fhi = f(bracket.hi)
    if flo == 0.0:
        return bracket.lo
    if fhi == 0.0:
        return bracket.hi
    if (flo > 0) == (fhi > 0):
        raise BracketError(
            f"no sign change on [{bracket.lo}, {bracket.hi}]: "
            f"f(lo)={flo:.6g}, f(hi)={fhi:.6g}"
        )
    try:
        root, info = _optimize.brentq(
            f, bracket.lo, bracket.hi, xtol=tol, rtol=4 * sys.float_info.epsilon,
            maxiter=maxiter, full_output=True, disp=False,
        )
    except RuntimeError as exc:  # pragma: no cover - disp=False suppresses it
        raise ConvergenceError(str(exc)) from exc
    if not info.converged:
        raise ConvergenceError(
            f"root finding did not converge in {maxiter} iterations ({info.flag})"
        )
    return root


def integrate(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    abs_tol: float = 1e-10,
    limit: int = 200,
) -> QuadratureResult:
    """Adaptive Gauss-Kronrod quadrature of ``f`` over ``[lo, hi]``.

    ``hi`` may be ``math.inf``; the semi-infinite range is then mapped onto
    a finite one by QUADPACK's variable transform.
    """
    lo = _check_finite(lo, "lo")
    hi = float(hi)
    if math.isnan(hi) or hi == -math.inf:
        raise DomainError(f"upper limit must be finite or +inf, got {hi!r}")
    if not abs_tol > 0:
        raise DomainError(f"abs_tol must be positive, got {abs_tol!r}")
    if hi == lo:
        return QuadratureResult(0.0, 0.0, 1)
    if hi < lo:
        res = integrate(f, hi, lo, abs_tol, limit)
        return QuadratureResult(-res.value, res.abs_error_estimate, res.evaluations)
    out = _integrate.quad(
        f, lo, hi, epsabs=abs_tol / 10, epsrel=0.0, limit=limit, full_output=1
    )
    value, err, info = out[0], out[1], out[2]
    if len(out) > 3 and err > abs_tol:
        raise ConvergenceError(
            f"quadrature on [{lo}, {hi}] stopped at error {err:.3g}: {out[3]}"
        )
    return QuadratureResult(float(value), float(abs(err)), int(info["neval"]))
