"""Brute-force bisection oracle for the liquidity curve.

Deliberately slow and simple. It evaluates the curve on its own rather than
reusing the closed-form solver, so the two can be checked against each other.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from .curve import CurveResidualSpec
from .errors import InputError, MaxIterations, NoSignChange, NoUnknown

BRACKET_START = (0.5, 2.0)
BRACKET_LIMITS = (1e-9, 1e9)
BRACKET_FACTOR = 4.0
RESIDUAL_TOL = 1e-14
WIDTH_TOL = 1e-15


@dataclass(frozen=True)
class BracketingInterval:
    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not (0 < self.lo < self.hi):
            raise InputError(f"need 0 < lo < hi, got [{self.lo!r}, {self.hi!r}]")

    def __contains__(self, x: float) -> bool:
        return self.lo <= x <= self.hi


def _residual_fn(spec: CurveResidualSpec) -> tuple[Callable[[float], float], Callable[[float], float]]:
    """Residual of the curve and its scale, as functions of the unknown slot."""
    idx = spec.growths.unknown_index
    if idx is None:
        raise NoUnknown("oracle needs exactly one unknown growth factor")
    k = spec.k
    wp, wn = list(spec.omega_prev), list(spec.omega_new)
    g = list(spec.growths.g)
    g0 = spec.growths.g0

    def parts(x: float) -> tuple[float, float]:
        gg = list(g)
        h0 = g0
        if idx == -1:
            h0 = x
        else:
            gg[idx] = x
        lhs = h0 * ((1 - k) + k * sum(w / v for w, v in zip(wn, gg)))
        rhs = k + (1 - k) * sum(w * v for w, v in zip(wp, gg))
        return lhs, rhs

    def residual(x: float) -> float:
        lhs, rhs = parts(x)
        return lhs - rhs

    def scale(x: float) -> float:
        lhs, rhs = parts(x)
        return max(1.0, abs(lhs), abs(rhs))

    return residual, scale


def auto_bracket(spec: CurveResidualSpec) -> BracketingInterval:
    """Grow ``[1/2, 2]`` geometrically until the residual changes sign."""
    f, _ = _residual_fn(spec)
    lo, hi = BRACKET_START
    floor, ceil = BRACKET_LIMITS
    while True:
        if f(lo) * f(hi) <= 0:
            return BracketingInterval(lo, hi)
        if lo <= floor and hi >= ceil:
            raise NoSignChange(f"no sign change in [{floor}, {ceil}]: trade is infeasible")
        lo = max(lo / BRACKET_FACTOR, floor)
        hi = min(hi * BRACKET_FACTOR, ceil)


def bisect_growth(
    spec: CurveResidualSpec,
    bracket: BracketingInterval | None = None,
    max_iter: int = 200,
) -> float:
    f, scale = _residual_fn(spec)
    bracket = bracket or auto_bracket(spec)
    lo, hi = bracket.lo, bracket.hi
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    if f_lo * f_hi > 0:
        raise NoSignChange(f"residual has the same sign at {lo!r} and {hi!r}")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if f_mid == 0 or mid in (lo, hi) or hi - lo <= WIDTH_TOL * mid:
            return mid
        if (f_mid < 0) == (f_lo < 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    mid = 0.5 * (lo + hi)
    if abs(f(mid)) <= RESIDUAL_TOL * scale(mid):
        return mid
    raise MaxIterations(f"bisection did not converge in {max_iter} iterations")
