"""The one-parameter family of liquidity curves.

For growth factors ``g_i`` of the assets and ``g0`` of the pool token, with
value weights ``w_prev`` (before the step) and ``w_new`` (after it)::

    g0 * [(1 - k) + k * sum(w_new_i / g_i)] = k + (1 - k) * sum(w_prev_i * g_i)

``k = 1/2`` with two equally weighted assets and ``g0 = 1`` reduces to the
constant product rule ``g1 * g2 = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import (
    LengthMismatch,
    LiquidityCurveError,
    NonPositiveGrowth,
    NoPositiveRoot,
    NoUnknown,
)
from .model import UNKNOWN, GrowthVector, check_k
from .rebalancing import DEFAULT_REL_TOL, WeightVector

GROWTH_FLOOR = 1e-12


def ek_average(f_new: float, f_prev: float, k: float) -> float:
    """k-weighted average across a step: ``k * f_new + (1 - k) * f_prev``."""
    k = check_k(k)
    return k * f_new + (1 - k) * f_prev


@dataclass(frozen=True)
class CurveResidualSpec:
    k: float
    omega_prev: WeightVector
    omega_new: WeightVector
    growths: GrowthVector

    def __post_init__(self) -> None:
        object.__setattr__(self, "k", check_k(self.k))
        for name in ("omega_prev", "omega_new"):
            w = getattr(self, name)
            if not isinstance(w, WeightVector):
                object.__setattr__(self, name, WeightVector(tuple(w)))
        if not len(self.omega_prev) == len(self.omega_new) == len(self.growths.g):
            raise LengthMismatch("weights and growth factors differ in length")
        for x in (self.growths.g0, *self.growths.g):
            if x is not UNKNOWN and x < GROWTH_FLOOR:
                raise NonPositiveGrowth(f"growth factor {x!r} is below the floor {GROWTH_FLOOR}")

    @property
    def n(self) -> int:
        return len(self.growths.g)

    @classmethod
    def equal(cls, k: float, g: Sequence[float | None], g0: float | None = 1.0) -> CurveResidualSpec:
        """Spec for an equally weighted pool."""
        w = WeightVector((1.0 / len(g),) * len(g))
        return cls(k, w, w, GrowthVector(tuple(g), g0))

    def with_growths(self, growths: GrowthVector) -> CurveResidualSpec:
        return CurveResidualSpec(self.k, self.omega_prev, self.omega_new, growths)


def _known(spec: CurveResidualSpec) -> tuple[float, ...]:
    if any(x is UNKNOWN for x in spec.growths.g):
        raise NonPositiveGrowth("every asset growth factor must be known")
    return spec.growths.g  # type: ignore[return-value]


def eval_g0(spec: CurveResidualSpec) -> float:
    """Pool-token growth implied by fully specified asset growths."""
    k = spec.k
    g = _known(spec)
    if all(x == g[0] for x in g):
        # Uniform growth collapses the curve to g0 = g; skip the rounding of the general form.
        return g[0]
    num = k + (1 - k) * math.fsum(w * x for w, x in zip(spec.omega_prev, g))
    den = (1 - k) + k * math.fsum(w / x for w, x in zip(spec.omega_new, g))
    return num / den


def _terms(spec: CurveResidualSpec) -> tuple[float, float, float, float]:
    k = spec.k
    g = _known(spec)
    g0 = spec.growths.g0
    if g0 is UNKNOWN:
        raise NonPositiveGrowth("pool-token growth must be known")
    inv = math.fsum(w / x for w, x in zip(spec.omega_new, g))
    fwd = math.fsum(w * x for w, x in zip(spec.omega_prev, g))
    return g0 * (1 - k), g0 * k * inv, k, (1 - k) * fwd


def curve_residual(spec: CurveResidualSpec) -> float:
    """``g0 * [(1-k) + k*sum(w_new/g)] - k - (1-k)*sum(w_prev*g)``; zero on the curve."""
    t1, t2, t3, t4 = _terms(spec)
    return (t1 + t2) - (t3 + t4)


def residual_scale(spec: CurveResidualSpec) -> float:
    """Magnitude the residual is compared against: ``max(1, |terms|)``."""
    return max(1.0, *(abs(t) for t in _terms(spec)))


def _positive_quadratic_root(a: float, b: float, c: float) -> float:
    # a > 0 and c < 0, so exactly one root is positive; sign-aware form avoids cancellation.
    disc = b * b - 4 * a * c
    q = -0.5 * (b + math.copysign(math.sqrt(disc), b))
    r1, r2 = q / a, c / q
    return r1 if r1 > 0 else r2


def solve_unknown_growth(spec: CurveResidualSpec, rel_tol: float = DEFAULT_REL_TOL) -> float:
    """Solve the curve for the single unknown growth factor.

    Raises :class:`NoPositiveRoot` when the trade is infeasible, which can
    only happen on the linear ``k = 0`` and harmonic ``k = 1`` boundary curves.
    """
    idx = spec.growths.unknown_index
    if idx is None:
        raise NoUnknown("exactly one growth factor must be unknown")
    if idx == -1:
        return eval_g0(spec)

    k = spec.k
    g0 = spec.growths.g0
    others = [(wp, wt, x) for i, (wp, wt, x) in enumerate(zip(spec.omega_prev, spec.omega_new, spec.growths.g)) if i != idx]
    s_new = math.fsum(wt / x for _, wt, x in others)
    s_prev = math.fsum(wp * x for wp, _, x in others)
    w_prev, w_new = spec.omega_prev[idx], spec.omega_new[idx]

    if k == 0.0:
        root = (g0 - s_prev) / w_prev
    elif k == 1.0:
        slack = 1.0 - g0 * s_new
        if not slack > 0:
            raise NoPositiveRoot(
                f"no positive growth: harmonic constraint leaves {slack!r} for the unknown token"
            )
        root = w_new * g0 / slack
    else:
        a = (1 - k) * w_prev
        b = -(g0 * (1 - k) + g0 * k * s_new - k - (1 - k) * s_prev)
        c = -g0 * k * w_new
        root = _positive_quadratic_root(a, b, c)

    if not (root >= GROWTH_FLOOR and math.isfinite(root)):
        raise NoPositiveRoot(f"solved growth {root!r} is not a settleable positive factor")

    solved = spec.with_growths(spec.growths.filled(root))
    resid = curve_residual(solved)
    if abs(resid) > rel_tol * residual_scale(solved):
        raise LiquidityCurveError(f"solution {root!r} misses the curve by {resid!r}")
    return root
