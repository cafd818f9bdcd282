"""Settlement of swaps, stakes, unstakes and batch trades against a pool.

Traders fix token amounts; the engine turns them into growth factors, solves
the liquidity curve for the one remaining leg and prices the result so the
self-financing condition can be audited from the receipt alone.

Leg amounts are signed flows *into the pool*: depositing 10 A is ``+10``,
withdrawing is negative. The same holds for the pool token, whose balance is
the (negative) liability: a mint is a negative flow, a burn a positive one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Sequence

from .curve import GROWTH_FLOOR, CurveResidualSpec, ek_average, solve_unknown_growth
from .errors import (
    AuditFailure,
    InfeasibleTrade,
    InsufficientBalance,
    InvalidTrade,
    KRestriction,
    NoPositiveRoot,
    ShapeMismatch,
)
from .model import POOL_TOKEN, UNKNOWN, GrowthVector, PoolState, TradeReceipt
from .rebalancing import implied_prices, weights_at


class TradeKind(str, Enum):
    SWAP = "swap"
    STAKE_SINGLE = "stake_single"
    STAKE_PROPORTIONAL = "stake_proportional"
    UNSTAKE_SINGLE = "unstake_single"
    UNSTAKE_PROPORTIONAL = "unstake_proportional"
    BATCH = "batch"


@dataclass(frozen=True)
class TradeSpec:
    kind: TradeKind
    legs: tuple[tuple[str, float], ...]
    unknown: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", TradeKind(self.kind))
        object.__setattr__(self, "legs", tuple((str(s), float(a)) for s, a in self.legs))
        symbols = [s for s, _ in self.legs]
        if len(set(symbols)) != len(symbols):
            raise InvalidTrade(f"duplicate legs: {symbols}")
        if self.unknown in symbols:
            raise InvalidTrade(f"{self.unknown} is both fixed and unknown")
        if any(not math.isfinite(a) for _, a in self.legs):
            raise InvalidTrade("leg amounts must be finite")
        self._check_kind()

    def _check_kind(self) -> None:
        kind, legs = self.kind, self.legs
        if kind is TradeKind.BATCH:
            return
        if len(legs) != 1:
            raise InvalidTrade(f"{kind.value} takes exactly one fixed leg, got {len(legs)}")
        (symbol, amount), = legs
        pool_leg = symbol == POOL_TOKEN
        pool_unknown = self.unknown == POOL_TOKEN
        if kind is TradeKind.SWAP:
            ok = not pool_leg and not pool_unknown
        elif kind is TradeKind.STAKE_SINGLE:
            ok = (pool_unknown and amount >= 0) or (pool_leg and amount <= 0)
        elif kind is TradeKind.UNSTAKE_SINGLE:
            ok = (pool_unknown and amount <= 0) or (pool_leg and amount >= 0)
        elif kind is TradeKind.STAKE_PROPORTIONAL:
            ok = pool_unknown and not pool_leg and amount >= 0
        else:
            ok = pool_unknown and not pool_leg and amount <= 0
        if not ok:
            raise InvalidTrade(f"legs {legs} with unknown {self.unknown} do not describe a {kind.value}")

    @classmethod
    def infer(cls, legs: Iterable[tuple[str, float]], unknown: str) -> TradeSpec:
        """Build a spec, picking the narrowest kind the legs fit."""
        legs = tuple(legs)
        if len(legs) == 1:
            (symbol, amount), = legs
            if symbol != POOL_TOKEN and unknown != POOL_TOKEN:
                return cls(TradeKind.SWAP, legs, unknown)
            if unknown == POOL_TOKEN:
                kind = TradeKind.STAKE_SINGLE if amount >= 0 else TradeKind.UNSTAKE_SINGLE
            else:
                kind = TradeKind.UNSTAKE_SINGLE if amount >= 0 else TradeKind.STAKE_SINGLE
            return cls(kind, legs, unknown)
        return cls(TradeKind.BATCH, legs, unknown)

    @classmethod
    def swap(cls, token_in: str, amount_in: float, token_out: str) -> TradeSpec:
        return cls(TradeKind.SWAP, ((token_in, amount_in),), token_out)


def _growth(balance: float, delta: float, symbol: str) -> float:
    g = (balance + delta) / balance
    if not g >= GROWTH_FLOOR:
        raise InsufficientBalance(f"leg {symbol}:{delta!r} would exhaust the pool balance {abs(balance)!r}")
    return g


def fixed_growths(pool: PoolState, spec: TradeSpec) -> tuple[list[float | None], float | None, dict[int, float], float | None]:
    g: list[float | None] = [1.0] * pool.n
    g0: float | None = 1.0
    fixed: dict[int, float] = {}
    fixed0: float | None = None
    for symbol, amount in spec.legs:
        if symbol == POOL_TOKEN:
            g0 = _growth(pool.alpha0, amount, symbol)
            fixed0 = amount
        else:
            i = pool.index(symbol)
            g[i] = _growth(pool.alpha[i], amount, symbol)
            fixed[i] = amount
    if spec.kind in (TradeKind.STAKE_PROPORTIONAL, TradeKind.UNSTAKE_PROPORTIONAL):
        (i, amount), = fixed.items()
        growth = g[i]
        g = [growth] * pool.n
        fixed = {j: (amount if j == i else a * (growth - 1)) for j, a in enumerate(pool.alpha)}
    if spec.unknown == POOL_TOKEN:
        g0 = UNKNOWN
    else:
        g[pool.index(spec.unknown)] = UNKNOWN
    return g, g0, fixed, fixed0


def quote(pool: PoolState, spec: TradeSpec) -> TradeReceipt:
    """Price a trade without changing the pool."""
    g, g0, fixed, fixed0 = fixed_growths(pool, spec)
    omega_prev = pool.weights()
    omega_new = weights_at(pool.weight_policy, pool.n, (pool,))
    curve = CurveResidualSpec(pool.k, omega_prev, omega_new, GrowthVector(tuple(g), g0))
    try:
        root = solve_unknown_growth(curve, pool.params.rel_tol)
    except NoPositiveRoot as exc:
        if pool.k == 1.0:
            raise KRestriction(f"k=1 forbids removing half or more of a balance: {exc}") from exc
        raise InfeasibleTrade(str(exc)) from exc
    growths = curve.growths.filled(root)

    deltas = [fixed.get(i, a * (gi - 1)) for i, (a, gi) in enumerate(zip(pool.alpha, growths.g))]
    delta0 = fixed0 if fixed0 is not None else pool.alpha0 * (growths.g0 - 1)
    alpha_new = tuple(a + d for a, d in zip(pool.alpha, deltas))
    alpha0_new = pool.alpha0 + delta0
    if any(not a > 0 for a in alpha_new) or not alpha0_new < 0:
        raise InsufficientBalance("settled balances would not stay positive")

    prices_prev = implied_prices(omega_prev.omega, pool.alpha0, pool.alpha)
    prices_new = implied_prices(omega_new.omega, alpha0_new, alpha_new)
    resid = self_financing_residual(deltas, delta0, prices_prev, prices_new, pool.k)
    if abs(resid) > pool.params.rel_tol * abs(pool.alpha0):
        raise AuditFailure(f"self-financing residual {resid!r} exceeds tolerance")
    return TradeReceipt(
        step=pool.step + 1,
        kind=spec.kind.value,
        symbols=pool.symbols,
        deltas=tuple(deltas),
        delta0=delta0,
        solved_growths=growths,
        prices_prev=tuple(prices_prev),
        prices_new=tuple(prices_new),
        self_financing_residual=resid,
    )


def settle(pool: PoolState, receipt: TradeReceipt) -> PoolState:
    """State after the trade described by ``receipt``."""
    return replace(
        pool,
        alpha=tuple(a + d for a, d in zip(pool.alpha, receipt.deltas)),
        alpha0=pool.alpha0 + receipt.delta0,
        step=receipt.step,
    )


def apply(pool: PoolState, spec: TradeSpec) -> tuple[PoolState, TradeReceipt]:
    receipt = quote(pool, spec)
    return settle(pool, receipt), receipt


def batch_settle(pool: PoolState, legs: Iterable[tuple[str, float]], unknown: str) -> tuple[PoolState, TradeReceipt]:
    """Settle any number of fixed legs atomically with one curve solve."""
    return apply(pool, TradeSpec(TradeKind.BATCH, tuple(legs), unknown))


def self_financing_residual(
    deltas: Sequence[float], delta0: float, prices_prev: Sequence[float], prices_new: Sequence[float], k: float
) -> float:
    """``delta0 + sum(delta_i * E_k(P_i))``: value created by trading alone."""
    flows = [d * ek_average(p1, p0, k) for d, p0, p1 in zip(deltas, prices_prev, prices_new)]
    return math.fsum([delta0, *flows])


def verify_self_financing(
    prev: PoolState, next: PoolState, prices_prev: Sequence[float], prices_new: Sequence[float], k: float
) -> float:
    if prev.symbols != next.symbols:
        raise ShapeMismatch("states describe different token sets")
    if not len(prices_prev) == len(prices_new) == prev.n:
        raise ShapeMismatch("price vectors do not match the pool size")
    deltas = [b - a for a, b in zip(prev.alpha, next.alpha)]
    return self_financing_residual(deltas, next.alpha0 - prev.alpha0, prices_prev, prices_new, k)
