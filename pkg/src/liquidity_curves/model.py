"""Core pool data model and the pool-state document format.

Asset tokens are indexed ``0..n-1`` here; the pool token is kept apart as
``alpha0``. The pool token is the numeraire and a liability, so ``alpha0`` is
negative and the total pool value is zero at every step.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Any, Sequence

from .errors import (
    InputError,
    InvariantViolation,
    KOutOfRange,
    LengthMismatch,
    MalformedDocument,
    MultipleUnknowns,
    NonPositiveGrowth,
    NonPositiveInput,
    PolicyViolation,
    UnknownToken,
)
from .rebalancing import (
    DEFAULT_REL_TOL,
    PolicyKind,
    WeightPolicy,
    WeightVector,
    implied_prices,
    weights_at,
)

POOL_TOKEN = "POOL"
DOCUMENT_VERSION = 1

# Marker for the growth factor a solve must produce.
UNKNOWN = None


def fmt(x: float) -> str:
    """Decimal string that round-trips a double exactly."""
    return format(float(x) + 0.0, ".17g")


def check_k(k: float) -> float:
    k = float(k)
    if not 0.0 <= k <= 1.0:
        raise KOutOfRange(f"k must lie in [0, 1], got {k!r}")
    return k


@dataclass(frozen=True)
class CurveParams:
    k: float = 0.5
    rel_tol: float = DEFAULT_REL_TOL
    max_bisect_iter: int = 200

    def __post_init__(self) -> None:
        object.__setattr__(self, "k", check_k(self.k))
        if not self.rel_tol > 0:
            raise InputError(f"rel_tol must be positive, got {self.rel_tol!r}")
        if self.max_bisect_iter <= 0:
            raise InputError("max_bisect_iter must be positive")


@dataclass(frozen=True)
class GrowthVector:
    """Per-token growth factors; at most one slot may be ``UNKNOWN``."""

    g: tuple[float | None, ...]
    g0: float | None = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "g", tuple(self.g))
        slots = (self.g0, *self.g)
        if sum(x is UNKNOWN for x in slots) > 1:
            raise MultipleUnknowns("at most one growth factor may be unknown")
        for x in slots:
            if x is not UNKNOWN and not x > 0:
                raise NonPositiveGrowth(f"growth factors must be positive, got {x!r}")

    @property
    def unknown_index(self) -> int | None:
        """``-1`` for the pool token, an asset index, or ``None`` when complete."""
        if self.g0 is UNKNOWN:
            return -1
        for i, x in enumerate(self.g):
            if x is UNKNOWN:
                return i
        return None

    def filled(self, value: float) -> GrowthVector:
        idx = self.unknown_index
        if idx is None:
            return self
        if idx == -1:
            return replace(self, g0=value)
        g = list(self.g)
        g[idx] = value
        return GrowthVector(tuple(g), self.g0)


@dataclass(frozen=True)
class PoolState:
    symbols: tuple[str, ...]
    alpha: tuple[float, ...]
    alpha0: float
    params: CurveParams = field(default_factory=CurveParams)
    weight_policy: WeightPolicy = field(default_factory=WeightPolicy.equal)
    step: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "symbols", tuple(self.symbols))
        object.__setattr__(self, "alpha", tuple(float(a) for a in self.alpha))
        object.__setattr__(self, "alpha0", float(self.alpha0))
        if not self.symbols:
            raise InvariantViolation("a pool needs at least one asset")
        if len(self.symbols) != len(self.alpha):
            raise InvariantViolation("symbols and balances differ in length")
        if len(set(self.symbols)) != len(self.symbols):
            raise InvariantViolation(f"duplicate token symbols: {self.symbols}")
        if POOL_TOKEN in self.symbols:
            raise InvariantViolation(f"{POOL_TOKEN!r} is reserved for the pool token")
        for s, a in zip(self.symbols, self.alpha):
            if not (a > 0 and math.isfinite(a)):
                raise InvariantViolation(f"balance of {s} must be positive, got {a!r}")
        if not (self.alpha0 < 0 and math.isfinite(self.alpha0)):
            raise InvariantViolation(f"pool-token balance must be negative, got {self.alpha0!r}")
        if self.step < 0:
            raise InvariantViolation("step must be non-negative")
        try:
            weights_at(self.weight_policy, self.n)
        except LengthMismatch as exc:
            raise InvariantViolation(str(exc)) from exc

    @property
    def n(self) -> int:
        return len(self.alpha)

    @property
    def k(self) -> float:
        return self.params.k

    @property
    def supply(self) -> float:
        """Pool tokens outstanding (the liability, reported positive)."""
        return -self.alpha0

    def index(self, symbol: str) -> int:
        try:
            return self.symbols.index(symbol)
        except ValueError:
            raise UnknownToken(f"unknown token {symbol!r}") from None

    def weights(self) -> WeightVector:
        return weights_at(self.weight_policy, self.n)

    def prices(self) -> list[float]:
        return implied_prices(self.weights().omega, self.alpha0, self.alpha)

    def total_value_residual(self) -> float:
        """``alpha0 + sum(alpha_i * P_i)``; zero up to rounding."""
        return self.alpha0 + math.fsum(a * p for a, p in zip(self.alpha, self.prices()))


@dataclass(frozen=True)
class TradeReceipt:
    step: int
    kind: str
    symbols: tuple[str, ...]
    deltas: tuple[float, ...]
    delta0: float
    solved_growths: GrowthVector
    prices_prev: tuple[float, ...]
    prices_new: tuple[float, ...]
    self_financing_residual: float

    @property
    def minted(self) -> float:
        """Pool tokens minted by the trade (negative for a burn)."""
        return -self.delta0

    def to_dict(self) -> dict[str, Any]:
        return {
            "step": self.step,
            "kind": self.kind,
            "tokens": [
                {"symbol": s, "delta": fmt(d), "growth": fmt(g), "price_prev": fmt(p0), "price_new": fmt(p1)}
                for s, d, g, p0, p1 in zip(
                    self.symbols, self.deltas, self.solved_growths.g, self.prices_prev, self.prices_new
                )
            ],
            "pool_token": {"delta": fmt(self.delta0), "growth": fmt(self.solved_growths.g0), "minted": fmt(self.minted)},
            "self_financing_residual": fmt(self.self_financing_residual),
        }


def pool_init(
    symbols: Sequence[str],
    amounts: Sequence[float],
    prices: Sequence[float],
    k: float,
    policy: WeightPolicy | None = None,
    rel_tol: float = DEFAULT_REL_TOL,
) -> PoolState:
    """Create a genesis pool whose liability offsets the asset value exactly."""
    policy = policy or WeightPolicy.equal()
    if not (len(symbols) == len(amounts) == len(prices)):
        raise LengthMismatch("symbols, amounts and prices must have equal length")
    if any(not a > 0 for a in amounts) or any(not p > 0 for p in prices):
        raise NonPositiveInput("amounts and prices must be positive")
    params = CurveParams(check_k(k), rel_tol)
    values = [float(a) * float(p) for a, p in zip(amounts, prices)]
    total = math.fsum(values)
    target = weights_at(policy, len(values))
    for s, v, w in zip(symbols, values, target):
        if abs(v / total - w) > rel_tol:
            raise PolicyViolation(f"value weight of {s} is {v / total!r}, policy requires {w!r}")
    return PoolState(tuple(symbols), tuple(float(a) for a in amounts), -total, params, policy, 0)


def implied_weights(pool: PoolState, prices: Sequence[float]) -> WeightVector:
    """Value weights ``alpha_i P_i / sum_j alpha_j P_j`` at the given prices."""
    if len(prices) != pool.n:
        raise LengthMismatch(f"expected {pool.n} prices, got {len(prices)}")
    if any(not p > 0 for p in prices):
        raise NonPositiveInput("prices must be positive")
    values = [a * p for a, p in zip(pool.alpha, prices)]
    total = math.fsum(values)
    return WeightVector(tuple(v / total for v in values))


def pool_to_document(pool: PoolState) -> dict[str, Any]:
    policy: dict[str, Any] = {"kind": pool.weight_policy.kind.value}
    if pool.weight_policy.weights is not None:
        policy["weights"] = [fmt(w) for w in pool.weight_policy.weights]
    return {
        "version": DOCUMENT_VERSION,
        "k": fmt(pool.k),
        "step": pool.step,
        "tokens": [{"symbol": s, "amount": fmt(a)} for s, a in zip(pool.symbols, pool.alpha)],
        "pool_token_supply": fmt(pool.supply),
        "weight_policy": policy,
    }


def serialize_pool(pool: PoolState) -> str:
    return json.dumps(pool_to_document(pool), indent=2) + "\n"


def _decimal(value: Any, what: str) -> float:
    if not isinstance(value, str):
        raise MalformedDocument(f"{what} must be a decimal string, got {value!r}")
    try:
        x = float(value)
    except ValueError:
        raise MalformedDocument(f"{what} is not a decimal: {value!r}") from None
    if not math.isfinite(x):
        raise MalformedDocument(f"{what} is not finite: {value!r}")
    return x


def parse_pool(text: str, rel_tol: float = DEFAULT_REL_TOL) -> PoolState:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedDocument(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise MalformedDocument("pool document must be a JSON object")
    if doc.get("version") != DOCUMENT_VERSION:
        raise MalformedDocument(f"unsupported document version {doc.get('version')!r}")
    try:
        tokens = doc["tokens"]
        step = doc["step"]
        k = _decimal(doc["k"], "k")
        supply = _decimal(doc["pool_token_supply"], "pool_token_supply")
        policy_doc = doc.get("weight_policy", {"kind": "equal"})
        symbols = tuple(t["symbol"] for t in tokens)
        amounts = tuple(_decimal(t["amount"], f"amount of {t['symbol']}") for t in tokens)
        kind = policy_doc["kind"]
        raw_weights = policy_doc.get("weights")
    except (KeyError, TypeError) as exc:
        raise MalformedDocument(f"missing or mistyped field: {exc}") from None
    if not isinstance(step, int) or isinstance(step, bool):
        raise MalformedDocument(f"step must be an integer, got {step!r}")
    if not all(isinstance(s, str) for s in symbols):
        raise MalformedDocument("token symbols must be strings")
    if kind not in {p.value for p in PolicyKind}:
        raise MalformedDocument(f"unknown weight policy {kind!r}")
    weights = None if raw_weights is None else tuple(_decimal(w, "weight") for w in raw_weights)
    try:
        params = CurveParams(k, rel_tol)
        policy = WeightPolicy(PolicyKind(kind), weights)
        return PoolState(symbols, amounts, -supply, params, policy, step)
    except InvariantViolation:
        raise
    except InputError as exc:
        raise InvariantViolation(str(exc)) from exc
