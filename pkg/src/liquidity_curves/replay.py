"""Trade-log replay with per-step invariant audits and oracle cross-checks."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from itertools import groupby
from typing import IO, Iterable, Iterator

from .curve import CurveResidualSpec
from .errors import AuditFailure, InfeasibleTrade, MalformedDocument, NoSignChange
from .model import POOL_TOKEN, GrowthVector, PoolState, TradeReceipt, fmt
from .oracle import bisect_growth
from .rebalancing import weights_at
from .settlement import TradeKind, TradeSpec, fixed_growths, apply, verify_self_financing

TRADE_HEADER = ("step", "kind", "token", "signed_amount", "unknown_token")
ORACLE_REL_TOL = 1e-10


@dataclass(frozen=True)
class StepAudit:
    step: int
    self_financing_residual: float
    zero_value_residual: float
    tolerance: float
    oracle_growth: float | None = None

    @property
    def ok(self) -> bool:
        return max(abs(self.self_financing_residual), abs(self.zero_value_residual)) <= self.tolerance

    def to_dict(self) -> dict:
        out = {
            "self_financing_residual": fmt(self.self_financing_residual),
            "zero_value_residual": fmt(self.zero_value_residual),
            "tolerance": fmt(self.tolerance),
            "ok": self.ok,
        }
        if self.oracle_growth is not None:
            out["oracle_growth"] = fmt(self.oracle_growth)
        return out


def read_trades(stream: IO[str]) -> list[TradeSpec]:
    """Parse a trade log; consecutive rows sharing a step form one trade."""
    reader = csv.reader(stream)
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != TRADE_HEADER:
        raise MalformedDocument(f"trade log header must be {','.join(TRADE_HEADER)}")
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != len(TRADE_HEADER):
            raise MalformedDocument(f"line {lineno}: expected {len(TRADE_HEADER)} fields, got {len(row)}")
        step, kind, token, amount, unknown = (c.strip() for c in row)
        try:
            rows.append((int(step), TradeKind(kind), token, float(amount), unknown))
        except ValueError as exc:
            raise MalformedDocument(f"line {lineno}: {exc}") from None
    trades = []
    for step, group in groupby(rows, key=lambda r: r[0]):
        group = list(group)
        kinds = {r[1] for r in group}
        unknowns = {r[4] for r in group}
        if len(kinds) != 1 or len(unknowns) != 1:
            raise MalformedDocument(f"step {step}: rows disagree on kind or unknown token")
        trades.append(TradeSpec(kinds.pop(), tuple((r[2], r[3]) for r in group), unknowns.pop()))
    return trades


def write_trades(trades: Iterable[TradeSpec], stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(TRADE_HEADER)
    for step, spec in enumerate(trades, start=1):
        for token, amount in spec.legs:
            writer.writerow((step, spec.kind.value, token, fmt(amount), spec.unknown))


def oracle_growth(pool: PoolState, spec: TradeSpec) -> float:
    """Solve the trade's unknown growth with the bisection oracle instead."""
    g, g0, _, _ = fixed_growths(pool, spec)
    curve = CurveResidualSpec(
        pool.k, pool.weights(), weights_at(pool.weight_policy, pool.n, (pool,)), GrowthVector(tuple(g), g0)
    )
    return bisect_growth(curve, max_iter=pool.params.max_bisect_iter)


def cross_check(pool: PoolState, spec: TradeSpec, receipt: TradeReceipt | None) -> float | None:
    """Compare a settlement (or its infeasibility) against the oracle.

    Raises :class:`AuditFailure` on disagreement; returns the oracle growth.
    """
    try:
        expected = oracle_growth(pool, spec)
    except NoSignChange:
        if receipt is None:
            return None
        raise AuditFailure("oracle finds no root for a trade the solver settled") from None
    if receipt is None:
        raise AuditFailure(f"solver rejected a trade the oracle settles at growth {expected!r}")
    g = receipt.solved_growths
    solved = g.g0 if spec.unknown == POOL_TOKEN else g.g[receipt.symbols.index(spec.unknown)]
    if abs(solved - expected) > ORACLE_REL_TOL * abs(expected):
        raise AuditFailure(f"solver growth {solved!r} disagrees with oracle {expected!r}")
    return expected


def audit_step(prev: PoolState, nxt: PoolState, receipt: TradeReceipt, oracle: float | None = None) -> StepAudit:
    sf = verify_self_financing(prev, nxt, receipt.prices_prev, receipt.prices_new, prev.k)
    return StepAudit(
        step=receipt.step,
        self_financing_residual=sf,
        zero_value_residual=nxt.total_value_residual(),
        tolerance=prev.params.rel_tol * max(abs(prev.alpha0), abs(nxt.alpha0)),
        oracle_growth=oracle,
    )


def replay(pool: PoolState, trades: Iterable[TradeSpec], verify: bool = False) -> Iterator[tuple[PoolState, TradeReceipt, StepAudit]]:
    """Apply trades in order, yielding the new state, receipt and audit per step.

    Stops with :class:`InfeasibleTrade` or :class:`AuditFailure` at the first
    step that cannot be settled cleanly.
    """
    for spec in trades:
        try:
            nxt, receipt = apply(pool, spec)
        except InfeasibleTrade:
            if verify:
                cross_check(pool, spec, None)
            raise
        oracle = cross_check(pool, spec, receipt) if verify else None
        audit = audit_step(pool, nxt, receipt, oracle)
        if not audit.ok:
            raise AuditFailure(f"step {receipt.step}: invariant audit failed: {audit.to_dict()}")
        yield nxt, receipt, audit
        pool = nxt


def step_line(receipt: TradeReceipt, audit: StepAudit) -> str:
    return json.dumps({"step": receipt.step, "receipt": receipt.to_dict(), "audit": audit.to_dict()})
