"""Curve sweeps: tabulated swap and single-asset staking curves."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum
from typing import IO, Iterable, Sequence

from .curve import CurveResidualSpec, eval_g0, solve_unknown_growth
from .errors import InputError, NoPositiveRoot
from .model import check_k, fmt

SWAP_HEADER = ("k", "g1", "g2", "status")
STAKE_HEADER = ("k", "n", "g1", "g0")


class SweepMode(str, Enum):
    SWAP_CURVE = "swap"
    STAKE_CURVE = "stake"


@dataclass(frozen=True)
class CurveSweepRequest:
    mode: SweepMode
    k_values: tuple[float, ...]
    g_range: tuple[float, float, int]
    n_values: tuple[int, ...] = (2,)

    def __post_init__(self) -> None:
        object.__setattr__(self, "mode", SweepMode(self.mode))
        object.__setattr__(self, "k_values", tuple(check_k(k) for k in self.k_values))
        lo, hi, steps = self.g_range
        if not (0 < lo < hi) or int(steps) < 2:
            raise InputError(f"range needs 0 < lo < hi and steps >= 2, got {self.g_range}")
        if not self.k_values:
            raise InputError("at least one k value is required")
        if any(int(n) < 1 for n in self.n_values):
            raise InputError("n must be >= 1")

    def grid(self) -> list[float]:
        lo, hi, steps = self.g_range
        steps = int(steps)
        return [lo + (hi - lo) * i / (steps - 1) for i in range(steps - 1)] + [hi]


def swap_curve(req: CurveSweepRequest) -> list[tuple[float, float, float | None, str]]:
    """Rows ``(k, g1, g2, status)`` for a two-token swap with ``g0 = 1``.

    Infeasible samples keep their row with ``g2 = None``.
    """
    rows = []
    for k in sorted(set(req.k_values)):
        for g1 in req.grid():
            try:
                g2 = solve_unknown_growth(CurveResidualSpec.equal(k, [g1, None], 1.0))
            except NoPositiveRoot:
                rows.append((k, g1, None, "infeasible"))
            else:
                rows.append((k, g1, g2, "ok"))
    return rows


def stake_curve(req: CurveSweepRequest) -> list[tuple[float, int, float, float]]:
    """Rows ``(k, n, g1, g0)`` for staking one asset into an n-asset pool."""
    rows = []
    for k in sorted(set(req.k_values)):
        for n in sorted(set(req.n_values)):
            for g1 in req.grid():
                g0 = eval_g0(CurveResidualSpec.equal(k, [g1] + [1.0] * (n - 1), None))
                rows.append((k, n, g1, g0))
    return rows


def sweep(req: CurveSweepRequest) -> list[tuple]:
    return swap_curve(req) if req.mode is SweepMode.SWAP_CURVE else stake_curve(req)


def write_csv(req: CurveSweepRequest, rows: Iterable[Sequence], stream: IO[str]) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    if req.mode is SweepMode.SWAP_CURVE:
        writer.writerow(SWAP_HEADER)
        for k, g1, g2, status in rows:
            writer.writerow((fmt(k), fmt(g1), "" if g2 is None else fmt(g2), status))
    else:
        writer.writerow(STAKE_HEADER)
        for k, n, g1, g0 in rows:
            writer.writerow((fmt(k), n, fmt(g1), fmt(g0)))
