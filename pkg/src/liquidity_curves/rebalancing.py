"""Rebalancing strategies (weight policies) and the prices they imply.

A policy fixes the value weight of every asset at step ``t`` using only
information available at ``t - 1``. Both built-in policies are history-free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

from .errors import InputError, LengthMismatch, NonPositiveInput, SignViolation

DEFAULT_REL_TOL = 1e-12


class PolicyKind(str, Enum):
    EQUAL = "equal"
    CONSTANT = "constant"


@dataclass(frozen=True)
class WeightVector:
    omega: tuple[float, ...]

    def __post_init__(self) -> None:
        if any(not w > 0 for w in self.omega):
            raise NonPositiveInput(f"weights must be positive, got {self.omega}")
        total = math.fsum(self.omega)
        if abs(total - 1.0) > DEFAULT_REL_TOL * max(1, len(self.omega)):
            raise InputError(f"weights sum to {total!r}, expected 1")

    def __len__(self) -> int:
        return len(self.omega)

    def __getitem__(self, i: int) -> float:
        return self.omega[i]

    def __iter__(self):
        return iter(self.omega)


@dataclass(frozen=True)
class WeightPolicy:
    kind: PolicyKind = PolicyKind.EQUAL
    weights: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        kind = PolicyKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is PolicyKind.CONSTANT:
            if not self.weights:
                raise InputError("constant policy requires weights")
            weights = tuple(float(w) for w in self.weights)
            WeightVector(weights)  # validates positivity and normalisation
            object.__setattr__(self, "weights", weights)
        elif self.weights is not None:
            raise InputError("equal policy takes no weights")

    @classmethod
    def equal(cls) -> WeightPolicy:
        return cls(PolicyKind.EQUAL)

    @classmethod
    def constant(cls, weights: Iterable[float]) -> WeightPolicy:
        return cls(PolicyKind.CONSTANT, tuple(weights))


def weights_at(policy: WeightPolicy, n: int, history: Sequence = ()) -> WeightVector:
    """Weights the policy prescribes for the next step.

    ``history`` holds prior pool states (oldest first). Only states up to
    ``t - 1`` may be passed in; the built-in policies ignore it.
    """
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    if policy.kind is PolicyKind.EQUAL:
        return WeightVector((1.0 / n,) * n)
    assert policy.weights is not None
    if len(policy.weights) != n:
        raise LengthMismatch(f"policy has {len(policy.weights)} weights, pool has {n} assets")
    return WeightVector(policy.weights)


def implied_price(omega_i: float, alpha0: float, alpha_i: float) -> float:
    """Price of an asset in pool-token units, ``-omega_i * alpha0 / alpha_i``."""
    if not omega_i > 0:
        raise SignViolation(f"weight must be positive, got {omega_i!r}")
    if not alpha0 < 0:
        raise SignViolation(f"pool-token balance must be negative, got {alpha0!r}")
    if not alpha_i > 0:
        raise SignViolation(f"asset balance must be positive, got {alpha_i!r}")
    return -omega_i * alpha0 / alpha_i


def implied_prices(omega: Sequence[float], alpha0: float, alpha: Sequence[float]) -> list[float]:
    if len(omega) != len(alpha):
        raise LengthMismatch("weights and balances differ in length")
    return [implied_price(w, alpha0, a) for w, a in zip(omega, alpha)]
