import random

import pytest

from liquidity_curves import WeightPolicy, pool_init


def random_pool(rng: random.Random, n=None, k=None, constant_weights=False):
    """Pool with random balances whose genesis prices satisfy the policy."""
    n = n or rng.randint(2, 8)
    k = rng.random() if k is None else k
    amounts = [rng.uniform(1.0, 1e4) for _ in range(n)]
    if constant_weights:
        raw = [rng.uniform(0.5, 2.0) for _ in range(n)]
        weights = [r / sum(raw) for r in raw]
        weights[-1] = 1.0 - sum(weights[:-1])
        policy = WeightPolicy.constant(weights)
    else:
        weights = [1.0 / n] * n
        policy = WeightPolicy.equal()
    total = rng.uniform(10.0, 1e5)
    prices = [w * total / a for w, a in zip(weights, amounts)]
    symbols = [f"T{i}" for i in range(n)]
    return pool_init(symbols, amounts, prices, k, policy)


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def pool2():
    return pool_init(["A", "B"], [100.0, 100.0], [1.0, 1.0], 0.5)


def random_trade(rng: random.Random, pool):
    """A random swap, stake, unstake or batch trade that keeps balances positive."""
    from liquidity_curves import TradeKind, TradeSpec

    syms = list(pool.symbols)
    kind = rng.choice(["swap", "stake", "unstake", "burn", "prop", "batch"])
    a, b = rng.sample(syms, 2)
    amt = lambda s, lo, hi: pool.alpha[pool.index(s)] * rng.uniform(lo, hi)  # noqa: E731
    if kind == "swap":
        return TradeSpec.swap(a, amt(a, -0.3, 1.0), b)
    if kind == "stake":
        return TradeSpec(TradeKind.STAKE_SINGLE, ((a, amt(a, 0.0, 1.0)),), "POOL")
    if kind == "unstake":
        return TradeSpec(TradeKind.UNSTAKE_SINGLE, ((a, -amt(a, 0.0, 0.3)),), "POOL")
    if kind == "burn":
        return TradeSpec(TradeKind.UNSTAKE_SINGLE, (("POOL", pool.supply * rng.uniform(0.0, 0.05)),), a)
    if kind == "prop":
        g = rng.uniform(0.7, 1.5)
        kind_ = TradeKind.STAKE_PROPORTIONAL if g >= 1 else TradeKind.UNSTAKE_PROPORTIONAL
        return TradeSpec(kind_, ((a, pool.alpha[pool.index(a)] * (g - 1)),), "POOL")
    unknown = rng.choice(syms + ["POOL"])
    fixed = [s for s in syms if s != unknown]
    legs = [(s, amt(s, -0.2, 0.5)) for s in rng.sample(fixed, rng.randint(1, len(fixed)))]
    return TradeSpec(TradeKind.BATCH, tuple(legs), unknown)


def random_trade_log(rng: random.Random, pool, count: int):
    """Feasible trades, each generated against the state left by the previous one."""
    from liquidity_curves import apply
    from liquidity_curves.errors import InfeasibleTrade

    trades = []
    while len(trades) < count:
        spec = random_trade(rng, pool)
        try:
            pool, _ = apply(pool, spec)
        except InfeasibleTrade:
            continue
        trades.append(spec)
    return trades, pool


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record a PASS/FAIL line for the acceptance summary, then assert."""

    def check(label: str, ok: bool, detail: str) -> None:
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
        assert ok, f"{label}: {detail}"

    return check


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
