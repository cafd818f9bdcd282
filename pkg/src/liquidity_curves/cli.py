"""Command-line front end.

Exit codes: 0 success, 1 malformed input, 2 infeasible trade, 3 failed
invariant audit. Errors are reported on stderr as one JSON object.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path
from typing import Sequence

from .errors import AuditFailure, InfeasibleTrade, InputError, LiquidityCurveError
from .model import POOL_TOKEN, PoolState, fmt, parse_pool, pool_init, serialize_pool
from .rebalancing import WeightPolicy
from .replay import cross_check, read_trades, replay, step_line
from .settlement import TradeKind, TradeSpec, apply, quote
from .sweep import CurveSweepRequest, SweepMode, sweep, write_csv

EXIT_MALFORMED = 1
EXIT_INFEASIBLE = 2
EXIT_AUDIT = 3


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _leg(text: str) -> tuple[str, float]:
    token, sep, amount = text.rpartition(":")
    if not sep or not token:
        raise argparse.ArgumentTypeError(f"expected TOKEN:AMOUNT, got {text!r}")
    try:
        return token, float(amount)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad amount in {text!r}") from None


def _range(text: str) -> tuple[float, float, int]:
    try:
        lo, hi, steps = text.split(":")
        return float(lo), float(hi), int(steps)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected lo:hi:steps, got {text!r}") from None


def write_atomic(path: Path, text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_pool(path: Path) -> PoolState:
    try:
        return parse_pool(Path(path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read pool document {path}: {exc.strerror}") from None


def _trade_spec(args: argparse.Namespace) -> TradeSpec:
    if args.kind:
        return TradeSpec(TradeKind(args.kind), tuple(args.legs), args.out)
    return TradeSpec.infer(args.legs, args.out)


def cmd_init(args: argparse.Namespace) -> int:
    symbols = [s.strip() for s in args.tokens.split(",") if s.strip()]
    policy = WeightPolicy.constant(args.weights) if args.weights else WeightPolicy.equal()
    pool = pool_init(symbols, args.amounts, args.prices, args.k, policy)
    write_atomic(args.pool, serialize_pool(pool))
    print(json.dumps({"pool": str(args.pool), "pool_token_supply": fmt(pool.supply)}))
    return 0


def _settle(args: argparse.Namespace, commit: bool) -> int:
    pool = load_pool(args.pool)
    spec = _trade_spec(args)
    try:
        if commit:
            nxt, receipt = apply(pool, spec)
        else:
            receipt = quote(pool, spec)
    except InfeasibleTrade:
        if args.verify:
            cross_check(pool, spec, None)
        raise
    out = receipt.to_dict()
    if args.verify:
        out["oracle_growth"] = fmt(cross_check(pool, spec, receipt))
    if commit:
        write_atomic(args.pool, serialize_pool(nxt))
    print(json.dumps(out))
    return 0


def cmd_quote(args: argparse.Namespace) -> int:
    return _settle(args, commit=False)


def cmd_apply(args: argparse.Namespace) -> int:
    return _settle(args, commit=True)


def cmd_replay(args: argparse.Namespace) -> int:
    pool = load_pool(args.pool)
    try:
        with open(args.trades, newline="") as fh:
            trades = read_trades(fh)
    except OSError as exc:
        raise InputError(f"cannot read trade log {args.trades}: {exc.strerror}") from None
    worst = 0.0
    steps = 0
    for nxt, receipt, audit in replay(pool, trades, verify=args.verify):
        print(step_line(receipt, audit))
        worst = max(worst, abs(audit.self_financing_residual))
        steps += 1
        pool = nxt
    if args.save:
        write_atomic(args.save, serialize_pool(pool))
    summary = {
        "steps": steps,
        "final_step": pool.step,
        "pool_token_supply": fmt(pool.supply),
        "balances": {s: fmt(a) for s, a in zip(pool.symbols, pool.alpha)},
        "max_self_financing_residual": fmt(worst),
    }
    print(json.dumps({"summary": summary}))
    return 0


def cmd_curve(args: argparse.Namespace) -> int:
    req = CurveSweepRequest(SweepMode(args.sweep), tuple(args.k), args.range, tuple(args.n))
    rows = sweep(req)
    if args.output:
        with open(args.output, "w", newline="") as fh:
            write_csv(req, rows, fh)
    else:
        write_csv(req, rows, sys.stdout)
    if args.plot:
        from .plotting import plot_sweep

        plot_sweep(req, rows, args.plot)
    return 0


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        print(json.dumps({"error": "UsageError", "message": message, "exit_code": EXIT_MALFORMED}), file=sys.stderr)
        sys.exit(EXIT_MALFORMED)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="liquidity-curves",
        description="Settle trades on self-financing multi-asset liquidity curves.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init", help="create a pool document")
    p.add_argument("--pool", type=Path, required=True)
    p.add_argument("--tokens", required=True, help="comma-separated asset symbols")
    p.add_argument("--amounts", type=_floats, required=True)
    p.add_argument("--prices", type=_floats, required=True, help="genesis prices in pool tokens")
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--weights", type=_floats, help="constant weights (default: equal)")
    p.set_defaults(func=cmd_init)

    for name, func, help_ in (
        ("quote", cmd_quote, "price a trade without changing the pool"),
        ("apply", cmd_apply, "settle a trade and rewrite the pool document"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--pool", type=Path, required=True)
        p.add_argument(
            "--in", dest="legs", type=_leg, action="append", default=[], metavar="TOKEN:AMT",
            help=f"amount paid into the pool (negative to withdraw; {POOL_TOKEN} for the pool token)",
        )
        p.add_argument("--out", required=True, metavar="TOKEN", help="token whose amount is solved")
        p.add_argument("--kind", choices=[k.value for k in TradeKind])
        p.add_argument("--verify", action="store_true", help="cross-check against the bisection oracle")
        p.set_defaults(func=func)

    p = sub.add_parser("replay", help="replay a trade log with invariant audits")
    p.add_argument("--pool", type=Path, required=True)
    p.add_argument("--trades", type=Path, required=True)
    p.add_argument("--save", type=Path, help="write the final pool document here")
    p.add_argument("--verify", action="store_true")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("curve", help="tabulate swap or staking curves as CSV")
    p.add_argument("--sweep", choices=[m.value for m in SweepMode], required=True)
    p.add_argument("--k", type=_floats, required=True)
    p.add_argument("--range", type=_range, required=True, metavar="LO:HI:STEPS")
    p.add_argument("--n", type=_ints, default=[2], help="asset counts (staking curves)")
    p.add_argument("--output", type=Path, help="CSV path (default: stdout)")
    p.add_argument("--plot", type=Path, help="also render the curves to this image file")
    p.set_defaults(func=cmd_curve)
    return parser


def _fail(code: int, exc: Exception) -> int:
    print(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": code}), file=sys.stderr)
    return code


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        return _fail(EXIT_MALFORMED, exc)
    except InfeasibleTrade as exc:
        return _fail(EXIT_INFEASIBLE, exc)
    except (AuditFailure, LiquidityCurveError) as exc:
        return _fail(EXIT_AUDIT, exc)


if __name__ == "__main__":
    sys.exit(main())
