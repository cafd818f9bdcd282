"""Multi-asset AMM liquidity curves derived from self-financing rebalancing."""

from .curve import CurveResidualSpec, curve_residual, ek_average, eval_g0, solve_unknown_growth
from .errors import *  # noqa: F401,F403
from .model import (
    POOL_TOKEN,
    UNKNOWN,
    CurveParams,
    GrowthVector,
    PoolState,
    TradeReceipt,
    implied_weights,
    parse_pool,
    pool_init,
    serialize_pool,
)
from .oracle import BracketingInterval, auto_bracket, bisect_growth
from .rebalancing import PolicyKind, WeightPolicy, WeightVector, implied_price, weights_at
from .settlement import TradeKind, TradeSpec, apply, batch_settle, quote, verify_self_financing

__version__ = "0.1.0"
