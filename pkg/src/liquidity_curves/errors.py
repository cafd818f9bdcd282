"""Exception hierarchy for pool math and settlement."""


class LiquidityCurveError(Exception):
    """Base class for every error raised by this package."""


class InputError(LiquidityCurveError, ValueError):
    """Malformed or out-of-domain input."""


class NonPositiveInput(InputError):
    pass


class KOutOfRange(InputError):
    pass


class PolicyViolation(InputError):
    pass


class LengthMismatch(InputError):
    pass


class ShapeMismatch(InputError):
    pass


class SignViolation(InputError):
    pass


class NonPositiveGrowth(InputError):
    pass


class MultipleUnknowns(InputError):
    pass


class NoUnknown(InputError):
    pass


class MalformedDocument(InputError):
    pass


class InvariantViolation(InputError):
    """A parsed or constructed state breaks a pool invariant."""


class UnknownToken(InputError):
    pass


class InvalidTrade(InputError):
    """Trade legs inconsistent with the requested trade kind."""


class InfeasibleTrade(LiquidityCurveError):
    """The liquidity curve admits no positive growth for the requested trade."""


class NoPositiveRoot(InfeasibleTrade):
    pass


class InsufficientBalance(InfeasibleTrade):
    """A fixed leg would remove a pool's entire balance or more."""


class KRestriction(InfeasibleTrade):
    """At k=1 no trade may remove half or more of an asset balance."""


class NoSignChange(LiquidityCurveError):
    pass


class MaxIterations(LiquidityCurveError):
    pass


class AuditFailure(LiquidityCurveError):
    """A settled transition failed an invariant audit."""
