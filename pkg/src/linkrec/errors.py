"""Exception types shared across the package."""


class LinkrecError(Exception):
    """Base class for all package errors."""


class InputError(LinkrecError, ValueError):
    """Malformed or out-of-range input."""


class FeasibilityError(InputError):
    """Parameters admit no valid construction (parity, capacity, integrality)."""


class DegenerateDenominatorError(LinkrecError, ArithmeticError):
    """A ratio's denominator is zero or negative."""


class ResourceError(LinkrecError):
    """Requested search is larger than the configured budget."""


class ConsistencyError(LinkrecError):
    """An internal invariant that should be guaranteed by theory was violated."""
