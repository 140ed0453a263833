"""Exceptions raised by kacward routes."""


class KacWardError(Exception):
    """Base class for every kacward error."""


class IntractableSizeError(KacWardError, ValueError):
    """An enumeration or brute-force sweep exceeds its configured budget."""

    def __init__(self, what: str, size: int, limit: int):
        self.what = what
        self.size = size
        self.limit = limit
        super().__init__(f"intractable size: {what} = {size} exceeds limit {limit}")


class PathValidationError(KacWardError, ValueError):
    """A path word is not closed, not chained, or backtracks."""


class QuadratureResolutionError(KacWardError, ValueError):
    """The quadrature grid is too coarse for the requested exactness."""


class SingularityError(KacWardError, ArithmeticError):
    """A quantity is evaluated exactly at a singular point."""


class DivergenceError(KacWardError, ArithmeticError):
    """A series or integral is evaluated outside its convergence domain."""


class ConsistencyError(KacWardError, AssertionError):
    """An internal invariant that must hold by construction was violated."""
