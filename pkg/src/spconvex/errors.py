"""Exception taxonomy shared by all spconvex modules."""


class SpconvexError(Exception):
    """Base class for all spconvex errors."""


class DimensionError(SpconvexError, ValueError):
    """Input matrix is not square or operand shapes do not match."""


class DomainError(SpconvexError, ValueError):
    """A scalar function or kernel was evaluated outside its domain."""


class ParameterError(SpconvexError, ValueError):
    """A numeric parameter (p, alpha, theta, ...) is out of range."""


class PreconditionError(SpconvexError, ValueError):
    """A documented operation precondition does not hold (e.g. singular A)."""


class ConvergenceError(SpconvexError, RuntimeError):
    """An iterative solver exhausted its iteration budget."""


class NumericalError(SpconvexError, RuntimeError):
    """A computed quantity failed an internal consistency assertion."""
