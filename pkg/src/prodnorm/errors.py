"""Exception types shared across the library.

Every numerical failure mode gets its own class so callers can react to a
specific signal (retry with a scaled variant, fall back to quadrature, ...)
instead of parsing messages.
"""


class ProdnormError(Exception):
    """Base class for all library errors."""


class DomainError(ProdnormError, ValueError):
    """Input outside the documented domain of an operation."""


class OverflowSignal(ProdnormError, OverflowError):
    """Result not representable in double precision.

    For Bessel K this typically means the unscaled value under/overflows;
    the exponentially scaled variant is the remedy.
    """


class PrecisionLossError(ProdnormError, ArithmeticError):
    """A series or sum cancelled beyond the accuracy budget."""


class SingularityError(ProdnormError, ValueError):
    """Evaluation requested exactly at a non-removable singularity."""


class NonConvergenceError(ProdnormError, RuntimeError):
    """An iteration hit its cap before reaching the requested tolerance.

    ``best`` holds the last iterate and ``err_est`` the estimated error so
    callers can still inspect the partial result.
    """

    def __init__(self, message, best=None, err_est=None):
        super().__init__(message)
        self.best = best
        self.err_est = err_est


class QuadratureError(NonConvergenceError):
    """Adaptive quadrature could not meet the tolerance; carries the estimate."""
