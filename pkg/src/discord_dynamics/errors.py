"""Exception types raised across the package."""


class ValidationError(ValueError):
    """Input outside an operation's domain."""


class ShapeError(ValidationError):
    """Matrix does not have the required sparsity pattern."""

    def __init__(self, message, offending=None):
        super().__init__(message)
        # (row, col, value) of the largest entry outside the pattern
        self.offending = offending


class DegeneracyError(ValueError):
    """Requested eigenvector is not unique."""


class ConsistencyError(RuntimeError):
    """Numeric result disagrees with a closed form it must reproduce."""


class InvariantViolation(RuntimeError):
    """A physical invariant (trace, positivity, spectrum) was violated."""


class FallbackRequired(RuntimeError):
    """Spectral evolution is unreliable; use matrix exponentials or RK4."""
