"""Exception types raised across the package."""


class BSKError(Exception):
    """Base class for all package errors."""


class DomainError(BSKError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class RegimeError(DomainError):
    """The operator parameters violate ``n > 2r``."""


class BudgetExceededError(BSKError):
    """The number of summation terms ``(n+1)**d`` exceeds the configured budget."""


class UnavailableDerivativeError(BSKError):
    """A requested partial derivative does not exist or cannot be formed."""


class EmptyCandidateError(BSKError):
    """No admissible smooth candidate was available for the K-functional."""


class ExpressionSyntaxError(BSKError, ValueError):
    """Malformed function expression.

    Attributes
    ----------
    position : int
        Zero-based character offset where parsing failed.
    """

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class ArityError(ExpressionSyntaxError):
    """The expression refers to a variable beyond the declared dimension."""
