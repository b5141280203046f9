"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Raised when a matrix or vector has an empty or mismatched shape."""


class CovarianceError(ValueError):
    """Raised when a covariance matrix is not symmetric positive semidefinite."""


class MembershipError(ValueError):
    """Raised when a vector violates the sparsity ball it is required to live in."""


class ParameterError(ValueError):
    """Raised when a scalar parameter lies outside its admissible range."""


class EnumerationBudgetError(ValueError):
    """Raised when an exact support enumeration would exceed its combinatorial budget."""


class ConsistencyError(RuntimeError):
    """Raised when an internally certified quantity fails its own certificate."""
