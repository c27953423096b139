"""Shared exception types."""


class CapacityError(Exception):
    """A requested computation exceeds a hard size precondition.

    Raised before any expensive work starts, so the caller can retry with a
    smaller set or a different route.
    """


class BudgetExceededError(Exception):
    """Adaptive quadrature hit max_subdivisions before reaching tolerance."""

    def __init__(self, message: str, value: float, error_estimate: float):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate


class VarianceMismatchError(ValueError):
    """A Gaussian model's variance does not match the spectrum it is compared to."""
