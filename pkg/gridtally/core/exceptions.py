"""
Custom Exceptions
Single Responsibility: Define toolkit-specific exceptions
"""
from typing import Optional


class GridTallyException(Exception):
    """Base exception for grid counting operations."""
    exit_code = 1


class InvalidInputException(GridTallyException):
    """Raised when a pattern, dimension or option is invalid."""
    exit_code = 1


class ResourceLimitException(GridTallyException):
    """Raised when a computation would exceed a configured ceiling."""
    exit_code = 2

    def __init__(self, what: str, estimate_mb: Optional[float] = None, ceiling_mb: Optional[float] = None):
        self.what = what
        self.estimate_mb = estimate_mb
        self.ceiling_mb = ceiling_mb
        if estimate_mb is None:
            super().__init__(f"Resource ceiling exceeded: {what}")
        else:
            super().__init__(
                f"Resource ceiling exceeded: {what} "
                f"(estimated {estimate_mb:.1f} MB, ceiling {ceiling_mb} MB)"
            )


class NonConvergenceException(GridTallyException):
    """Raised when power iteration does not reach the requested tolerance."""
    exit_code = 3

    def __init__(self, estimate: float, residual: float, iterations: int):
        self.estimate = estimate
        self.residual = residual
        self.iterations = iterations
        super().__init__(
            f"No convergence after {iterations} iterations "
            f"(best estimate {estimate:.10g}, residual {residual:.3g})"
        )
