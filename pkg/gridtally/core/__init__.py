"""
Core utilities and configuration
"""
from gridtally.core.config import settings
from gridtally.core.exceptions import (
    GridTallyException,
    InvalidInputException,
    ResourceLimitException,
    NonConvergenceException
)

__all__ = [
    "settings",
    "GridTallyException",
    "InvalidInputException",
    "ResourceLimitException",
    "NonConvergenceException"
]
