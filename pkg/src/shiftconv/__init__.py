"""Numerical companion for shifted convolution sums and twisted central L-values at d = 1."""

from .errors import (
    ConfigError,
    ConvergenceError,
    CoverageError,
    DomainError,
    PoleError,
    ResourceError,
    ShiftconvError,
    UnsupportedModulusError,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ConvergenceError",
    "CoverageError",
    "DomainError",
    "PoleError",
    "ResourceError",
    "ShiftconvError",
    "UnsupportedModulusError",
]
