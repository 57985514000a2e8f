"""Weibull-G exponential lifetime distribution: distribution functions,
maximum-likelihood fitting, competitor models and goodness-of-fit reporting."""

__version__ = "0.1.0"

from . import backend
from .core import WgedParams
from .errors import (
    ConvergenceError,
    DataError,
    DomainError,
    SingularMatrixError,
    WgedError,
)

__all__ = [
    "__version__",
    "backend",
    "WgedParams",
    "ConvergenceError",
    "DataError",
    "DomainError",
    "SingularMatrixError",
    "WgedError",
]
