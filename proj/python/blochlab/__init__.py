"""Bloch space numerics: variance and spectrum estimators, Bergman and
Beurling transforms, n-adic martingales and a certified variance bound."""

from ._core import *  # noqa: F401,F403
from ._core import (
    ConvergenceError,
    DomainError,
    EvaluationError,
    InconclusiveError,
    ParseError,
)

__version__ = "0.1.0"
