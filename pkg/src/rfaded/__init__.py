"""Crank-Nicolson solver for Riesz space-fractional advection-dispersion
equations with a constant delay, plus a Mittag-Leffler series oracle.

The numerical scheme couples FBDF2 weights (order alpha in (0,1)) with
WSGD weights (order beta in (1,2]) for the two Riesz terms and treats the
delayed Caputo term explicitly from the history function.
"""

from rfaded.errors import (
    ConvergenceError,
    DomainError,
    PoleError,
    SingularMatrixError,
    SolverError,
)

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "DomainError",
    "PoleError",
    "SingularMatrixError",
    "SolverError",
    "__version__",
]
