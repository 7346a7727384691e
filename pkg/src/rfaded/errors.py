"""Exception hierarchy shared by all modules."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class PoleError(DomainError):
    """Evaluation hit a pole (Gamma at a nonpositive integer, c_zeta at 1)."""


class ConvergenceError(RuntimeError):
    """A truncated series could not reach the requested tolerance."""


class SingularMatrixError(RuntimeError):
    """A direct factorization broke down (zero or non-finite pivot)."""


class SolverError(RuntimeError):
    """Failure while marching in time; carries the offending time index."""

    def __init__(self, message, step=None):
        super().__init__(message if step is None else f"step {step}: {message}")
        self.step = step
