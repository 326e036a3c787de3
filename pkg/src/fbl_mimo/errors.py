"""Exception types raised by fbl_mimo."""


class DomainError(ValueError):
    """An argument lies outside the domain where a formula is defined."""


class ConvergenceError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance.

    The best available estimate and its error bound are kept on the
    exception so callers can decide whether it is good enough.
    """

    def __init__(self, message, estimate=float("nan"), abserr=float("nan")):
        super().__init__(message)
        self.estimate = estimate
        self.abserr = abserr


class ConsistencyError(ArithmeticError):
    """An internal invariant that should hold analytically was violated."""


class OutOfRegimeError(DomainError):
    """The finite-n slack has no real solution at the requested rate."""


class DecompositionError(RuntimeError):
    """Cholesky factorization failed (matrix not numerically positive definite)."""


class DiagnosticError(RuntimeError):
    """A Monte Carlo diagnostic cannot be formed for some trials."""

    def __init__(self, message, trials=()):
        super().__init__(message)
        self.trials = tuple(trials)


class SimulationError(RuntimeError):
    """A Monte Carlo trial failed; ``trial`` holds its index."""

    def __init__(self, message, trial):
        super().__init__(message)
        self.trial = trial
