"""Exception hierarchy shared across the package."""


class QhypoError(Exception):
    """Base class for all package errors."""


class ValidationError(QhypoError, ValueError):
    """Input violates a documented precondition (bad dimensions, norms, flags)."""


class NumericalError(QhypoError, RuntimeError):
    """A numerical routine failed (integration, eigensolver, noisy estimate)."""


class IntegrationError(NumericalError):
    pass


class EigenSolverError(NumericalError):
    pass
