"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class CJTError(Exception):
    exit_code = 1


class ValidationError(CJTError, ValueError):
    """Malformed input: bad lattice, bad config, bad parameters."""

    exit_code = 2


class ConvergenceError(CJTError, RuntimeError):
    exit_code = 3

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class DomainError(CJTError, ValueError):
    """Request outside the regime where the requested quantity is defined."""

    exit_code = 4


class UnstableBosonSector(DomainError):
    """Some boson mode energy is not strictly positive."""


class UnstableSpectrumError(DomainError):
    """Fluctuation matrix has a significantly negative eigenvalue."""


class BudgetError(CJTError, MemoryError):
    exit_code = 5
