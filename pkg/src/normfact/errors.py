"""Exceptions raised by the factorization routines."""


class NormFactError(Exception):
    """Base class for every error raised by this package."""


class NormingOfZero(NormFactError, ValueError):
    """The norming functional was requested for the zero vector."""


class ZeroMatrix(NormFactError, ValueError):
    pass


class DimensionMismatch(NormFactError, ValueError):
    pass


class TooLarge(NormFactError, ValueError):
    """Sign enumeration would exceed the configured cap."""


class NoExactSolver(NormFactError, ValueError):
    """No certified solver exists for the requested (r, p) pair."""


class NoConvergence(NormFactError, RuntimeError):
    """An iteration hit its budget. The last iterate is kept on ``step``."""

    def __init__(self, message, step=None, trace=None):
        super().__init__(message)
        self.step = step
        self.trace = trace


class NotSymmetric(NormFactError, ValueError):
    pass


class NotTranspositionInvariant(NormFactError, ValueError):
    pass


class NotPSD(NormFactError, ValueError):
    pass


class InvalidDissimilarity(NormFactError, ValueError):
    pass


class MetricNotPD(NormFactError, ValueError):
    pass


class ParseError(NormFactError, ValueError):
    pass
