"""Exception types shared across the package."""

__all__ = [
    "PickandsError",
    "ParameterError",
    "EmbeddingError",
    "NumericalError",
    "PreconditionError",
]


class PickandsError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(PickandsError, ValueError):
    """An argument or configuration value is outside its domain."""


class EmbeddingError(PickandsError, RuntimeError):
    """The circulant embedding produced an eigenvalue below tolerance."""


class NumericalError(PickandsError, RuntimeError):
    """A numerical routine failed (e.g. a covariance matrix is not PSD)."""


class PreconditionError(PickandsError, RuntimeError):
    """A mathematical precondition of an error-bound term does not hold.

    ``term`` names the offending bound term so callers can report which
    part of the calculus broke down.
    """

    def __init__(self, message: str, term: str = ""):
        super().__init__(message)
        self.term = term
