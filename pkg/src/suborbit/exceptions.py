"""Exception hierarchy shared by every module of the package."""


class SuborbitError(Exception):
    """Base class for all errors raised by :mod:`suborbit`."""


class InvalidInputError(SuborbitError, ValueError):
    """An argument is malformed (non-finite coefficient, bad exponent, ...)."""


class InvalidIndexError(InvalidInputError, IndexError):
    """A basis index below 1 or outside a schedule's range was requested."""


class UnboundedOperatorError(SuborbitError):
    """A shift operator does not extend to a bounded operator on the space.

    ``operator`` names the failing shift (``"L"`` or ``"R"``).
    """

    def __init__(self, operator, message):
        super().__init__(message)
        self.operator = operator


class UnsupportedWeightError(SuborbitError):
    """A weight kind has no closed form for the requested series."""


class ContractionError(InvalidInputError):
    """The backward operator would not be a contraction (lambda too small)."""


class DecayTooSlowError(InvalidInputError):
    """Coordinate decay rate does not dominate ``log(lambda)``."""


class GrowthConditionError(InvalidInputError):
    """Tail decay rate ``mu`` does not dominate ``lambda * ||T_{-1}||``."""


class MaterializationOverflowError(SuborbitError, OverflowError):
    """Dense materialization would overflow double precision."""


class NoCertificateError(SuborbitError):
    """A measured tail does not decay, so no certificate can be issued."""


class GridMismatchError(InvalidInputError):
    """A translation step is not an integer number of grid cells."""


class PreconditionError(InvalidInputError):
    """A documented precondition of a formula is violated."""


class ConfigError(SuborbitError):
    """A run configuration is invalid or references missing files."""
