"""Exception types raised by the library and mapped to CLI exit codes."""


class ProlateError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(ProlateError, ValueError):
    """A point or value lies outside the domain of the requested map."""


class ParameterError(ProlateError, ValueError):
    """A numeric parameter is outside its admissible range."""


class ConfigurationError(ProlateError, ValueError):
    """Objects that must agree (group, band, basis) do not."""


class ValidationError(ProlateError, ValueError):
    """Input data violates a structural requirement (e.g. Hermitian symmetry)."""


class ResolutionError(ProlateError, ValueError):
    """A frequency grid is too coarse for the requested operator size."""


class HypothesisError(ProlateError, ValueError):
    """The hypothesis of a limit theorem is violated by the inputs."""


class DimensionError(ProlateError, ValueError):
    pass


class NumericError(ProlateError, ArithmeticError):
    """A numerical routine failed or produced a value outside tolerance."""


class RankError(NumericError):
    """The retained eigenvalue block of a truncated solve is singular."""


class ParseError(ProlateError, ValueError):
    """A persisted file is malformed.

    Parameters
    ----------
    message : str
    offset : int or None
        Byte offset in the file at which parsing failed, if known.
    """

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset
