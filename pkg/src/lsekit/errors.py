"""Exception hierarchy shared by all lsekit modules."""


class LSEError(Exception):
    """Base class for every error raised by lsekit."""


class ShapeError(LSEError, ValueError):
    """Operand dimensions do not agree."""


class ConfigError(LSEError, ValueError):
    """A configuration value is outside its admissible range."""


class EmptyInputError(LSEError, ValueError):
    """An operation that needs at least one sample received none."""


class DataError(LSEError, ValueError):
    """Malformed input data (non-finite values, unparsable rows)."""

    def __init__(self, message, row=None):
        super().__init__(message if row is None else f"row {row}: {message}")
        self.row = row


class NumericalError(LSEError, ArithmeticError):
    """A numerical routine failed to produce a trustworthy result."""


class SingularMatrixError(NumericalError):
    """A matrix that must be inverted is numerically singular."""


class SingularUpdateError(SingularMatrixError):
    """A rank-one update denominator fell below its floor."""


class DegeneracyError(NumericalError):
    """The recursive gain matrix lost positive definiteness."""
