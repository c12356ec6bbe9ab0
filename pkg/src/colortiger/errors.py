"""Exception hierarchy for the package.

Errors fall into the three categories that the command line tool maps to
exit codes: usage (2), data (3), and numerical (4).
"""


class ColorTigerError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 1


class UsageError(ColorTigerError):
    """Invalid invocation or parameter values supplied by the caller."""

    exit_code = 2


class DataError(ColorTigerError):
    """Input files or datasets that cannot be used as given."""

    exit_code = 3


class NumericalError(ColorTigerError):
    """Structurally valid input that is mathematically degenerate."""

    exit_code = 4


class InvalidConfigError(UsageError):
    """Configuration value outside its documented range."""


class ParseError(DataError):
    """Malformed file content; message carries the offending location."""


class MissingImageError(DataError):
    """A manifest references an image file that does not exist."""


class InvalidGroundTruthError(DataError):
    """A manifest row carries an unusable ground-truth triplet."""


class ModelFormatError(DataError):
    """A model file fails format or method validation."""


class EmptyImageError(DataError):
    """An image with zero pixels."""


class AllPixelsInvalidError(DataError):
    """Preprocessing left no valid pixel to estimate from."""


class TooFewEntriesError(DataError):
    """Fewer dataset entries than requested folds."""


class ZeroVectorError(NumericalError):
    """A color vector with no positive channel where a direction is needed."""


class ZeroChannelError(NumericalError):
    """An illuminant with a zero channel cannot be used as a divisor."""


class NoValidPixelsError(NumericalError):
    """An image whose validity mask excludes every pixel."""


class EmptyInputError(NumericalError):
    """An empty sequence where at least one element is required."""


class DegenerateInputError(NumericalError):
    """Input with fewer distinct directions than requested clusters."""


class LengthMismatchError(NumericalError):
    """Two paired sequences of unequal length."""


class NegativeValueError(NumericalError):
    """A negative value where only non-negative magnitudes make sense."""
