"""Exception taxonomy shared across the package.

Everything raised deliberately by this package derives from :class:`XihdError`,
so callers (including the CLI) can catch one type to distinguish "the input
violated a documented contract" from genuine bugs or I/O failures.
"""


class XihdError(Exception):
    """Base class for all errors raised by this package."""


class BadShape(XihdError):
    """An array argument has the wrong dimensionality or an invalid shape."""


class LengthMismatch(XihdError):
    """Two paired sample vectors have different lengths."""


class NonFiniteValue(XihdError):
    """Input data contains NaN or +/-inf where finite values are required."""


class TiesPresent(XihdError):
    """A column contains tied values and no tie-breaking policy was enabled.

    Carries the offending column label (or index) in ``column`` when known.
    """

    def __init__(self, message: str, column=None):
        super().__init__(message)
        self.column = column


class DomainError(XihdError):
    """A parameter lies outside the valid domain (e.g. alpha not in (0,1))."""


class DomainTooSmall(DomainError):
    """Sample size or dimension below the documented floor for the operation."""


class TooLarge(XihdError):
    """The request exceeds a hard feasibility bound (e.g. full enumeration for n > 8)."""


class NotPositiveDefinite(XihdError):
    """A covariance matrix is not (numerically) positive definite."""


class CsvFormatError(XihdError):
    """The input file could not be parsed as a rectangular numeric CSV table."""
