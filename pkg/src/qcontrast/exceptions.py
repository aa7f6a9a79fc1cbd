"""Exception types raised by qcontrast."""


class QContrastError(ValueError):
    """Base class for domain errors in this package."""


class UndefinedContrastError(QContrastError):
    """Raised when neither signal nor noise is present (mu = n = 0)."""


class NoFiniteOptimumError(QContrastError):
    """Raised when the contrast grows monotonically in mu and has no maximiser.

    The least upper bound of the contrast in this regime is carried on
    ``supremum``.
    """

    def __init__(self, message, supremum=2.0):
        super().__init__(message)
        self.supremum = supremum


class InvalidRegimeError(QContrastError):
    """Raised when the noise probability is not below the efficiency."""


class InfiniteContrastError(QContrastError):
    """Raised when a noiseless weight (p = 1) is converted to a contrast."""


class UnsupportedDimensionError(QContrastError):
    """Raised when a complete MUB set is requested for a non-prime dimension."""


class IncompleteMubSetError(QContrastError):
    """Raised when an operation needs all d + 1 bases but fewer are given."""


class DimensionMismatchError(QContrastError):
    """Raised when inputs disagree about the Hilbert-space dimension."""


class BracketError(QContrastError):
    """Raised when a root search cannot find a sign change."""


class MatrixFormatError(QContrastError):
    """Raised when a coincidence matrix file or array is malformed."""
