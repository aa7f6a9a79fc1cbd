"""Input validation helpers shared by the functional API and the estimators."""

import numbers

import numpy as np

from .exceptions import DimensionMismatchError, MatrixFormatError

PROBABILITY_ATOL = 1e-9


def is_prime(n):
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def check_dimension(d, minimum=2, name="d"):
    """Return ``d`` as an int, raising if it is not an integer >= ``minimum``."""
    if isinstance(d, bool) or not isinstance(d, numbers.Integral):
        if isinstance(d, numbers.Real) and float(d).is_integer():
            d = int(d)
        else:
            raise TypeError(f"{name} must be an integer, got {d!r}")
    d = int(d)
    if d < minimum:
        raise ValueError(f"{name} must be >= {minimum}, got {d}")
    return d


def check_contrast(q, name="q"):
    q = float(q)
    if np.isnan(q) or q < 1.0:
        raise ValueError(f"{name} must be >= 1, got {q}")
    return q


def check_square_matrix(matrix, d=None, name="matrix"):
    """Validate a real, finite, nonnegative d x d array and return it as float64.

    Negative entries are reported with their row and column.
    """
    arr = np.asarray(matrix, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise MatrixFormatError(f"{name} must be square, got shape {arr.shape}")
    if d is not None and arr.shape[0] != d:
        raise DimensionMismatchError(
            f"{name} has dimension {arr.shape[0]}, expected {d}")
    if not np.all(np.isfinite(arr)):
        raise MatrixFormatError(f"{name} contains non-finite entries")
    neg = np.argwhere(arr < 0)
    if neg.size:
        r, c = neg[0]
        raise MatrixFormatError(
            f"{name} has a negative entry {arr[r, c]!r} at row {r}, column {c}")
    return arr


def check_probability_matrix(matrix, d=None, atol=PROBABILITY_ATOL, name="matrix"):
    arr = check_square_matrix(matrix, d=d, name=name)
    total = arr.sum()
    if abs(total - 1.0) > atol:
        raise MatrixFormatError(f"{name} sums to {total!r}, not 1 (atol={atol})")
    return arr


def check_coincidence_stack(X):
    """Coerce ``X`` to a 4-D array of shape (n_records, n_mubs, d, d).

    A single matrix (2-D) or a single record (3-D) is promoted. The second
    return value is the number of dimensions that were added, so callers can
    undo the promotion on output.
    """
    arr = np.asarray(X, dtype=float)
    if arr.ndim < 2 or arr.ndim > 4:
        raise MatrixFormatError(
            f"expected 2-D, 3-D or 4-D coincidence data, got ndim={arr.ndim}")
    added = 4 - arr.ndim
    arr = arr.reshape((1,) * added + arr.shape)
    if arr.shape[-1] != arr.shape[-2]:
        raise MatrixFormatError(f"matrices must be square, got {arr.shape[-2:]}")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise MatrixFormatError("coincidence data must be finite and nonnegative")
    return arr, added


def check_random_state(seed):
    """Turn ``seed`` into a ``numpy.random.Generator``."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)
