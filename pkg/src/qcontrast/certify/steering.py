"""Entropic EPR-steering criterion in two mutually unbiased bases."""

import math
from typing import NamedTuple

import numpy as np
from scipy.optimize import bisect

from ..coincidence import CoincidenceMatrix
from ..exceptions import BracketError, DimensionMismatchError
from ..validation import check_contrast, check_dimension, check_square_matrix

THRESHOLD_XTOL = 1e-6


def _probabilities(matrix):
    if isinstance(matrix, CoincidenceMatrix):
        return matrix.probabilities()
    arr = check_square_matrix(matrix)
    return arr / arr.sum()


def _entropy_bits(p):
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def conditional_entropy(matrix):
    """``H(X|Y) = H(X, Y) - H(Y)`` in bits; X is the signal (row), Y the idler (column)."""
    p = _probabilities(matrix)
    return _entropy_bits(p.reshape(-1)) - _entropy_bits(p.sum(axis=0))


def steering_functional(q, d):
    """Half the entropy sum minus ``log2(d) / 2`` for an isotropic state of contrast ``q``.

    Negative values mean the steering inequality is violated.
    """
    q, d = check_contrast(q), check_dimension(d)
    if math.isinf(q):
        return -0.5 * math.log2(d)
    return math.log2(q + d - 1) - q / (q + d - 1) * math.log2(q) - 0.5 * math.log2(d)


def steering_threshold(d, q_max=1e6):
    """Contrast at which :func:`steering_functional` changes sign.

    A geometric pre-scan on ``(1, q_max]`` locates the sign change, then
    bisection refines it to ``THRESHOLD_XTOL``.
    """
    d = check_dimension(d)
    grid = np.geomspace(1 + 1e-9, q_max, 200)
    values = np.array([steering_functional(q, d) for q in grid])
    flips = np.nonzero(np.diff(np.sign(values)))[0]
    if flips.size == 0:
        raise BracketError(f"no sign change of the steering functional below q={q_max}")
    if flips.size > 1:
        raise BracketError(f"steering functional changes sign {flips.size} times")
    i = flips[0]
    return float(bisect(steering_functional, grid[i], grid[i + 1], args=(d,),
                        xtol=THRESHOLD_XTOL))


class SteeringVerdict(NamedTuple):
    violated: bool
    margin: float
    entropy_sum: float


def steering_test_from_data(matrix_basis1, matrix_basis2, d=None):
    """Test ``H1(X|Y) + H2(X|Y) >= log2 d`` on two measured bases.

    ``margin = log2 d - (H1 + H2)``; positive margin means steering.
    """
    p1, p2 = _probabilities(matrix_basis1), _probabilities(matrix_basis2)
    if p1.shape != p2.shape:
        raise DimensionMismatchError(f"matrix shapes differ: {p1.shape} vs {p2.shape}")
    if d is None:
        d = p1.shape[0]
    elif p1.shape[0] != d:
        raise DimensionMismatchError(f"matrices have d={p1.shape[0]}, expected {d}")
    h = conditional_entropy(p1) + conditional_entropy(p2)
    margin = math.log2(d) - h
    return SteeringVerdict(bool(margin > 0), margin, h)
