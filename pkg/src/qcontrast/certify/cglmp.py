"""CGLMP Bell functional evaluated through the coincidence-matrix simulator."""

from functools import lru_cache
from typing import NamedTuple

import numpy as np

from ..coincidence import joint_probability
from ..noise_model import isotropic_weight
from ..states import flat_spectrum
from ..validation import check_contrast, check_dimension

LOCAL_BOUND = 2.0

# phase offsets of the two signal and two idler settings
SIGNAL_OFFSETS = (0.0, 0.5)
IDLER_OFFSETS = (0.25, -0.25)


def cglmp_bases(d):
    """Measurement settings as ``(A1, A2, B1, B2)`` in the convention of
    :func:`~qcontrast.coincidence.joint_probability`.

    ``A_a[k, j] = exp(2 pi i j (k + alpha_a) / d) / sqrt(d)`` and
    ``B_b[l, j] = exp(2 pi i j (l - beta_b) / d) / sqrt(d)``, so that on the
    maximally entangled state ``P(A_a = k, B_b = l)`` depends only on
    ``k - l + alpha_a + beta_b``.
    """
    d = check_dimension(d)
    j = np.arange(d)
    k = j[:, None]
    alice = [np.exp(2j * np.pi * j * (k + a) / d) / np.sqrt(d) for a in SIGNAL_OFFSETS]
    bob = [np.exp(2j * np.pi * j * (k - b) / d) / np.sqrt(d) for b in IDLER_OFFSETS]
    return (*alice, *bob)


def _p_shift(matrix, shift):
    """``P(A = B + shift mod d)`` for a joint matrix with A on rows."""
    d = matrix.shape[0]
    rows = (np.arange(d) + shift) % d
    return matrix[rows, np.arange(d)].sum()


def cglmp_functional(p11, p12, p21, p22):
    """CGLMP value from the joint matrices ``p_ab[k, l] = P(A_a = k, B_b = l)``."""
    d = p11.shape[0]
    # P(B = A + s) is P(A = B - s)
    total = 0.0
    for k in range(d // 2):
        weight = 1 - 2 * k / (d - 1)
        plus = (_p_shift(p11, k) + _p_shift(p21, -(k + 1))
                + _p_shift(p22, k) + _p_shift(p12, -k))
        minus = (_p_shift(p11, -(k + 1)) + _p_shift(p21, k)
                 + _p_shift(p22, -(k + 1)) + _p_shift(p12, k + 1))
        total += weight * (plus - minus)
    return float(total)


def cglmp_probabilities(spectrum):
    """Joint matrices ``p11, p12, p21, p22`` for the canonical settings."""
    a1, a2, b1, b2 = cglmp_bases(spectrum.d)
    return tuple(joint_probability(spectrum, a, b).entries
                 for a in (a1, a2) for b in (b1, b2))


@lru_cache(maxsize=None)
def cglmp_quantum_value(d):
    """CGLMP value of the maximally entangled state in dimension ``d``."""
    d = check_dimension(d)
    return cglmp_functional(*cglmp_probabilities(flat_spectrum(d)))


def cglmp_noisy(q, d):
    """CGLMP value attainable at contrast ``q``: the isotropic weight times the noiseless value."""
    q = check_contrast(q)
    return isotropic_weight(d, q) * cglmp_quantum_value(d)


class DimensionBound(NamedTuple):
    """Largest violating dimension found by a scan.

    ``status`` is ``"bounded"``, ``"no_violation"`` (``d_max = 0``) or
    ``"unbounded_within_scan"`` (every scanned ``d`` violates).
    """

    d_max: int
    status: str


def cglmp_dimension_bound(q, d_limit=256):
    """Scan ``d = 2, 3, ...`` for the largest dimension with ``cglmp_noisy(q, d) > 2``."""
    q = check_contrast(q)
    if q <= 1:
        return DimensionBound(0, "no_violation")
    d_max = 0
    for d in range(2, d_limit + 1):
        if cglmp_noisy(q, d) > LOCAL_BOUND:
            d_max = d
        else:
            return DimensionBound(d_max, "bounded" if d_max else "no_violation")
    return DimensionBound(d_max, "unbounded_within_scan")
