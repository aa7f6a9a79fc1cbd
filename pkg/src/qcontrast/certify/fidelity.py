"""Fidelity witnesses and Schmidt-number certification.

Boundaries are strict: a fidelity exactly equal to ``(k - 1) / d`` or a
contrast exactly equal to a threshold does not certify the next level. To
keep that promise under floating point, values within ``BOUNDARY_RTOL`` of an
integer boundary are treated as sitting on it.
"""

import math
from dataclasses import dataclass

from ..coincidence import ExperimentRecord
from ..exceptions import IncompleteMubSetError
from ..validation import check_contrast, check_dimension

BOUNDARY_RTOL = 1e-10


def _largest_int_below(x):
    """Largest integer strictly below ``x`` with a conservative tolerance."""
    tol = BOUNDARY_RTOL * max(1.0, abs(x))
    return math.ceil(x - tol) - 1


def fidelity_bound_two_mub(q, d):
    """Lower bound ``(q - d + 1) / (q + d - 1)`` from two MUBs.

    Not clamped: a negative value means the bound carries no information.
    """
    q, d = check_contrast(q), check_dimension(d)
    if math.isinf(q):
        return 1.0
    return (q - d + 1) / (q + d - 1)


def required_contrast_two_mub(k, d):
    """Contrast that must be exceeded to certify dimensionality ``k`` with two MUBs."""
    d = check_dimension(d)
    k = check_dimension(k, minimum=1, name="k")
    if k > d:
        raise ValueError(f"k={k} cannot exceed d={d}")
    return (d - 1) * (d + k - 1) / (d - k + 1)


def k_max_two_mub(q, d):
    """Largest ``k <= d`` whose two-MUB threshold is strictly exceeded by ``q``."""
    q, d = check_contrast(q), check_dimension(d)
    if math.isinf(q):
        return d
    x = (q * (d + 1) - (d - 1) ** 2) / (q + d - 1)
    k = min(max(_largest_int_below(x), 1), d)
    # the closed form can be off by one right at a boundary
    while k < d and q > required_contrast_two_mub(k + 1, d):
        k += 1
    while k > 1 and not q > required_contrast_two_mub(k, d):
        k -= 1
    return k


@dataclass(frozen=True)
class OptimalOperatingPoint:
    """Dimension that minimises the two-MUB contrast needed for ``k``."""

    k: int
    d_opt: int
    q_opt: float


def continuous_optimal_dimension(k):
    return math.sqrt(2) * math.sqrt(k * k - 3 * k + 2) + k - 1


def closed_form_optimal_contrast(k):
    return 3 * k + 2 * math.sqrt(2) * math.sqrt((k - 2) * (k - 1)) - 4


def optimal_operating_point(k):
    """Integer dimension minimising :func:`required_contrast_two_mub` for fixed ``k``.

    The continuous optimum is ``sqrt(2 (k - 1)(k - 2)) + k - 1``; the two
    neighbouring integers (never below ``k``) are compared directly.
    """
    k = check_dimension(k, name="k")
    d_star = continuous_optimal_dimension(k)
    candidates = {max(k, math.floor(d_star)), max(k, math.ceil(d_star))}
    d_opt = min(sorted(candidates), key=lambda d: required_contrast_two_mub(k, d))
    return OptimalOperatingPoint(k, d_opt, required_contrast_two_mub(k, d_opt))


def fidelity_all_mub_from_contrast(q, d):
    """Fidelity ``(q + 1/d - 1) / (q + d - 1)`` of the isotropic state with contrast ``q``."""
    q, d = check_contrast(q), check_dimension(d)
    if math.isinf(q):
        return 1.0
    return (q + 1 / d - 1) / (q + d - 1)


def fidelity_exact_from_data(record):
    """Fidelity to the maximally entangled state from all ``d + 1`` MUBs.

    ``F = (S - 1) / d`` where ``S`` is the total probability of correlated
    outcomes summed over the bases. Count matrices are normalised per basis.
    """
    if not isinstance(record, ExperimentRecord):
        raise TypeError("expected an ExperimentRecord")
    if not record.complete:
        raise IncompleteMubSetError(
            f"exact fidelity needs matched matrices for all {record.d + 1} MUBs")
    d = record.d
    s = sum(record.matrix_for(b).probabilities().trace() for b in range(d + 1))
    return float((s - 1) / d)


def schmidt_number_from_fidelity(fidelity, d):
    """Largest ``k`` with ``fidelity > (k - 1) / d``, clipped to ``[1, d]``."""
    d = check_dimension(d)
    fidelity = float(fidelity)
    if not -1 <= fidelity <= 1 + 1e-9:
        raise ValueError(f"fidelity must lie in [-1, 1], got {fidelity}")
    k = _largest_int_below(fidelity * d) + 1
    return min(max(k, 1), d)


def k_max_all_mub(q, d):
    """Dimensionality certified by all MUBs: largest integer below ``(d + 1) q / (d + q - 1)``."""
    q, d = check_contrast(q), check_dimension(d)
    if math.isinf(q):
        return d
    return min(max(_largest_int_below((d + 1) * q / (d + q - 1)), 1), d)


def required_contrast_all_mub(k, d):
    """Contrast that must be exceeded to certify ``k`` with all MUBs: ``k (d - 1) / (d + 1 - k)``."""
    d = check_dimension(d)
    k = check_dimension(k, minimum=1, name="k")
    if k > d:
        raise ValueError(f"k={k} cannot exceed d={d}")
    return k * (d - 1) / (d + 1 - k)
