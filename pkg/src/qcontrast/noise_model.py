"""Closed-form relations between pair rate, noise, efficiency and contrast.

Per detection window a source emits on average ``mu`` pairs per mode, every
detector registers a spurious click with probability ``n`` and each photon is
collected and detected with probability ``eta``. The quantum contrast ``Q`` is
the ratio of correlated to accidental coincidence probability; the isotropic
weight ``p`` is the equivalent admixture of a maximally entangled state with
white noise in dimension ``d``.
"""

import math
import warnings
from dataclasses import dataclass

from .exceptions import (
    InfiniteContrastError,
    InvalidRegimeError,
    NoFiniteOptimumError,
    UndefinedContrastError,
)
from .validation import check_contrast, check_dimension

#: Above this pair rate multi-pair emission is no longer a small correction.
MULTI_PHOTON_THRESHOLD = 0.1


class MultiPhotonRegimeWarning(UserWarning):
    """The pair rate is large enough that the single-pair picture degrades."""


@dataclass(frozen=True)
class NoiseParams:
    """Source, channel and detector parameters for one detection window.

    Parameters
    ----------
    mu : float
        Mean number of generated pairs per mode per window, ``mu >= 0``.
    n : float
        Probability of a noise click per detector per window, ``0 <= n < 1``.
    eta : float
        Collection and detection efficiency, ``0 < eta <= 1``.
    """

    mu: float
    n: float
    eta: float

    def __post_init__(self):
        for name in ("mu", "n", "eta"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not self.mu >= 0:
            raise ValueError(f"mu must be >= 0, got {self.mu}")
        if not 0 <= self.n < 1:
            raise ValueError(f"n must lie in [0, 1), got {self.n}")
        if not 0 < self.eta <= 1:
            raise ValueError(f"eta must lie in (0, 1], got {self.eta}")
        if self.multi_photon:
            warnings.warn(
                f"mu={self.mu} >= {MULTI_PHOTON_THRESHOLD}: multi-pair emission "
                "is significant; the contrast formula is still evaluated",
                MultiPhotonRegimeWarning, stacklevel=3)

    @property
    def multi_photon(self):
        """True when ``mu`` is outside the few-pair regime."""
        return self.mu >= MULTI_PHOTON_THRESHOLD

    @property
    def noise_ratio(self):
        return self.n / self.eta

    def coincidence_probabilities(self):
        """Return (matched-mode, mismatched-mode) coincidence probabilities."""
        accidental = (self.n + self.eta * self.mu) ** 2
        return self.eta ** 2 * self.mu * (1 + self.mu) + accidental, accidental


def _as_params(params, n=None, eta=None):
    if isinstance(params, NoiseParams):
        return params
    return NoiseParams(params, n, eta)


def quantum_contrast(params, n=None, eta=None):
    """Ratio of matched-mode coincidences to accidentals.

    Accepts either a :class:`NoiseParams` or the three scalars
    ``(mu, n, eta)``.

    Q = 1 + mu (1 + mu) / (n / eta + mu)**2

    Raises
    ------
    UndefinedContrastError
        If ``mu == 0`` and ``n == 0``.
    """
    p = _as_params(params, n, eta)
    if p.mu == 0 and p.n == 0:
        raise UndefinedContrastError("contrast is undefined without signal or noise")
    return 1.0 + p.mu * (1.0 + p.mu) / (p.n / p.eta + p.mu) ** 2


def optimal_pair_rate(n, eta):
    """Pair rate ``n / (eta - 2 n)`` that maximises the contrast.

    Raises
    ------
    NoFiniteOptimumError
        If ``eta <= 2 n``; the contrast then increases monotonically in ``mu``
        toward its supremum 2, which is attached to the exception.
    """
    n, eta = float(n), float(eta)
    if not n > 0:
        raise ValueError(f"n must be > 0, got {n}")
    if eta <= 2 * n:
        raise NoFiniteOptimumError(
            f"eta={eta} <= 2n={2 * n}: contrast has no finite maximiser", supremum=2.0)
    return n / (eta - 2 * n)


def max_contrast(n, eta):
    """Largest contrast reachable by tuning the pair rate: 1 + eta^2 / (4 n (eta - n))."""
    n, eta = float(n), float(eta)
    if not n > 0:
        raise ValueError(f"n must be > 0, got {n}")
    if n >= eta:
        raise InvalidRegimeError(f"n={n} must be smaller than eta={eta}")
    return 1.0 + eta ** 2 / (4 * n * (eta - n))


def isotropic_weight(d, q):
    """Isotropic-state weight equivalent to contrast ``q`` in dimension ``d``."""
    d = check_dimension(d)
    q = check_contrast(q)
    if math.isinf(q):
        return 1.0
    return (q - 1) / (q - 1 + d)


def contrast_from_weight(d, p):
    """Inverse of :func:`isotropic_weight`: ``1 + p d / (1 - p)``."""
    d = check_dimension(d)
    p = float(p)
    if p == 1:
        raise InfiniteContrastError("p = 1 corresponds to infinite contrast")
    if not 0 <= p < 1:
        raise ValueError(f"p must lie in [0, 1), got {p}")
    return 1.0 + p * d / (1 - p)
