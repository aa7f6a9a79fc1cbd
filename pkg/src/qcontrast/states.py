"""Schmidt spectra of the two-photon state and SPDC pair-number statistics."""

import json
from dataclasses import dataclass

import numpy as np

from .validation import check_dimension

NORM_ATOL = 1e-12


@dataclass(frozen=True, eq=False)
class SchmidtSpectrum:
    """Nonnegative, unit-norm Schmidt amplitudes ``c_j`` over ``d`` modes."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=float)
        if amps.ndim != 1:
            raise ValueError("amplitudes must be one-dimensional")
        check_dimension(amps.size, name="len(amplitudes)")
        if np.any(amps < 0) or not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite and nonnegative")
        norm = np.sqrt(np.sum(amps ** 2))
        if norm == 0:
            raise ValueError("amplitudes must not all vanish")
        amps = amps / norm
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def d(self):
        return self.amplitudes.size

    def __eq__(self, other):
        if not isinstance(other, SchmidtSpectrum):
            return NotImplemented
        return np.array_equal(self.amplitudes, other.amplitudes)

    def __hash__(self):
        return hash(self.amplitudes.tobytes())

    def to_json(self):
        return json.dumps(self.amplitudes.tolist())

    @classmethod
    def from_json(cls, text):
        return cls(np.asarray(json.loads(text), dtype=float))


def flat_spectrum(d):
    """Maximally entangled spectrum, ``c_j = 1 / sqrt(d)``."""
    d = check_dimension(d)
    return SchmidtSpectrum(np.full(d, 1 / np.sqrt(d)))


def mode_offsets(d):
    """Symmetric mode positions ``j - (d - 1) / 2``; half-integers for even ``d``."""
    return np.arange(d) - (d - 1) / 2


def gaussian_spectrum(d, sigma):
    """Spectrum with a Gaussian amplitude envelope of width ``sigma`` (mode units).

    The envelope ``exp(-x**2 / (2 sigma**2))`` is centred on the middle of the
    mode range, so the spectrum is symmetric and approaches the flat spectrum
    as ``sigma`` grows.
    """
    d = check_dimension(d)
    sigma = float(sigma)
    if not sigma > 0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    x = mode_offsets(d)
    return SchmidtSpectrum(np.exp(-x ** 2 / (2 * sigma ** 2)))


def isotropic_fidelity(d, p):
    """Fidelity of the isotropic state with weight ``p`` to the maximally entangled state."""
    d = check_dimension(d)
    p = float(p)
    if not 0 <= p <= 1:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    return p + (1 - p) / d ** 2


def pair_number_pmf(mu, m):
    """Probability of ``m`` pairs in one mode when the mean is ``mu``.

    Each mode of the down-converted state is two-mode squeezed vacuum, so the
    pair number is geometric: ``P(m) = mu**m / (1 + mu)**(m + 1)``.
    ``m`` may be an integer or an integer array.
    """
    mu = float(mu)
    if not mu >= 0:
        raise ValueError(f"mu must be >= 0, got {mu}")
    m_arr = np.asarray(m)
    if np.any(m_arr < 0) or not np.all(np.equal(np.mod(m_arr, 1), 0)):
        raise ValueError("m must be a nonnegative integer")
    if mu == 0:
        out = np.where(m_arr == 0, 1.0, 0.0)
    else:
        ratio = mu / (1 + mu)
        out = ratio ** m_arr / (1 + mu)
    return float(out) if np.ndim(out) == 0 else out


def pair_number_moments(mu):
    """Mean and variance of the geometric pair-number law."""
    return float(mu), float(mu) * (1 + float(mu))
