"""Mutually unbiased bases.

A basis is a ``d x d`` complex array whose rows are the basis vectors. For
prime ``d`` the complete set of ``d + 1`` bases is built from quadratic phase
vectors: basis 0 is computational, basis 1 is Fourier and basis ``1 + k``
has components ``omega**(k j**2 + a j) / sqrt(d)``. For ``d = 2`` the
quadratic phase is replaced by ``i**(k j)``, which gives the X and Y bases.
Other dimensions only get the computational/Fourier pair.
"""

import json
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .exceptions import IncompleteMubSetError, UnsupportedDimensionError
from .validation import check_dimension, is_prime

UNBIASED_ATOL = 1e-10


def computational_basis(d):
    d = check_dimension(d)
    return np.eye(d, dtype=complex)


def fourier_basis(d):
    """Rows ``omega**(a j) / sqrt(d)`` with ``omega = exp(2 pi i / d)``."""
    d = check_dimension(d)
    j = np.arange(d)
    return np.exp(2j * np.pi * np.outer(j, j) / d) / np.sqrt(d)


def _quadratic_phase_basis(d, k):
    j = np.arange(d)
    a = j[:, None]
    if d == 2:
        return (1j ** (k * j))[None, :] * (-1.0) ** (a * j) / np.sqrt(2)
    return np.exp(2j * np.pi * ((k * j * j)[None, :] + a * j) / d) / np.sqrt(d)


@dataclass(frozen=True, eq=False)
class MubSet:
    """Ordered bases sharing dimension ``d``; index 0 is computational.

    ``complete`` is True when the set holds all ``d + 1`` bases.
    """

    d: int
    bases: tuple

    def __post_init__(self):
        bases = []
        for b in self.bases:
            arr = np.array(b, dtype=complex)
            if arr.shape != (self.d, self.d):
                raise ValueError(f"basis has shape {arr.shape}, expected {(self.d, self.d)}")
            arr.setflags(write=False)
            bases.append(arr)
        object.__setattr__(self, "bases", tuple(bases))

    def __len__(self):
        return len(self.bases)

    def __getitem__(self, index):
        return self.bases[index]

    def __iter__(self):
        return iter(self.bases)

    @property
    def complete(self):
        return len(self.bases) == self.d + 1

    def to_json(self):
        """Nested ``[re, im]`` pairs, one ``d x d`` block per basis."""
        return json.dumps([
            [[[float(z.real), float(z.imag)] for z in row] for row in basis]
            for basis in self.bases])

    @classmethod
    def from_json(cls, text):
        raw = np.asarray(json.loads(text), dtype=float)
        bases = raw[..., 0] + 1j * raw[..., 1]
        return cls(bases.shape[1], tuple(bases))


def all_mubs(d):
    """Complete set of ``d + 1`` mutually unbiased bases for prime ``d``."""
    d = check_dimension(d)
    if not is_prime(d):
        raise UnsupportedDimensionError(
            f"complete MUB sets are only constructed for prime d, got {d}; "
            "use two_mubs(d) for the computational/Fourier pair")
    bases = [computational_basis(d), fourier_basis(d)]
    bases += [_quadratic_phase_basis(d, k) for k in range(1, d)]
    return MubSet(d, tuple(bases))


def two_mubs(d):
    """The computational and Fourier bases, available for every ``d``."""
    d = check_dimension(d)
    return MubSet(d, (computational_basis(d), fourier_basis(d)))


def mub_set(d):
    """Complete set for prime ``d``, otherwise the two-basis subset."""
    return all_mubs(d) if is_prime(d) else two_mubs(d)


class UnbiasednessCheck(NamedTuple):
    ok: bool
    deviation: float


def verify_unbiasedness(mubs, atol=UNBIASED_ATOL):
    """Check unitarity of each basis and ``|<a|b>|**2 = 1/d`` across bases.

    Returns the verdict together with the worst deviation found.
    """
    d = mubs.d
    eye = np.eye(d)
    worst = 0.0
    for basis in mubs:
        worst = max(worst, np.abs(basis @ basis.conj().T - eye).max())
    for s in range(len(mubs)):
        for t in range(s + 1, len(mubs)):
            overlaps = np.abs(mubs[s] @ mubs[t].conj().T) ** 2
            worst = max(worst, np.abs(overlaps - 1 / d).max())
    return UnbiasednessCheck(bool(worst <= atol), float(worst))


def maximally_entangled_vector(d):
    """``sum_j |j j> / sqrt(d)`` in the ``kron`` ordering ``j * d + k``."""
    return np.eye(d).reshape(-1) / np.sqrt(d)


def mub_projector_sum(mubs):
    """``sum_b sum_a P_a^b (x) conj(P_a^b)`` as a ``d**2 x d**2`` array."""
    d = mubs.d
    total = np.zeros((d * d, d * d), dtype=complex)
    for basis in mubs:
        # row a of u is kron(v_a, conj(v_a))
        u = (basis[:, :, None] * basis.conj()[:, None, :]).reshape(d, d * d)
        total += u.T @ u.conj()
    return total


def mub_projector_sum_check(mubs, require_complete=True):
    """Largest elementwise deviation of the projector sum from ``d |Phi><Phi| + 1``.

    The identity holds only for complete sets; it is what makes the fidelity
    computed from all ``d + 1`` coincidence matrices exact.
    """
    if require_complete and not mubs.complete:
        raise IncompleteMubSetError(
            f"projector identity needs {mubs.d + 1} bases, got {len(mubs)}")
    d = mubs.d
    phi = maximally_entangled_vector(d)
    target = d * np.outer(phi, phi) + np.eye(d * d)
    return float(np.abs(mub_projector_sum(mubs) - target).max())
