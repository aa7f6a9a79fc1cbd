import numpy as np
import pytest

from qcontrast.exceptions import IncompleteMubSetError, UnsupportedDimensionError
from qcontrast.mubs import (
    MubSet,
    all_mubs,
    computational_basis,
    fourier_basis,
    maximally_entangled_vector,
    mub_projector_sum_check,
    mub_set,
    two_mubs,
    verify_unbiasedness,
)

PRIMES = [2, 3, 5, 7, 11, 13]


def test_computational_basis_is_identity():
    np.testing.assert_array_equal(computational_basis(2), np.eye(2))
    np.testing.assert_array_equal(computational_basis(5), np.eye(5))


def test_fourier_basis_entries():
    np.testing.assert_allclose(fourier_basis(2), np.array([[1, 1], [1, -1]]) / np.sqrt(2),
                               atol=1e-15)
    np.testing.assert_allclose(np.abs(fourier_basis(3)), np.full((3, 3), 3 ** -0.5))


@pytest.mark.parametrize("d", [2, 4, 6, 9])
def test_two_mubs_any_dimension(d):
    check = verify_unbiasedness(two_mubs(d))
    assert check.ok
    assert not two_mubs(d).complete


@pytest.mark.parametrize("d", PRIMES)
def test_all_mubs_complete_and_unbiased(d):
    mubs = all_mubs(d)
    assert len(mubs) == d + 1
    assert mubs.complete
    np.testing.assert_array_equal(mubs[0], np.eye(d))
    np.testing.assert_allclose(mubs[1], fourier_basis(d))
    check = verify_unbiasedness(mubs)
    assert check.ok
    assert check.deviation < 1e-12


def test_seven_dimensions_has_eight_bases():
    assert len(all_mubs(7)) == 8


@pytest.mark.parametrize("d", [4, 6, 9, 10])
def test_all_mubs_rejects_composite(d):
    with pytest.raises(UnsupportedDimensionError):
        all_mubs(d)
    assert len(mub_set(d)) == 2


def test_verify_detects_broken_norm():
    bases = [b.copy() for b in all_mubs(3)]
    bases[2][0] *= 1.01
    assert not verify_unbiasedness(MubSet(3, tuple(bases))).ok


def test_verify_detects_repeated_basis():
    eye = computational_basis(4)
    check = verify_unbiasedness(MubSet(4, (eye, eye)))
    assert not check.ok
    assert check.deviation == pytest.approx(1 - 1 / 4)


@pytest.mark.parametrize("d", PRIMES)
def test_projector_identity(d):
    assert mub_projector_sum_check(all_mubs(d)) < 1e-10


def test_projector_identity_oracle_by_kron():
    # independent construction with explicit kron products
    d = 3
    total = np.zeros((9, 9), dtype=complex)
    for basis in all_mubs(d):
        for v in basis:
            p = np.outer(v, v.conj())
            total += np.kron(p, p.conj())
    phi = np.eye(d).reshape(-1) / np.sqrt(d)
    np.testing.assert_allclose(total, d * np.outer(phi, phi) + np.eye(9), atol=1e-12)
    np.testing.assert_allclose(maximally_entangled_vector(d), phi)


def test_projector_identity_incomplete():
    with pytest.raises(IncompleteMubSetError):
        mub_projector_sum_check(two_mubs(3))
    assert mub_projector_sum_check(two_mubs(3), require_complete=False) > 0.1


def test_json_round_trip():
    mubs = all_mubs(5)
    back = MubSet.from_json(mubs.to_json())
    assert back.d == 5
    for a, b in zip(mubs, back):
        np.testing.assert_array_equal(a, b)


def test_bases_are_read_only():
    with pytest.raises(ValueError):
        all_mubs(3)[1][0, 0] = 0
