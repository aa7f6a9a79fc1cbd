import math

import numpy as np
import pytest
from scipy.optimize import minimize

from qcontrast.certify import (
    cglmp_dimension_bound,
    cglmp_noisy,
    cglmp_quantum_value,
)
from qcontrast.certify.cglmp import cglmp_bases


def chsh_oracle():
    """Maximum CHSH value of |Phi+> over real-plane qubit observables."""
    phi = np.array([1, 0, 0, 1]) / np.sqrt(2)
    rho = np.outer(phi, phi)
    z = np.diag([1.0, -1.0])
    x = np.array([[0.0, 1.0], [1.0, 0.0]])

    def obs(t):
        return math.cos(t) * z + math.sin(t) * x

    def corr(a, b):
        return np.trace(rho @ np.kron(obs(a), obs(b))).real

    def neg_chsh(t):
        a1, a2, b1, b2 = t
        return -(corr(a1, b1) + corr(a1, b2) + corr(a2, b1) - corr(a2, b2))

    best = min((minimize(neg_chsh, x0, method="Nelder-Mead",
                         options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 20000})
                for x0 in np.random.default_rng(0).uniform(0, np.pi, (8, 4))),
               key=lambda r: r.fun)
    return -best.fun


def closed_form_value(d):
    """Known CGLMP value of the maximally entangled state with the optimal settings."""
    def q(k):
        return 1 / (2 * d ** 3 * math.sin(math.pi * (k + 0.25) / d) ** 2)
    return 4 * d * sum((1 - 2 * k / (d - 1)) * (q(k) - q(-(k + 1))) for k in range(d // 2))


def test_qubit_value_matches_brute_force():
    assert cglmp_quantum_value(2) == pytest.approx(chsh_oracle(), abs=1e-6)
    assert cglmp_quantum_value(2) == pytest.approx(2 * math.sqrt(2), abs=1e-12)


@pytest.mark.parametrize("d", list(range(2, 16)) + [31, 64])
def test_value_matches_closed_form(d):
    assert cglmp_quantum_value(d) == pytest.approx(closed_form_value(d), abs=1e-10)


def test_value_d3():
    assert cglmp_quantum_value(3) == pytest.approx(2.8729, abs=1e-4)


def test_values_increase_towards_three():
    vals = [cglmp_quantum_value(d) for d in (2, 3, 5, 10, 50, 100)]
    assert np.all(np.diff(vals) > 0)
    assert 2.9 < vals[-1] < 3.0


def test_bases_are_unitary():
    for b in cglmp_bases(5):
        np.testing.assert_allclose(b @ b.conj().T, np.eye(5), atol=1e-12)


def test_noisy_examples():
    assert cglmp_noisy(1, 7) == 0
    assert cglmp_noisy(math.inf, 4) == pytest.approx(cglmp_quantum_value(4))
    assert cglmp_noisy(21, 10) == pytest.approx(2, abs=0.05)


def test_dimension_bound_examples():
    b = cglmp_dimension_bound(21)
    assert b.status == "bounded" and b.d_max in (9, 10)
    assert cglmp_dimension_bound(3) == (0, "no_violation")
    assert cglmp_dimension_bound(1) == (0, "no_violation")
    assert cglmp_dimension_bound(math.inf, d_limit=20) == (20, "unbounded_within_scan")


def test_qubit_violation_threshold():
    q_min = 1 + 2 * 2 / (2 * math.sqrt(2) - 2)
    assert cglmp_dimension_bound(q_min * 0.999).d_max == 0
    assert cglmp_dimension_bound(q_min * 1.001).d_max >= 2


@pytest.mark.parametrize("q", [10, 37, 80])
def test_dimension_bound_is_last_violation(q):
    b = cglmp_dimension_bound(q)
    assert cglmp_noisy(q, b.d_max) > 2
    assert cglmp_noisy(q, b.d_max + 1) <= 2
