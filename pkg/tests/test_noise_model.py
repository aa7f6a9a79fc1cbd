import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import minimize_scalar

from qcontrast.exceptions import (
    InfiniteContrastError,
    InvalidRegimeError,
    NoFiniteOptimumError,
    UndefinedContrastError,
)
from qcontrast.noise_model import (
    MultiPhotonRegimeWarning,
    NoiseParams,
    contrast_from_weight,
    isotropic_weight,
    max_contrast,
    optimal_pair_rate,
    quantum_contrast,
)


def test_noiseless_contrast():
    assert quantum_contrast(1.0, 0.0, 0.5) == pytest.approx(3.0)


def test_contrast_example_value():
    # 1 + 0.01 * 1.01 / (2e-4 + 0.01)**2
    assert quantum_contrast(0.01, 1e-4, 0.5) == pytest.approx(98.08, abs=0.01)


def test_emccd_contrast():
    assert quantum_contrast(1.25e-7, 1e-7, 0.8) == pytest.approx(2.0e6, rel=1e-3)


def test_contrast_accepts_params_object():
    p = NoiseParams(0.01, 1e-4, 0.5)
    assert quantum_contrast(p) == quantum_contrast(0.01, 1e-4, 0.5)


def test_undefined_contrast():
    with pytest.raises(UndefinedContrastError):
        quantum_contrast(0.0, 0.0, 0.5)


@pytest.mark.parametrize("mu,n,eta", [(-1, 0, 0.5), (0.1, 1.0, 0.5), (0.1, 0.1, 0.0),
                                      (0.1, 0.1, 1.5)])
def test_invalid_params(mu, n, eta):
    with pytest.raises(ValueError):
        NoiseParams(mu, n, eta)


def test_multi_photon_warning():
    with pytest.warns(MultiPhotonRegimeWarning):
        p = NoiseParams(0.5, 1e-3, 0.5)
    assert p.multi_photon
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert not NoiseParams(0.01, 1e-3, 0.5).multi_photon


def test_optimal_pair_rate_examples():
    assert optimal_pair_rate(1e-7, 0.8) == pytest.approx(1.25e-7, rel=1e-6)
    assert optimal_pair_rate(0.1, 0.3) == pytest.approx(1.0)


def test_optimal_pair_rate_no_optimum():
    with pytest.raises(NoFiniteOptimumError) as info:
        optimal_pair_rate(0.5, 0.8)
    assert info.value.supremum == 2.0


def test_max_contrast_examples():
    assert max_contrast(1e-7, 0.8) == pytest.approx(2.0e6, rel=1e-3)
    assert max_contrast(0.2, 0.4) == pytest.approx(2.0)
    assert max_contrast(1e-5, 0.23) == pytest.approx(5751.0, rel=1e-3)
    with pytest.raises(InvalidRegimeError):
        max_contrast(0.5, 0.5)


def test_isotropic_weight_examples():
    assert isotropic_weight(2, 2) == pytest.approx(1 / 3, abs=1e-12)
    assert isotropic_weight(10, 6) == pytest.approx(1 / 3, abs=1e-12)
    assert isotropic_weight(7, 1) == 0.0


def test_contrast_from_weight_examples():
    assert contrast_from_weight(2, 1 / 3) == pytest.approx(2.0)
    assert contrast_from_weight(5, 0.0) == 1.0
    assert contrast_from_weight(7, 0.5) == pytest.approx(8.0)
    with pytest.raises(InfiniteContrastError):
        contrast_from_weight(3, 1.0)


def test_coincidence_probabilities_ratio_is_contrast():
    p = NoiseParams(3e-3, 1e-3, 0.5)
    same, cross = p.coincidence_probabilities()
    assert same / cross == pytest.approx(quantum_contrast(p), rel=1e-12)


ratios = st.floats(1e-6, 0.3)
scales = st.floats(1e-2, 1.0)
mus = st.floats(1e-6, 0.09)


@given(mu=mus, ratio=ratios, c1=scales, c2=scales)
def test_contrast_depends_only_on_noise_ratio(mu, ratio, c1, c2):
    q1 = quantum_contrast(mu, ratio * c1 * 0.9, c1 * 0.9)
    q2 = quantum_contrast(mu, ratio * c2 * 0.9, c2 * 0.9)
    assert q1 == pytest.approx(q2, rel=1e-12)


@given(n=st.floats(1e-7, 0.1), eta=st.floats(0.25, 1.0))
def test_optimum_attains_max_and_is_local_max(n, eta):
    mu = optimal_pair_rate(n, eta)
    q = quantum_contrast(mu, n, eta)
    assert q == pytest.approx(max_contrast(n, eta), rel=1e-9)
    assert quantum_contrast(1.1 * mu, n, eta) < q
    assert quantum_contrast(0.9 * mu, n, eta) < q


@settings(max_examples=30)
@given(n=st.floats(1e-6, 0.05), eta=st.floats(0.2, 1.0))
def test_optimum_matches_numerical_maximisation(n, eta):
    res = minimize_scalar(lambda lm: -quantum_contrast(math.exp(lm), n, eta),
                          bounds=(-30, 5), method="bounded", options={"xatol": 1e-10})
    assert math.exp(res.x) == pytest.approx(optimal_pair_rate(n, eta), rel=1e-3)


@given(d=st.integers(2, 200), p=st.floats(0, 0.999999))
def test_weight_round_trip(d, p):
    assert isotropic_weight(d, contrast_from_weight(d, p)) == pytest.approx(p, abs=1e-12)


@given(mu=st.floats(0, 5), ratio=st.floats(1e-6, 1.9))
def test_contrast_at_least_one(mu, ratio):
    assert quantum_contrast(mu, ratio * 0.5, 0.5) >= 1


def test_contrast_tends_to_two():
    qs = [quantum_contrast(mu, 1e-3, 0.5) for mu in (1e2, 1e4, 1e6)]
    assert np.all(np.diff(np.abs(np.array(qs) - 2)) < 0)
    assert qs[-1] == pytest.approx(2.0, abs=1e-5)
