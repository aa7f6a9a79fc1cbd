"""scikit-learn style wrappers around the functional API.

Coincidence data are passed as arrays of shape ``(n_mubs, d, d)`` for one
record or ``(n_records, n_mubs, d, d)`` for a batch; matrix ``b`` of a record
is the matched measurement in MUB ``b``. These estimators chain in a
:class:`sklearn.pipeline.Pipeline`, e.g. noise injection followed by count
sampling followed by certification.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .certify import certify_record
from .coincidence import (
    CoincidenceMatrix,
    ExperimentRecord,
    add_noise,
    estimate_contrast,
    sample_counts,
    synthesize_record,
)
from .mubs import mub_set
from .noise_model import NoiseParams
from .states import flat_spectrum, gaussian_spectrum
from .validation import check_coincidence_stack, check_dimension


def _restore(arr, added):
    return arr.reshape(arr.shape[added:]) if added else arr


def stack_to_records(X):
    """Turn a coincidence array into a list of :class:`ExperimentRecord`."""
    stack, _ = check_coincidence_stack(X)
    records = []
    for rec in stack:
        matrices = []
        for b, m in enumerate(rec):
            mode = "probability" if abs(m.sum() - 1) <= 1e-9 else "counts"
            matrices.append(CoincidenceMatrix(m, b, b, mode))
        records.append(ExperimentRecord(rec.shape[-1], tuple(matrices)))
    return records


def _noise_params(est):
    physical = [est.mu, est.n, est.eta]
    if est.target_q is not None:
        if any(v is not None for v in physical):
            raise ValueError("set either target_q or (mu, n, eta), not both")
        return None
    if any(v is None for v in physical):
        raise ValueError("set target_q or all of mu, n and eta")
    return NoiseParams(*physical)


class NoiseInjector(TransformerMixin, BaseEstimator):
    """Add accidental coincidences to probability matrices.

    Parameters
    ----------
    target_q : float, optional
        Contrast a perfectly correlated matrix would have after mixing.
    mu, n, eta : float, optional
        Physical noise parameters; used when ``target_q`` is None.
    """

    def __init__(self, target_q=None, mu=None, n=None, eta=None):
        self.target_q = target_q
        self.mu = mu
        self.n = n
        self.eta = eta

    def fit(self, X=None, y=None):
        self.params_ = _noise_params(self)
        return self

    def transform(self, X):
        check_is_fitted(self, "params_")
        stack, added = check_coincidence_stack(X)
        out = np.empty_like(stack)
        for idx in np.ndindex(stack.shape[:2]):
            out[idx] = add_noise(stack[idx] / stack[idx].sum(), params=self.params_,
                                 target_q=self.target_q).entries
        return _restore(out, added)


class CountSampler(TransformerMixin, BaseEstimator):
    """Replace probability matrices by multinomial counts.

    Every matrix gets its own child of ``SeedSequence(random_state)``, so the
    output is reproducible for an integer ``random_state``.
    """

    def __init__(self, total_events=10_000, random_state=None):
        self.total_events = total_events
        self.random_state = random_state

    def fit(self, X=None, y=None):
        self.total_events_ = int(self.total_events)
        if self.total_events_ < 0:
            raise ValueError("total_events must be >= 0")
        return self

    def transform(self, X):
        stack, added = check_coincidence_stack(X)
        n_mats = stack.shape[0] * stack.shape[1]
        seeds = iter(np.random.SeedSequence(self.random_state).spawn(n_mats))
        out = np.empty_like(stack)
        for idx in np.ndindex(stack.shape[:2]):
            probs = stack[idx] / stack[idx].sum()
            out[idx] = sample_counts(probs, self.total_events,
                                     np.random.default_rng(next(seeds))).entries
        return _restore(out, added)


class ContrastEstimator(TransformerMixin, BaseEstimator):
    """Per-MUB and MUB-averaged contrast of coincidence data.

    ``fit`` stores ``per_mub_q_`` with shape ``(n_records, n_mubs)`` and
    ``average_q_`` with shape ``(n_records,)``; ``transform`` returns the
    per-MUB contrasts.
    """

    def fit(self, X, y=None):
        self.per_mub_q_ = self.transform(X)
        self.average_q_ = self.per_mub_q_.mean(axis=-1)
        return self

    def transform(self, X):
        stack, _ = check_coincidence_stack(X)
        return np.array([[estimate_contrast(m) for m in rec] for rec in stack])


class EntanglementCertifier(TransformerMixin, BaseEstimator):
    """Certify entanglement dimensionality from coincidence data.

    After ``fit`` on a single record the full :class:`CertificationReport`
    is available as ``report_``; for a batch, ``reports_`` holds one per
    record. ``predict`` returns the certified dimensionality per record and
    ``transform`` a feature table with columns :attr:`feature_names`.
    """

    feature_names = ("average_q", "fidelity_lower_bound", "fidelity_exact",
                     "certified_k_two_mub", "certified_k_all_mub")

    def fit(self, X, y=None):
        self.reports_ = [certify_record(r) for r in stack_to_records(X)]
        self.report_ = self.reports_[0]
        self.certified_k_ = self.report_.certified_k
        self.average_q_ = self.report_.average_q
        return self

    def predict(self, X):
        return np.array([certify_record(r).certified_k for r in stack_to_records(X)])

    def transform(self, X):
        rows = []
        for rec in stack_to_records(X):
            rep = certify_record(rec)
            rows.append([np.nan if getattr(rep, f) is None else getattr(rep, f)
                         for f in self.feature_names])
        return np.array(rows, dtype=float)

    def get_feature_names_out(self, input_features=None):
        return np.array(self.feature_names, dtype=object)


class CoincidenceSimulator(BaseEstimator):
    """Generate synthetic experiment records.

    Parameters
    ----------
    d : int
        Hilbert-space dimension; prime ``d`` gets all ``d + 1`` MUBs.
    sigma : float, optional
        Gaussian envelope width in mode units; None means a flat spectrum.
    target_q, mu, n, eta : float, optional
        Noise, as for :class:`NoiseInjector`. All None means noiseless.
    total_events : int, optional
        Coincidences per MUB for finite-count data.
    random_state : int, optional
        Seed for count sampling.
    """

    def __init__(self, d=3, sigma=None, target_q=None, mu=None, n=None, eta=None,
                 total_events=None, random_state=None):
        self.d = d
        self.sigma = sigma
        self.target_q = target_q
        self.mu = mu
        self.n = n
        self.eta = eta
        self.total_events = total_events
        self.random_state = random_state

    def fit(self, X=None, y=None):
        d = check_dimension(self.d)
        self.spectrum_ = flat_spectrum(d) if self.sigma is None else gaussian_spectrum(d, self.sigma)
        self.mubs_ = mub_set(d)
        noiseless = self.target_q is None and all(v is None for v in (self.mu, self.n, self.eta))
        self.params_ = None if noiseless else _noise_params(self)
        return self

    def simulate(self):
        """Return one :class:`ExperimentRecord`."""
        check_is_fitted(self, "spectrum_")
        return synthesize_record(self.spectrum_, self.mubs_, params=self.params_,
                                 target_q=self.target_q, total_events=self.total_events,
                                 seed=self.random_state)

    def sample(self):
        """The simulated record as an array of shape ``(n_mubs, d, d)``."""
        return np.stack([m.entries for m in self.simulate().matrices])
