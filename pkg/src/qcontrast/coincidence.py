"""Coincidence matrices: Born-rule synthesis, noise, finite counts, contrast.

Rows index the signal outcome, columns the idler outcome. The idler is
measured in the complex-conjugate basis so that the maximally entangled state
is perfectly correlated in every basis of a MUB set.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .exceptions import DimensionMismatchError, MatrixFormatError
from .noise_model import NoiseParams, isotropic_weight
from .states import SchmidtSpectrum
from .validation import (
    check_contrast,
    check_probability_matrix,
    check_square_matrix,
)

MODES = ("probability", "counts")


@dataclass(frozen=True, eq=False)
class CoincidenceMatrix:
    """A ``d x d`` table of joint detection probabilities or raw counts."""

    entries: np.ndarray
    signal_mub: int = 0
    idler_mub: int = 0
    mode: str = "probability"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        arr = check_square_matrix(self.entries, name="coincidence matrix")
        if self.mode == "probability":
            check_probability_matrix(arr, name="coincidence matrix")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)
        object.__setattr__(self, "signal_mub", int(self.signal_mub))
        object.__setattr__(self, "idler_mub", int(self.idler_mub))

    @property
    def d(self):
        return self.entries.shape[0]

    @property
    def total(self):
        return float(self.entries.sum())

    def probabilities(self):
        """Entries normalised to unit sum (a no-op in probability mode)."""
        total = self.entries.sum()
        if total <= 0:
            raise MatrixFormatError("cannot normalise an all-zero matrix")
        return self.entries / total

    def __eq__(self, other):
        if not isinstance(other, CoincidenceMatrix):
            return NotImplemented
        return (self.signal_mub, self.idler_mub, self.mode) == (
            other.signal_mub, other.idler_mub, other.mode) and np.array_equal(
            self.entries, other.entries)


@dataclass(frozen=True, eq=False)
class ExperimentRecord:
    """Matched-basis coincidence matrices for one (simulated) experiment.

    ``mub_count`` is the size of the MUB set the matrices were drawn from;
    ``params`` and ``seed`` carry provenance only.
    """

    d: int
    matrices: tuple
    mub_count: int = None
    seed: int = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        matrices = tuple(self.matrices)
        if not matrices:
            raise ValueError("a record needs at least one matrix")
        for m in matrices:
            if m.d != self.d:
                raise DimensionMismatchError(
                    f"matrix for MUB {m.signal_mub} has d={m.d}, record has d={self.d}")
        object.__setattr__(self, "matrices", matrices)
        if self.mub_count is None:
            object.__setattr__(self, "mub_count", len(matrices))

    @property
    def complete(self):
        """True when one matched matrix is present for each of the d + 1 MUBs."""
        bases = {m.signal_mub for m in self.matrices if m.signal_mub == m.idler_mub}
        return len(bases) == self.d + 1

    def stack(self):
        """Probability matrices as an array of shape (n_mubs, d, d)."""
        return np.stack([m.probabilities() for m in self.matrices])

    def matrix_for(self, mub):
        for m in self.matrices:
            if m.signal_mub == mub and m.idler_mub == mub:
                return m
        raise KeyError(f"no matched matrix for MUB {mub}")

    def __eq__(self, other):
        if not isinstance(other, ExperimentRecord):
            return NotImplemented
        return (self.d == other.d and self.mub_count == other.mub_count
                and self.seed == other.seed and self.params == other.params
                and self.matrices == other.matrices)


def _amplitudes(spectrum):
    if isinstance(spectrum, SchmidtSpectrum):
        return spectrum.amplitudes
    return SchmidtSpectrum(spectrum).amplitudes


def joint_probability(spectrum, signal_basis, idler_basis, signal_mub=0, idler_mub=0):
    """Born-rule joint outcome distribution for a pure two-photon state.

    ``P(a, a') ~ |sum_j c_j conj(v_a[j]) u_a'[j]|**2`` where ``v`` are the
    signal basis rows and ``u`` the idler basis rows (the idler detector
    projects onto ``conj(u)``).
    """
    c = _amplitudes(spectrum)
    v = np.asarray(signal_basis, dtype=complex)
    u = np.asarray(idler_basis, dtype=complex)
    d = c.size
    if v.shape != (d, d) or u.shape != (d, d):
        raise DimensionMismatchError(
            f"spectrum has d={d} but bases have shapes {v.shape} and {u.shape}")
    amp = (v.conj() * c) @ u.T
    probs = np.abs(amp) ** 2
    return CoincidenceMatrix(probs / probs.sum(), signal_mub, idler_mub)


def _entries(matrix):
    if isinstance(matrix, CoincidenceMatrix):
        return matrix.entries
    return check_square_matrix(matrix)


def mix_weight(d, params=None, target_q=None):
    """Weight on the ideal matrix after accidentals are mixed in.

    Both parameterisations reduce to the isotropic weight of the implied
    contrast; the physical one is evaluated from the cell probabilities
    directly so that no contrast is needed when ``mu = n = 0``.
    """
    if (params is None) == (target_q is None):
        raise ValueError("give exactly one of params or target_q")
    if target_q is not None:
        return isotropic_weight(d, check_contrast(target_q, "target_q"))
    if not isinstance(params, NoiseParams):
        params = NoiseParams(*params)
    signal = params.eta ** 2 * params.mu * (1 + params.mu) * d
    floor = (params.n + params.eta * params.mu) ** 2 * d * d
    if signal + floor == 0:
        raise ValueError("no signal and no noise: the noisy matrix is undefined")
    return signal / (signal + floor)


def add_noise(matrix, params=None, target_q=None):
    """Add a uniform accidental floor to a probability-mode matrix.

    With physical ``params`` every cell becomes
    ``eta**2 mu (1 + mu) d P(a, a') + (n + eta mu)**2`` before renormalising.
    With ``target_q`` the matrix is mixed with the uniform distribution so that
    a perfectly correlated ``delta / d`` matrix ends up with diagonal to
    off-diagonal ratio ``target_q``. The two agree when ``target_q`` is the
    contrast implied by ``params``.
    """
    if isinstance(matrix, CoincidenceMatrix):
        if matrix.mode != "probability":
            raise ValueError("add_noise needs a probability-mode matrix")
        labels = (matrix.signal_mub, matrix.idler_mub)
        probs = matrix.entries
    else:
        labels = (0, 0)
        probs = check_probability_matrix(matrix)
    d = probs.shape[0]
    w = mix_weight(d, params, target_q)
    noisy = w * probs + (1 - w) / d ** 2
    return CoincidenceMatrix(noisy / noisy.sum(), *labels)


def sample_counts(matrix, total_events, seed=None):
    """Multinomial draw of ``total_events`` coincidences over the ``d**2`` cells."""
    if isinstance(matrix, CoincidenceMatrix):
        probs, labels = matrix.probabilities(), (matrix.signal_mub, matrix.idler_mub)
    else:
        probs, labels = check_probability_matrix(matrix, atol=1e-6), (0, 0)
    total_events = int(total_events)
    if total_events < 0:
        raise ValueError("total_events must be >= 0")
    rng = np.random.default_rng(seed)
    flat = probs.reshape(-1)
    counts = rng.multinomial(total_events, flat / flat.sum())
    return CoincidenceMatrix(counts.reshape(probs.shape).astype(float), *labels, mode="counts")


def estimate_contrast(matrix):
    """Mean of the diagonal over mean of the off-diagonal.

    Returns ``inf`` when the off-diagonal is empty but the diagonal is not.
    """
    arr = _entries(matrix)
    d = arr.shape[0]
    diag = np.trace(arr) / d
    off = (arr.sum() - np.trace(arr)) / (d * d - d)
    if off == 0:
        if diag == 0:
            raise MatrixFormatError("matrix is empty; contrast undefined")
        return np.inf
    return float(diag / off)


def per_mub_contrasts(record):
    matrices = record.matrices if isinstance(record, ExperimentRecord) else record
    return [estimate_contrast(m) for m in matrices]


def average_contrast(record):
    """Arithmetic mean of the per-MUB contrasts."""
    qs = per_mub_contrasts(record)
    if not qs:
        raise ValueError("need at least one matrix")
    return float(np.mean(qs))


def synthesize_record(spectrum, mubs, params=None, target_q=None, total_events=None,
                      seed=None):
    """Noisy matched-basis matrices for every basis in ``mubs``.

    With ``total_events`` each basis gets an independent multinomial draw
    seeded from ``seed`` via ``SeedSequence.spawn``.
    """
    if spectrum.d != mubs.d:
        raise DimensionMismatchError(f"spectrum d={spectrum.d}, MUB set d={mubs.d}")
    matrices = []
    for b, basis in enumerate(mubs):
        m = joint_probability(spectrum, basis, basis, b, b)
        if params is not None or target_q is not None:
            m = add_noise(m, params=params, target_q=target_q)
        matrices.append(m)
    if total_events is not None:
        children = np.random.SeedSequence(seed).spawn(len(matrices))
        matrices = [sample_counts(m, total_events, np.random.default_rng(c))
                    for m, c in zip(matrices, children)]
    provenance = {}
    if target_q is not None:
        provenance["target_q"] = float(target_q)
    if params is not None:
        p = params if isinstance(params, NoiseParams) else NoiseParams(*params)
        provenance.update(mu=p.mu, n=p.n, eta=p.eta)
    if total_events is not None:
        provenance["total_events"] = int(total_events)
    return ExperimentRecord(mubs.d, tuple(matrices), len(mubs), seed, provenance)


# --- Monte Carlo photon statistics -------------------------------------------

DETECTORS = ("threshold", "counting")
_CHUNK = 1_000_000


class MonteCarloResult(NamedTuple):
    """Empirical matched/mismatched coincidence rates and their standard errors.

    For threshold detectors the rates are click-coincidence frequencies; for
    counting detectors they are mean products of detected counts.
    """

    p_same: float
    p_cross: float
    se_same: float
    se_cross: float
    ratio: float
    se_ratio: float
    trials: int


def _simulate_chunk(params, trials, rng, detector):
    mu, n, eta = params.mu, params.n, params.eta
    if mu > 0:
        # numpy's geometric counts trials to first success, so shift to start at 0
        m_j = rng.geometric(1 / (1 + mu), trials) - 1
        m_k = rng.geometric(1 / (1 + mu), trials) - 1
    else:
        m_j = m_k = np.zeros(trials, dtype=np.int64)
    sig = rng.binomial(m_j, eta) + (rng.random(trials) < n)
    idl_j = rng.binomial(m_j, eta) + (rng.random(trials) < n)
    idl_k = rng.binomial(m_k, eta) + (rng.random(trials) < n)
    if detector == "threshold":
        sig, idl_j, idl_k = sig > 0, idl_j > 0, idl_k > 0
    same = (sig * idl_j).astype(float)
    cross = (sig * idl_k).astype(float)
    return np.array([same.sum(), cross.sum(), (same ** 2).sum(), (cross ** 2).sum(),
                     (same * cross).sum(), trials], dtype=float)


def _run_partition(args):
    params, trials, seed_seq, detector = args
    rng = np.random.default_rng(seed_seq)
    acc = np.zeros(6)
    done = 0
    while done < trials:
        step = min(_CHUNK, trials - done)
        acc += _simulate_chunk(params, step, rng, detector)
        done += step
    return acc


def monte_carlo_coincidence(params, trials, seed=None, detector="threshold",
                            partitions=1, workers=None):
    """Simulate detection windows and count matched/mismatched coincidences.

    Each window draws geometric pair numbers for two modes ``j`` and ``k``,
    keeps each photon with probability ``eta`` and adds an independent noise
    click with probability ``n`` to each detector. The signal detector in mode
    ``j`` is paired with idler detectors in modes ``j`` (matched) and ``k``
    (mismatched).

    ``detector="threshold"`` registers a click for one or more photons (no
    number resolution). ``detector="counting"`` scores the product of detected
    counts instead; its expectation is exactly
    ``eta**2 mu (1 + mu) delta_jk + (n + eta mu)**2``, whereas threshold clicks
    agree with that expression only to leading order in ``mu``.

    Trials are split into ``partitions`` with seeds spawned from ``seed``;
    partial sums are merged in partition order, so the result depends on
    ``(seed, partitions)`` but not on ``workers``.
    """
    if not isinstance(params, NoiseParams):
        params = NoiseParams(*params)
    if detector not in DETECTORS:
        raise ValueError(f"detector must be one of {DETECTORS}")
    trials = int(trials)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    partitions = max(1, min(int(partitions), trials))
    sizes = [trials // partitions + (i < trials % partitions) for i in range(partitions)]
    children = np.random.SeedSequence(seed).spawn(partitions)
    jobs = [(params, s, c, detector) for s, c in zip(sizes, children)]
    if workers and workers > 1 and partitions > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_run_partition, jobs))
    else:
        parts = [_run_partition(job) for job in jobs]
    s_same, s_cross, s_same2, s_cross2, s_prod, total = np.sum(parts, axis=0)
    return _summarise(s_same, s_cross, s_same2, s_cross2, s_prod, int(total))


def _summarise(s_same, s_cross, s_same2, s_cross2, s_prod, total):
    p_same, p_cross = s_same / total, s_cross / total
    var_same = max(s_same2 / total - p_same ** 2, 0.0)
    var_cross = max(s_cross2 / total - p_cross ** 2, 0.0)
    cov = s_prod / total - p_same * p_cross
    se_same = np.sqrt(var_same / total)
    se_cross = np.sqrt(var_cross / total)
    if p_cross > 0:
        ratio = p_same / p_cross
        rel_var = (var_same / p_same ** 2 if p_same > 0 else 0.0) + var_cross / p_cross ** 2
        if p_same > 0:
            rel_var -= 2 * cov / (p_same * p_cross)
        se_ratio = ratio * np.sqrt(max(rel_var, 0.0) / total)
    else:
        ratio, se_ratio = np.nan, np.nan
    return MonteCarloResult(float(p_same), float(p_cross), float(se_same), float(se_cross),
                            float(ratio), float(se_ratio), total)


def monte_carlo_z_scores(result, params, formula=None):
    """Standardised differences between a Monte Carlo run and the analytic rates.

    ``formula`` maps ``NoiseParams`` to ``(p_same, p_cross)``; it defaults to
    :meth:`NoiseParams.coincidence_probabilities`. Returns ``(z_same, z_cross,
    z_ratio)``.

    The rate standard errors are floored at ``sqrt(a (1 - a) / trials)`` for
    analytic rate ``a``, the smallest variance an integer-valued score with
    that mean can have; otherwise a short run that sees no events would report
    an infinite z-score.
    """
    if formula is None:
        formula = NoiseParams.coincidence_probabilities
    a_same, a_cross = formula(params)

    def floor(se, ana):
        return max(se, np.sqrt(max(ana * (1 - ana), 0.0) / result.trials))

    def z(emp, ana, se):
        if se > 0:
            return (emp - ana) / se
        return 0.0 if np.isclose(emp, ana, rtol=0, atol=1e-300) else np.inf

    z_ratio = np.nan
    if a_cross > 0 and np.isfinite(result.ratio):
        z_ratio = z(result.ratio, a_same / a_cross, result.se_ratio)
    return (z(result.p_same, a_same, floor(result.se_same, a_same)),
            z(result.p_cross, a_cross, floor(result.se_cross, a_cross)), z_ratio)

