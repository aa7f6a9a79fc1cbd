"""Noise modelling and certification of high-dimensional photonic entanglement.

The quantum contrast ``Q`` (correlated over accidental coincidences) links
source, channel and detector noise to fidelity witnesses, Schmidt-number
bounds, entropic steering and CGLMP violation.
"""

__version__ = "0.1.0"

from .certify import CertificationReport, certify_record
from .coincidence import (
    CoincidenceMatrix,
    ExperimentRecord,
    add_noise,
    average_contrast,
    estimate_contrast,
    joint_probability,
    monte_carlo_coincidence,
    sample_counts,
    synthesize_record,
)
from .estimators import (
    CoincidenceSimulator,
    ContrastEstimator,
    CountSampler,
    EntanglementCertifier,
    NoiseInjector,
)
from .mubs import MubSet, all_mubs, computational_basis, fourier_basis, verify_unbiasedness
from .noise_model import (
    NoiseParams,
    contrast_from_weight,
    isotropic_weight,
    max_contrast,
    optimal_pair_rate,
    quantum_contrast,
)
from .states import (
    SchmidtSpectrum,
    flat_spectrum,
    gaussian_spectrum,
    isotropic_fidelity,
    pair_number_pmf,
)

__all__ = [
    "CertificationReport", "CoincidenceSimulator", "ContrastEstimator", "CountSampler",
    "EntanglementCertifier", "NoiseInjector", "certify_record",
    "CoincidenceMatrix", "ExperimentRecord", "MubSet", "NoiseParams", "SchmidtSpectrum",
    "add_noise", "all_mubs", "average_contrast", "computational_basis", "contrast_from_weight",
    "estimate_contrast", "flat_spectrum", "fourier_basis", "gaussian_spectrum",
    "isotropic_fidelity", "isotropic_weight", "joint_probability", "max_contrast",
    "monte_carlo_coincidence", "optimal_pair_rate", "pair_number_pmf", "quantum_contrast",
    "sample_counts", "synthesize_record", "verify_unbiasedness",
]
