"""Entanglement certification from a contrast value or from coincidence data."""

from .cglmp import (
    DimensionBound,
    cglmp_bases,
    cglmp_dimension_bound,
    cglmp_functional,
    cglmp_noisy,
    cglmp_quantum_value,
)
from .fidelity import (
    OptimalOperatingPoint,
    fidelity_all_mub_from_contrast,
    fidelity_bound_two_mub,
    fidelity_exact_from_data,
    k_max_all_mub,
    k_max_two_mub,
    optimal_operating_point,
    required_contrast_all_mub,
    required_contrast_two_mub,
    schmidt_number_from_fidelity,
)
from .report import CertificationReport, certify_record
from .steering import (
    SteeringVerdict,
    conditional_entropy,
    steering_functional,
    steering_test_from_data,
    steering_threshold,
)

__all__ = [
    "CertificationReport", "DimensionBound", "OptimalOperatingPoint", "SteeringVerdict",
    "certify_record", "cglmp_bases", "cglmp_dimension_bound", "cglmp_functional",
    "cglmp_noisy", "cglmp_quantum_value", "conditional_entropy",
    "fidelity_all_mub_from_contrast", "fidelity_bound_two_mub", "fidelity_exact_from_data",
    "k_max_all_mub", "k_max_two_mub", "optimal_operating_point", "required_contrast_all_mub",
    "required_contrast_two_mub", "schmidt_number_from_fidelity", "steering_functional",
    "steering_test_from_data", "steering_threshold",
]
