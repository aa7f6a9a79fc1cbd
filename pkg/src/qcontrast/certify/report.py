"""One-call certification of an experiment record."""

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

from ..coincidence import ExperimentRecord, per_mub_contrasts
from .cglmp import LOCAL_BOUND, cglmp_noisy
from .fidelity import (
    fidelity_bound_two_mub,
    fidelity_exact_from_data,
    k_max_two_mub,
    schmidt_number_from_fidelity,
)
from .steering import steering_functional, steering_test_from_data


@dataclass(frozen=True)
class CertificationReport:
    """Everything certified from one record.

    ``certified_k`` is the all-MUB result when the record is complete and the
    two-MUB result otherwise. Fields that need MUBs absent from the record
    are ``None``. Booleans come with the margin they were decided on.
    """

    d: int
    mub_count: int
    per_mub_q: list
    average_q: float
    fidelity_lower_bound: float
    fidelity_exact: Optional[float]
    certified_k_two_mub: int
    certified_k_all_mub: Optional[int]
    certified_k: int
    steering_violated: Optional[bool]
    steering_margin: Optional[float]
    steering_functional: float
    cglmp_value: float
    cglmp_violated: bool
    cglmp_margin: float
    methods: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)

    def to_json(self, **kwargs):
        kwargs.setdefault("indent", 2)
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


def certify_record(record):
    """Run every criterion that the MUBs in ``record`` allow."""
    if not isinstance(record, ExperimentRecord):
        raise TypeError("expected an ExperimentRecord")
    d = record.d
    qs = per_mub_contrasts(record)
    avg_q = float(sum(qs) / len(qs))
    if math.isnan(avg_q) or avg_q < 1:
        # anticorrelated data carry no entanglement signal
        avg_q = 1.0

    fidelity_exact = k_all = None
    if record.complete:
        fidelity_exact = fidelity_exact_from_data(record)
        k_all = schmidt_number_from_fidelity(min(max(fidelity_exact, -1.0), 1.0), d)
    k_two = k_max_two_mub(avg_q, d)

    violated = margin = None
    try:
        verdict = steering_test_from_data(record.matrix_for(0), record.matrix_for(1), d)
        violated, margin = verdict.violated, verdict.margin
    except KeyError:
        pass

    s_noisy = cglmp_noisy(avg_q, d)
    return CertificationReport(
        d=d,
        mub_count=record.mub_count,
        per_mub_q=[float(q) for q in qs],
        average_q=avg_q,
        fidelity_lower_bound=fidelity_bound_two_mub(avg_q, d),
        fidelity_exact=fidelity_exact,
        certified_k_two_mub=k_two,
        certified_k_all_mub=k_all,
        certified_k=k_all if k_all is not None else k_two,
        steering_violated=violated,
        steering_margin=margin,
        steering_functional=steering_functional(avg_q, d),
        cglmp_value=s_noisy,
        cglmp_violated=bool(s_noisy > LOCAL_BOUND),
        cglmp_margin=s_noisy - LOCAL_BOUND,
        methods={
            "average_q": "mean over MUBs of diagonal mean / off-diagonal mean",
            "fidelity_lower_bound": "two-MUB bound from average Q",
            "fidelity_exact": "all-MUB correlated mass" if k_all is not None else "unavailable",
            "steering": "conditional entropies of MUBs 0 and 1" if violated is not None
            else "unavailable",
            "cglmp": "isotropic weight of average Q times noiseless CGLMP value",
        },
    )
