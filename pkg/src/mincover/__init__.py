"""Exact minimal-cover enumeration and weight bounds for uniform set families."""
import logging

from .family import (
    ApproxWeight,
    FamilyError,
    SetFamily,
    UncoverableError,
    is_intersecting,
    is_uniform,
    pairwise_intersection_profile,
    restrict_avoiding,
    weight,
)
from .report import VerdictReport, VerificationError
from .transversal import (
    BudgetExceeded,
    CoverFamily,
    c_weight,
    enumerate_minimal_covers,
    is_cover,
    is_maximal_intersecting,
    is_minimal_cover,
    is_tau_critical,
    tau,
    tau_criticalize,
)

logging.getLogger(__name__).addHandler(logging.NullHandler())

__all__ = [
    "ApproxWeight",
    "BudgetExceeded",
    "CoverFamily",
    "FamilyError",
    "SetFamily",
    "UncoverableError",
    "VerdictReport",
    "VerificationError",
    "c_weight",
    "enumerate_minimal_covers",
    "is_cover",
    "is_intersecting",
    "is_maximal_intersecting",
    "is_minimal_cover",
    "is_tau_critical",
    "is_uniform",
    "pairwise_intersection_profile",
    "restrict_avoiding",
    "tau",
    "tau_criticalize",
    "weight",
]
