"""Infinite divisibility and discrete self-decomposability diagnostics."""

from app.divisibility.canonical import (
    CanonicalSequence,
    DivisibilityVerdict,
    canonical_sequence,
    classify_divisibility,
    geometric_mixture_canonical,
    is_log_convex,
    reconvolve,
    scan_p0,
)
from app.divisibility.thinning import (
    MonotonicityResult,
    SibuyaSpecialCase,
    complete_monotonicity_check,
    sibuya_stationary_special_case,
    thinning_remainder,
)

__all__ = [
    "CanonicalSequence",
    "DivisibilityVerdict",
    "canonical_sequence",
    "classify_divisibility",
    "geometric_mixture_canonical",
    "is_log_convex",
    "reconvolve",
    "scan_p0",
    "MonotonicityResult",
    "SibuyaSpecialCase",
    "complete_monotonicity_check",
    "sibuya_stationary_special_case",
    "thinning_remainder",
]
