"""Catastrophe chains: model definitions and their analytic quantities."""

from app.chain.model import (
    ChainClassification,
    ModelKind,
    ModelSpec,
    RateLayer,
    Recurrence,
    classify,
    disaster_prob,
    drift_and_variance,
    drift_ratio,
    growth_prob,
    is_recurrent,
    jump_rate,
    model_a,
    model_b,
)
from app.chain.laws import PmfTable, pareto_pmf, sibuya_pmf, thinned_sibuya_pmf
from app.chain.stationary import (
    CriterionReport,
    criteria,
    invariant_ct,
    invariant_dt,
    stationary_moment,
    stationary_pgf,
)
from app.chain.hitting import (
    HeightLaw,
    extinction_prob,
    extinction_prob_series,
    height_law,
    mean_return_time,
    psi0,
    return_time_pgf,
    return_time_pmf,
    scale_function,
)
from app.chain.green import (
    ContactAsymptote,
    contact_asymptote,
    contact_probability,
    first_return_pgf_at,
    green_diag,
    green_kernel,
)
from app.chain.continuous import (
    ExplosionReport,
    HypoexpLaw,
    ct_excursion_tail_exponent,
    excursion_survival_given_height,
    explosion_report,
)

__all__ = [
    "ChainClassification",
    "ModelKind",
    "ModelSpec",
    "RateLayer",
    "Recurrence",
    "classify",
    "disaster_prob",
    "drift_and_variance",
    "drift_ratio",
    "growth_prob",
    "is_recurrent",
    "jump_rate",
    "model_a",
    "model_b",
    "PmfTable",
    "pareto_pmf",
    "sibuya_pmf",
    "thinned_sibuya_pmf",
    "CriterionReport",
    "criteria",
    "invariant_ct",
    "invariant_dt",
    "stationary_moment",
    "stationary_pgf",
    "HeightLaw",
    "extinction_prob",
    "extinction_prob_series",
    "height_law",
    "mean_return_time",
    "psi0",
    "return_time_pgf",
    "return_time_pmf",
    "scale_function",
    "ContactAsymptote",
    "contact_asymptote",
    "contact_probability",
    "first_return_pgf_at",
    "green_diag",
    "green_kernel",
    "ExplosionReport",
    "HypoexpLaw",
    "ct_excursion_tail_exponent",
    "excursion_survival_given_height",
    "explosion_report",
]
