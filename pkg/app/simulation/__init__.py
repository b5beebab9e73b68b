"""Seed-deterministic Monte Carlo for the catastrophe chains."""

from app.simulation.rng import RunConfig, replication_streams, run_replications
from app.simulation.trajectories import (
    ESCAPED,
    CtTrajectory,
    DtTrajectory,
    ExcursionSample,
    simulate_ct,
    simulate_dt,
    simulate_excursions,
)
from app.simulation.samplers import (
    JumpLaw,
    ct_excursion_lengths,
    draw_heights,
    limit_law_id_generator,
    limit_law_sd_generator,
    zipf_inverse_sampler,
    zipf_prime_sampler,
)
from app.simulation.statistics import (
    Estimate,
    drift_time_transient,
    hill_tail_exponent,
    hit_frequency,
    occupation_and_recurrence_stats,
    renewal_delta_stats,
)

__all__ = [
    "RunConfig",
    "replication_streams",
    "run_replications",
    "ESCAPED",
    "CtTrajectory",
    "DtTrajectory",
    "ExcursionSample",
    "simulate_ct",
    "simulate_dt",
    "simulate_excursions",
    "JumpLaw",
    "ct_excursion_lengths",
    "draw_heights",
    "limit_law_id_generator",
    "limit_law_sd_generator",
    "zipf_inverse_sampler",
    "zipf_prime_sampler",
    "Estimate",
    "drift_time_transient",
    "hill_tail_exponent",
    "hit_frequency",
    "occupation_and_recurrence_stats",
    "renewal_delta_stats",
]
