import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal
from sympy import primerange

from app.chain.hitting import escape_probability, mean_return_time
from app.chain.model import model_a, model_b
from app.chain.stationary import invariant_dt
from app.errors import DomainError, MissingRateLayerError, UnsupportedRegimeError
from app.simulation.rng import RunConfig, mean_and_stderr, proportion_and_stderr, replication_streams
from app.simulation.samplers import (
    JumpLaw,
    ct_excursion_lengths,
    draw_heights,
    empirical_pgf,
    id_limit_pgf,
    limit_law_id_generator,
    limit_law_sd_generator,
    sd_finite_time_pgf,
    zipf_inverse_sampler,
    zipf_prime_sampler,
)
from app.simulation.statistics import (
    HIT_TOLERANCE,
    hill_tail_exponent,
    hit_frequency,
    mean_return_time_estimate,
    renewal_delta_stats,
)
from app.simulation.trajectories import ESCAPED, pooled_visits, simulate_ct, simulate_dt, simulate_excursions

SIGMAS = 5.0


def assert_within(value, stderr, exact, sigmas=SIGMAS):
    assert abs(value - exact) <= sigmas * stderr, f"{value} vs {exact} (stderr {stderr})"


class TestStreams:
    def test_same_seed_same_draws(self):
        a = replication_streams(42, 3)
        b = replication_streams(42, 3)
        assert_array_equal(a.jump.random(5), b.jump.random(5))
        assert_array_equal(a.clock.random(5), b.clock.random(5))

    def test_streams_are_distinct(self):
        first, second = replication_streams(42, 0), replication_streams(42, 1)
        assert not np.array_equal(first.jump.random(5), second.jump.random(5))
        streams = replication_streams(42, 0)
        assert not np.array_equal(streams.jump.random(5), streams.clock.random(5))

    def test_results_do_not_depend_on_workers(self):
        spec = model_b(2.0)
        serial = simulate_excursions(spec, RunConfig(seed=9, horizon=2000, replications=4, workers=1))
        pooled = simulate_excursions(spec, RunConfig(seed=9, horizon=2000, replications=4, workers=4))
        assert_array_equal(serial, pooled)

    def test_config_validation(self):
        with pytest.raises(DomainError):
            RunConfig(replications=0)
        with pytest.raises(DomainError):
            RunConfig(horizon=0)
        with pytest.raises(DomainError):
            RunConfig(horizon=math.inf).steps

    def test_from_settings_ignores_unset_overrides(self, tmp_settings):
        config = RunConfig.from_settings(tmp_settings, horizon=100, replications=None)
        assert config.seed == 11
        assert config.replications == 1
        assert config.steps == 100

    def test_summaries(self):
        mean, stderr = mean_and_stderr([1.0, 2.0, 3.0])
        assert mean == 2.0
        assert_allclose(stderr, 1.0 / math.sqrt(3))
        assert math.isnan(mean_and_stderr([])[0])
        assert_allclose(proportion_and_stderr(25, 100), (0.25, math.sqrt(0.25 * 0.75 / 100)))


class TestExcursions:
    def test_mean_return_time(self):
        spec = model_b(3.0)
        estimate = mean_return_time_estimate(spec, RunConfig(seed=1, horizon=20_000))
        assert_within(estimate.value, estimate.stderr, mean_return_time(spec))

    def test_trivial_excursions(self):
        heights = simulate_excursions(model_b(2.0, p0=0.5), RunConfig(seed=2, horizon=20_000))
        p, stderr = proportion_and_stderr(int(np.count_nonzero(heights == 0)), heights.size)
        assert_within(p, stderr, 0.5)

    def test_inverse_heights_match_the_survival_product(self):
        heights = draw_heights(model_b(2.0), 20_000, np.random.default_rng(3))
        p, stderr = proportion_and_stderr(int(np.count_nonzero(heights >= 3)), heights.size)
        assert_within(p, stderr, 1.0 / 9.0)

    def test_transient_heights_escape(self):
        spec = model_b(1.0, beta=2.0)
        heights = draw_heights(spec, 20_000, np.random.default_rng(4))
        p, stderr = proportion_and_stderr(int(np.count_nonzero(heights == ESCAPED)), heights.size)
        assert_within(p, stderr, escape_probability(spec))

    def test_simulated_transient_excursions_escape(self):
        spec = model_b(1.0, beta=2.0)
        heights = simulate_excursions(spec, RunConfig(seed=6, horizon=5000))
        p, stderr = proportion_and_stderr(int(np.count_nonzero(heights == ESCAPED)), heights.size)
        assert_within(p, stderr, math.pi / math.sinh(math.pi))

    def test_conditioned_heights(self):
        heights = draw_heights(model_b(2.0), 1000, np.random.default_rng(5), at_least=4)
        assert heights.min() >= 4
        with pytest.raises(DomainError):
            draw_heights(model_a(2.0, nu=1.0), 10, np.random.default_rng(5), at_least=2)

    def test_renewal_decomposition(self):
        spec = model_b(3.0, p0=0.5)
        stats = renewal_delta_stats(spec, RunConfig(seed=6, horizon=20_000))
        for estimate in (stats.idle, stats.busy, stats.delta):
            assert_within(estimate.value, estimate.stderr, estimate.exact)
        with pytest.raises(UnsupportedRegimeError):
            renewal_delta_stats(model_b(1.0), RunConfig(horizon=10))


class TestTrajectories:
    def test_visits_cover_every_step(self):
        runs = simulate_dt(model_b(2.0), RunConfig(seed=7, horizon=5000, replications=2))
        assert len(runs) == 2
        for run in runs:
            assert run.visits.sum() == 5001

    def test_start_above_zero(self):
        run = simulate_dt(model_b(2.0), RunConfig(seed=7, horizon=5000), start=5)[0]
        assert run.first_passage is not None
        assert run.visits.sum() == 5001
        with pytest.raises(DomainError):
            simulate_dt(model_b(2.0), RunConfig(horizon=10), start=-1)

    def test_occupation_frequencies(self):
        spec = model_b(3.0)
        visits = pooled_visits(simulate_dt(spec, RunConfig(seed=8, horizon=200_000, replications=4)))
        pi = invariant_dt(spec, 3).masses
        assert_allclose(visits[:4] / visits.sum(), pi, atol=0.01)

    def test_continuous_time_run(self):
        spec = model_b(2.0).with_rates(0.5)
        run = simulate_ct(spec, RunConfig(seed=9, horizon=500.0))[0]
        assert run.stopped_by == "horizon"
        assert run.time == 500.0
        assert not run.anomaly
        assert run.heights.size == run.ct_lengths.size
        assert np.all(run.ct_lengths > 0)
        assert run.ct_lengths.sum() <= 500.0

    def test_continuous_time_needs_rates(self):
        with pytest.raises(MissingRateLayerError):
            simulate_ct(model_b(2.0), RunConfig(horizon=10.0))

    def test_excursion_durations(self):
        spec = model_b(2.0).with_rates(1.0, 2.0)
        lengths = ct_excursion_lengths(spec, np.full(20_000, 2), np.random.default_rng(10))
        mean, stderr = mean_and_stderr(lengths)
        assert_within(mean, stderr, 0.5 * (1.0 + 1.0 / 2.0 + 1.0 / 3.0))
        assert np.isnan(ct_excursion_lengths(spec, np.array([ESCAPED]), np.random.default_rng(10))[0])


class TestHitting:
    def test_hit_frequency(self):
        spec = model_b(1.0, beta=2.0)
        estimates = hit_frequency(spec, [1, 5], RunConfig(seed=12, horizon=20_000))
        for estimate in estimates.values():
            assert 0.0 < estimate.bias_bound <= HIT_TOLERANCE
            assert estimate.value <= estimate.exact + SIGMAS * estimate.stderr
            assert abs(estimate.value - estimate.exact) <= SIGMAS * estimate.stderr + estimate.bias_bound

    def test_survivors_count_as_misses(self):
        spec = model_b(1.0, beta=2.0)
        estimate = hit_frequency(spec, [1], RunConfig(seed=12, horizon=20_000), tolerance=1.0)[1]
        assert_within(estimate.value, estimate.stderr, 0.5)
        assert estimate.bias_bound > 0.1
        assert estimate.within(SIGMAS)

    def test_recurrent_walkers_all_resolve(self):
        estimate = hit_frequency(model_b(2.0), [3], RunConfig(seed=12, horizon=5000))[3]
        assert estimate.value == 1.0
        assert estimate.bias_bound == 0.0


class TestZipfSamplers:
    def test_inverse_sampler(self):
        draws = zipf_inverse_sampler(2.0, 20_000, np.random.default_rng(13))
        p, stderr = proportion_and_stderr(int(np.count_nonzero(draws == 1)), draws.size)
        assert_within(p, stderr, 6.0 / math.pi ** 2)
        assert draws.min() >= 1

    def test_prime_sampler_is_smooth_zipf(self):
        draws = zipf_prime_sampler(2.0, RunConfig(seed=14, horizon=20_000, prime_max=97))
        primes = np.array(list(primerange(2, 98)), dtype=float)
        expected = math.exp(np.sum(np.log1p(-primes ** -2.0)))
        p, stderr = proportion_and_stderr(int(np.count_nonzero(draws == 1)), draws.size)
        assert_within(p, stderr, expected)

    def test_needs_alpha_above_one(self):
        with pytest.raises(DomainError):
            zipf_inverse_sampler(1.0, 10, np.random.default_rng(0))


class TestLimitLaws:
    def test_compound_poisson(self):
        jumps = JumpLaw.from_mapping({1: 0.5, 2: 0.5})
        samples = limit_law_id_generator(2.0, jumps, 10.0, RunConfig(seed=15, horizon=20_000))
        value, stderr = empirical_pgf(samples, 0.5)
        assert_within(value, stderr, id_limit_pgf(2.0, jumps, 0.5, 10.0))

    def test_immigration_with_unit_jumps_is_poisson(self):
        jumps = JumpLaw.unit()
        samples = limit_law_sd_generator(2.0, jumps, 10.0, RunConfig(seed=16, horizon=20_000))
        value, stderr = empirical_pgf(samples, 0.5)
        assert_within(value, stderr, sd_finite_time_pgf(2.0, jumps, 0.5, 10.0))
        # unit batches of Exp(1) lifetimes: Poisson(2 (1 - e**-10)) at t = 10
        assert_allclose(sd_finite_time_pgf(2.0, jumps, 0.5, 10.0), math.exp(-2.0 * -math.expm1(-10.0) * 0.5),
                        rtol=1e-8)

    def test_horizon_must_be_settled(self):
        with pytest.raises(DomainError):
            limit_law_id_generator(2.0, JumpLaw.unit(), 1.0, RunConfig(horizon=10))

    def test_jump_law_validation(self):
        with pytest.raises(DomainError):
            JumpLaw(np.array([0.5, 0.6]))


class TestHillEstimator:
    def test_pareto_samples(self):
        samples = np.random.default_rng(17).pareto(1.5, 50_000) + 1.0
        estimate = hill_tail_exponent(samples, k=2000)
        assert_within(estimate.value, estimate.stderr, 1.5)

    def test_needs_enough_samples(self):
        with pytest.raises(UnsupportedRegimeError):
            hill_tail_exponent(np.ones(5))
