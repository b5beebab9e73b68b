"""Monte Carlo estimates set against their analytic values."""

import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np
from scipy import stats

from app.chain.hitting import busy_period_mean, escape_probability, extinction_prob, idle_period_mean
from app.chain.model import ModelSpec, Recurrence, log_survival, recurrence_of
from app.chain.stationary import invariant_dt
from app.errors import UnsupportedRegimeError
from app.simulation.rng import RunConfig, Streams, mean_and_stderr, run_replications
from app.simulation.samplers import (
    ct_excursion_lengths,
    draw_heights,
    first_passage_steps,
    size_biased_sample,
)
from app.simulation.trajectories import (
    ESCAPED,
    DisasterTable,
    pooled_heights,
    pooled_visits,
    simulate_dt,
    simulate_excursions,
)


HIT_TOLERANCE = 1e-3
MAX_HIT_LEVELS = 1 << 16


@dataclass(frozen=True)
class Estimate:
    """Monte Carlo value with its standard error; ``bias_bound`` caps any one-sided truncation bias."""
    value: float
    stderr: float
    exact: Optional[float] = None
    bias_bound: float = 0.0

    @property
    def z_score(self) -> float:
        if self.exact is None or not self.stderr:
            return math.nan
        return (self.value - self.exact) / self.stderr

    def within(self, sigmas: float = 3.0) -> bool:
        return abs(self.value - self.exact) <= sigmas * self.stderr + self.bias_bound


def _require_recurrent(spec: ModelSpec, positive: bool = False):
    recurrence = recurrence_of(spec)
    if spec.confined_to is not None:
        return
    if recurrence is Recurrence.TRANSIENT:
        raise UnsupportedRegimeError("this statistic needs a recurrent chain")
    if positive and recurrence is not Recurrence.POSITIVE_RECURRENT:
        raise UnsupportedRegimeError("this statistic needs a positive recurrent chain")


def hill_tail_exponent(samples: np.ndarray, k: Optional[int] = None) -> Estimate:
    """Hill estimate of the tail exponent from the k largest finite samples."""
    x = np.asarray(samples, dtype=float)
    x = np.sort(x[np.isfinite(x) & (x > 0)])[::-1]
    if k is None:
        k = max(10, x.size // 100)
    if x.size <= k:
        raise UnsupportedRegimeError(f"need more than {k} positive samples, got {x.size}")
    mean_log_excess = math.fsum(np.log(x[:k] / x[k])) / k
    exponent = 1.0 / mean_log_excess
    return Estimate(exponent, exponent / math.sqrt(k))


def mean_return_time_estimate(spec: ModelSpec, config: RunConfig) -> Estimate:
    """Mean of tau_00 = H + 1 over simulated excursions."""
    heights = simulate_excursions(spec, config)
    value, stderr = mean_and_stderr(heights[heights != ESCAPED] + 1)
    return Estimate(value, stderr)


def height_tail_estimate(heights: np.ndarray, h: int, spec: ModelSpec) -> Estimate:
    """Empirical P(H >= h) against prod_{y<h} p_y."""
    heights = np.asarray(heights)
    hits = np.count_nonzero((heights >= h) | (heights == ESCAPED))
    p = hits / heights.size
    return Estimate(p, math.sqrt(max(p * (1 - p), 0.0) / heights.size), math.exp(log_survival(spec, h)[-1]))


@dataclass(frozen=True)
class RenewalDeltaStats:
    """Idle runs of trivial excursions, the true excursion after them, and their sum."""
    idle: Estimate
    busy: Estimate
    delta: Estimate
    correlation: Optional[float]


def renewal_delta_stats(spec: ModelSpec, config: RunConfig) -> RenewalDeltaStats:
    _require_recurrent(spec, positive=True)
    heights = simulate_excursions(spec, config)
    heights = heights[heights != ESCAPED]
    true_excursions = np.flatnonzero(heights >= 1)
    idle = np.diff(np.concatenate(([-1], true_excursions))) - 1
    busy = heights[true_excursions] + 1

    correlation = None
    if idle.size > 1 and idle.std() > 0 and busy.std() > 0:
        correlation = float(np.corrcoef(idle, busy)[0, 1])

    idle_exact = idle_period_mean(spec)
    busy_exact = busy_period_mean(spec)
    return RenewalDeltaStats(
        Estimate(*mean_and_stderr(idle), idle_exact),
        Estimate(*mean_and_stderr(busy), busy_exact),
        Estimate(*mean_and_stderr(idle + busy), idle_exact + busy_exact),
        correlation,
    )


@dataclass(frozen=True)
class OccupationReport:
    visit_ratios: dict
    visits_per_excursion: dict


def occupation_and_recurrence_stats(spec: ModelSpec, config: RunConfig, x: int = 1,
                                    ys: Iterable[int] = (1, 2, 3)) -> OccupationReport:
    """Visit-count ratios N_y / N_x against pi_y / pi_x, and E N_{0,y} per excursion against prod p."""
    _require_recurrent(spec)
    ys = list(ys)
    trajectories = simulate_dt(spec, config)
    log_u = log_survival(spec, max(ys + [x]))

    def ratio(t, y):
        return t.visits[y] / t.visits[x] if len(t.visits) > max(x, y) and t.visits[x] else math.nan

    visits = pooled_visits(trajectories)
    heights = pooled_heights(trajectories)
    ratios, per_excursion = {}, {}
    for y in ys:
        pooled = visits[y] / visits[x] if len(visits) > max(x, y) and visits[x] else math.nan
        spread = [ratio(t, y) for t in trajectories]
        stderr = mean_and_stderr([r for r in spread if math.isfinite(r)])[1]
        ratios[y] = Estimate(float(pooled), stderr, math.exp(log_u[y] - log_u[x]))
        counts = (heights >= y).astype(float)
        per_excursion[y] = Estimate(*mean_and_stderr(counts), math.exp(log_u[y]))
    return OccupationReport(ratios, per_excursion)


@dataclass(frozen=True)
class LawComparison:
    empirical: np.ndarray
    exact: np.ndarray
    tv: float


def _compare_laws(samples_or_counts: np.ndarray, exact: np.ndarray, counts: bool = False) -> LawComparison:
    xmax = len(exact) - 1
    if counts:
        total = samples_or_counts.sum()
        observed = np.zeros(xmax + 1)
        upto = min(len(samples_or_counts), xmax + 1)
        observed[:upto] = samples_or_counts[:upto]
    else:
        total = samples_or_counts.size
        observed = np.bincount(samples_or_counts[samples_or_counts <= xmax], minlength=xmax + 1)
    empirical = observed / total
    tail_gap = abs((1.0 - empirical.sum()) - (1.0 - exact.sum()))
    tv = 0.5 * (math.fsum(np.abs(empirical - exact)) + tail_gap)
    return LawComparison(empirical, exact, tv)


def backward_recurrence_law(spec: ModelSpec, config: RunConfig, xmax: int = 50) -> LawComparison:
    """Occupation law of the age X_n (time since the last zero) against pi."""
    _require_recurrent(spec, positive=True)
    visits = pooled_visits(simulate_dt(spec, config))
    return _compare_laws(visits, invariant_dt(spec, xmax).masses, counts=True)


def thinning_identity_sample(spec: ModelSpec, config: RunConfig, xmax: int = 50) -> LawComparison:
    """Law of Binomial(tau_inf - 1, U), U uniform, against pi."""
    _require_recurrent(spec, positive=True)
    size = config.steps

    def task(streams: Streams) -> np.ndarray:
        gen = streams.jump
        tau = size_biased_sample(spec, size, gen).values
        return gen.binomial(tau - 1, gen.random(size))

    samples = np.concatenate(run_replications(config, task))
    return _compare_laws(samples, invariant_dt(spec, xmax).masses)


@dataclass(frozen=True)
class DriftTimeSamples:
    """Last-visit-to-0 times of a transient chain.

    ``returns`` counts excursions that came back after the first hit;
    ``drift_time`` is 0 when the walker never hits 0.
    """
    hit: np.ndarray
    returns: np.ndarray
    drift_time: np.ndarray
    phi_start: float
    phi00: float

    def visits(self) -> np.ndarray:
        return np.where(self.hit, self.returns + 1, 0)


def drift_time_transient(spec: ModelSpec, config: RunConfig, start: int = 1) -> DriftTimeSamples:
    if recurrence_of(spec) is not Recurrence.TRANSIENT or spec.confined_to is not None:
        raise UnsupportedRegimeError("drift time is defined for transient chains")
    size = config.steps

    def task(streams: Streams) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        gen = streams.jump
        if start == 0:
            first = np.zeros(size, dtype=np.int64)
        else:
            first = first_passage_steps(spec, start, size, gen)
        hit = first != ESCAPED
        drift = np.where(hit, first, 0).astype(float)
        returns = np.zeros(size, dtype=np.int64)
        active = np.flatnonzero(hit)
        while active.size:
            tau = first_passage_steps(spec, 0, active.size, gen)
            back = tau != ESCAPED
            drift[active[back]] += tau[back]
            returns[active[back]] += 1
            active = active[back]
        return hit, returns, drift

    parts = run_replications(config, task)
    hit, returns, drift = (np.concatenate([p[i] for p in parts]) for i in range(3))
    phi_start = 1.0 if start == 0 else extinction_prob(spec, start)
    return DriftTimeSamples(hit, returns, drift, phi_start, 1.0 - escape_probability(spec))


def geometric_fit_pvalue(counts: np.ndarray, ratio: float) -> float:
    """Chi-square p-value of counts against P(N = k) = (1 - ratio) ratio**k."""
    counts = np.asarray(counts, dtype=np.int64)
    n = counts.size
    k_top = 1
    while n * (1 - ratio) * ratio ** k_top >= 5 and k_top < 200:
        k_top += 1
    observed = np.bincount(np.minimum(counts, k_top), minlength=k_top + 1)
    k = np.arange(k_top)
    expected = np.concatenate((n * (1 - ratio) * ratio ** k, [n * ratio ** k_top]))
    return float(stats.chisquare(observed, expected).pvalue)


def _resolution_level(spec: ModelSpec, x: int, tolerance: float, max_levels: int) -> int:
    """Level from which a walker still standing hits 0 with probability at most ``tolerance``."""
    span = 1
    while span < max_levels:
        if extinction_prob(spec, x + span) <= tolerance:
            return x + span
        span *= 2
    return x + max_levels


def hit_frequency(spec: ModelSpec, starts: Iterable[int], config: RunConfig,
                  tolerance: float = HIT_TOLERANCE, max_levels: int = MAX_HIT_LEVELS) -> dict[int, Estimate]:
    """Fraction of walkers from x that ever hit 0, against 1 - prod_{y>=x} p_y.

    Each walker climbs until it hits 0 or reaches a level from which the chance
    of still hitting 0 is at most ``tolerance``. Walkers left standing count as
    non-hits, so the estimate is biased low by at most the surviving fraction
    times that chance; this is the ``bias_bound`` of the result.
    """
    starts = list(starts)
    size = config.steps
    stops = {x: _resolution_level(spec, x, tolerance, max_levels) for x in starts}

    def task(streams: Streams) -> dict[int, tuple[int, int, int]]:
        table = DisasterTable(spec)
        out = {}
        for x in starts:
            alive = size
            hits = 0
            for level in range(x, stops[x]):
                if not alive:
                    break
                fail = np.count_nonzero(streams.jump.random(alive) <= table.disaster(level, 1)[0])
                hits += fail
                alive -= fail
            out[x] = (hits, alive, size)
        return out

    parts = run_replications(config, task)
    result = {}
    for x in starts:
        hits = sum(p[x][0] for p in parts)
        alive = sum(p[x][1] for p in parts)
        n = sum(p[x][2] for p in parts)
        value = hits / n
        bias = alive / n * extinction_prob(spec, stops[x]) if alive else 0.0
        result[x] = Estimate(value, math.sqrt(max(value * (1 - value), 0.0) / n), extinction_prob(spec, x), bias)
    return result


def height_agreement_pvalue(first: np.ndarray, second: np.ndarray, bins: int = 16) -> float:
    """Chi-square homogeneity p-value of two height samples, heights >= bins - 1 pooled."""
    a = np.bincount(np.minimum(first, bins - 1), minlength=bins)
    b = np.bincount(np.minimum(second, bins - 1), minlength=bins)
    keep = (a + b) > 0
    return float(stats.chi2_contingency(np.vstack((a[keep], b[keep])))[1])


def ct_tail_experiment(spec: ModelSpec, config: RunConfig, k: Optional[int] = None) -> Estimate:
    """Hill exponent of simulated CT excursion durations."""
    size = config.steps

    def task(streams: Streams) -> np.ndarray:
        heights = draw_heights(spec, size, streams.jump)
        return ct_excursion_lengths(spec, heights, streams.clock)

    return hill_tail_exponent(np.concatenate(run_replications(config, task)), k)
