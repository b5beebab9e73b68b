"""Acceptance suites: every analytic result set against an independent oracle.

Each suite takes the effective settings (for the seed and worker count) and
returns a Report whose checks carry the analytic value, the oracle value and
the tolerance applied.
"""

import math
from dataclasses import replace
from typing import Callable

import mpmath
import numpy as np
from rich.console import Console
from scipy import special as sp
from sympy import primerange

from app.chain.green import contact_asymptote, contact_probability, green_kernel
from app.chain.hitting import (
    busy_period_mean,
    extinction_prob,
    extinction_prob_series,
    height_law,
    log_scale_function,
    mean_return_time,
    psi0,
    return_pgf_partial,
    return_time_pgf,
    return_time_pmf,
    return_time_tail,
    scale_function,
    size_biased_return_pmf,
)
from app.chain.model import ModelSpec, Recurrence, classify, disaster_probs, growth_probs, model_a, model_b
from app.chain.stationary import invariant_dt, stationary_moment, stationary_pgf
from app.chain.continuous import ct_excursion_tail_exponent
from app.config import Settings
from app.divisibility.canonical import (
    canonical_sequence,
    first_flip,
    geometric_mixture_canonical,
    geometric_mixture_pmf,
    reconvolve,
    scan_p0,
)
from app.divisibility.thinning import complete_monotonicity_check, sibuya_stationary_special_case
from app.simulation.rng import RunConfig, proportion_and_stderr, replication_streams
from app.simulation.samplers import (
    JumpLaw,
    empirical_pgf,
    id_limit_pgf,
    limit_law_id_generator,
    limit_law_sd_generator,
    sd_limit_pgf,
    zipf_inverse_sampler,
    zipf_prime_sampler,
)
from app.simulation.statistics import (
    Estimate,
    backward_recurrence_law,
    ct_tail_experiment,
    height_agreement_pvalue,
    hit_frequency,
    mean_return_time_estimate,
    occupation_and_recurrence_stats,
    renewal_delta_stats,
    thinning_identity_sample,
)
from app.simulation.trajectories import ESCAPED, pooled_heights, simulate_ct, simulate_excursions
from app.cli.reporter import Report

console = Console(stderr=True)

RECURRENCE_CODES = {
    Recurrence.TRANSIENT: 0,
    Recurrence.NULL_RECURRENT: 1,
    Recurrence.POSITIVE_RECURRENT: 2,
}

# (beta, alpha) -> class, for Model A with nu = 1 and for Model B alike
PHASE_TABLE = {
    (0.5, 0.5): Recurrence.POSITIVE_RECURRENT,
    (0.5, 2.0): Recurrence.POSITIVE_RECURRENT,
    (1.0, 0.5): Recurrence.NULL_RECURRENT,
    (1.0, 2.0): Recurrence.POSITIVE_RECURRENT,
    (2.0, 0.5): Recurrence.TRANSIENT,
    (2.0, 2.0): Recurrence.TRANSIENT,
}


def truncated_transition_matrix(spec: ModelSpec, size: int) -> np.ndarray:
    """Kernel on {0, ..., size-1}; the top state collapses to 0 with probability one."""
    p = growth_probs(spec, size - 1)
    matrix = np.zeros((size, size))
    x = np.arange(size - 1)
    matrix[x, x + 1] = p[:-1]
    matrix[x, 0] += 1.0 - p[:-1]
    matrix[size - 1, 0] = 1.0
    return matrix


def propagate_from_zero(spec: ModelSpec, nmax: int) -> np.ndarray:
    """P_0(X_n = 0) for n = 0..nmax, pushing the law of X_n forward one step at a time."""
    p = growth_probs(spec, nmax)
    q = disaster_probs(spec, nmax)
    law = np.zeros(nmax + 1)
    law[0] = 1.0
    out = np.empty(nmax + 1)
    out[0] = 1.0
    for n in range(1, nmax + 1):
        # X_{n-1} <= n - 1
        collapse = math.fsum(law[:n] * q[:n])
        law[1 : n + 1] = law[:n] * p[:n]
        law[0] = collapse
        out[n] = collapse
    return out


def _run_config(settings: Settings, horizon: float, **overrides) -> RunConfig:
    return RunConfig.from_settings(settings, horizon=horizon, **overrides)


def _with_exact(estimate: Estimate, exact: float) -> Estimate:
    return replace(estimate, exact=exact)


def classification_suite(settings: Settings) -> Report:
    report = Report("verify-classification", index_name="cell")
    labels = []
    for kind, build in (("A", lambda a, b: model_a(a, 1.0, beta=b)), ("B", lambda a, b: model_b(a, beta=b))):
        for (beta, alpha), expected in PHASE_TABLE.items():
            verdict = classify(build(alpha, beta)).recurrence
            label = f"model {kind} beta={beta:g} alpha={alpha:g}"
            labels.append(label)
            report.add_row(len(report.rows), RECURRENCE_CODES[verdict], RECURRENCE_CODES[expected])
            report.check(label, RECURRENCE_CODES[verdict], RECURRENCE_CODES[expected], 0)

    for lam, expected in ((0.4, Recurrence.NULL_RECURRENT), (0.8, Recurrence.POSITIVE_RECURRENT)):
        verdict = classify(model_b(0.5).with_rates(lam)).recurrence
        label = f"CT beta=1 alpha=0.5 lambda={lam:g}"
        labels.append(label)
        report.add_row(len(report.rows), RECURRENCE_CODES[verdict], RECURRENCE_CODES[expected])
        report.check(label, RECURRENCE_CODES[verdict], RECURRENCE_CODES[expected], 0)

    for lam, expected in ((0.5, False), (2.0, True)):
        explosive = classify(model_b(1.0, beta=2.0).with_rates(lam)).ct_explosive
        label = f"CT beta=2 lambda={lam:g} explosive"
        labels.append(label)
        report.add_row(len(report.rows), int(explosive), int(expected))
        report.check(label, int(explosive), int(expected), 0)

    report.summary = {"cells": labels, "codes": {r.value: c for r, c in RECURRENCE_CODES.items()}}
    return report


def mean_return_suite(settings: Settings) -> Report:
    report = Report("verify-mean-return", index_name="case")
    cases = [
        ("model A alpha=2 nu=1", model_a(2.0, 1.0), 1.0 + 1.0 / (2.0 - 1.0)),
        ("model B alpha=2", model_b(2.0), 1.0 + float(sp.zeta(2.0))),
    ]
    config = _run_config(settings, 1_000_000)
    for index, (label, spec, closed) in enumerate(cases):
        mu = mean_return_time(spec)
        by_pmf = return_time_pmf(spec, 1_000_000).mean()
        estimate = _with_exact(mean_return_time_estimate(spec, config), closed)
        report.add_row(index, mu, by_pmf, estimate.value, estimate.stderr)
        report.check(f"{label}: closed form", mu, closed, 1e-12)
        report.check(f"{label}: sum of tau P(tau)", by_pmf, closed, 1e-4)
        report.check_estimate(f"{label}: Monte Carlo", estimate)
    report.summary = {"cases": [c[0] for c in cases]}
    return report


def green_suite(settings: Settings, order: int = 25, states: int = 60) -> Report:
    report = Report("verify-green", index_name="n")
    for label, spec in (("model A alpha=1.5 nu=1", model_a(1.5, 1.0)), ("model B alpha=1.5", model_b(1.5))):
        matrix = truncated_transition_matrix(spec, states)
        powers = [np.eye(states)]
        for _ in range(order):
            powers.append(powers[-1] @ matrix)
        worst = 0.0
        for x in range(6):
            for y in range(6):
                coeffs = green_kernel(spec, x, y, order).coeffs
                oracle = np.array([power[x, y] for power in powers])
                worst = max(worst, float(np.max(np.abs(coeffs - oracle))))
                if x == 0 and y == 0 and not report.rows:
                    for n in range(order + 1):
                        report.add_row(n, coeffs[n], oracle[n])
        report.check(f"{label}: max |g_xy[n] - P^n(x,y)|, x,y<=5, n<={order}", worst, 0.0, 1e-10)
    report.summary = {"rows": "model A g_00 coefficients against P^n(0,0)"}
    return report


def contact_suite(settings: Settings) -> Report:
    report = Report("verify-contact", index_name="n")

    for label, spec, pi0 in (
        ("model B alpha=2", model_b(2.0), 1.0 / (1.0 + float(sp.zeta(2.0)))),
        ("model A alpha=2 nu=2", model_a(2.0, 2.0), 1.0 / (1.0 + 2.0 / (2.0 - 1.0))),
    ):
        u = contact_probability(spec, 10_000)
        report.check(f"{label}: P_0(X_n=0) at n=1e4 vs pi_0", u[-1], pi0, 1e-3)

    spec = model_b(0.5)
    u = contact_probability(spec, 10_000)
    ns = np.unique(np.logspace(3, 4, 25).astype(int))
    slope = float(np.polyfit(np.log(ns), np.log(u[ns]), 1)[0])
    report.check("model B alpha=0.5: log-log slope on [1e3, 1e4]", slope, -(1.0 - 0.5), 0.05)
    asymptote = contact_asymptote(spec)
    for n in np.unique(np.logspace(0, 4, 41).astype(int)):
        report.add_row(int(n), asymptote.predict(float(n)), u[n])

    spec = model_a(1.0, 1.0)
    n = 100_000
    u_n = contact_probability(spec, n)[-1]
    asymptote = contact_asymptote(spec)
    refined = asymptote.predict_refined(n) * math.log(n)
    report.check("model A alpha=1 nu=1: log(n) P_0(X_n=0) at n=1e5 (second-order form)",
                 refined, u_n * math.log(n), 0.1 * refined)
    report.summary = {
        "rows": "model B alpha=0.5, leading asymptote against the renewal series",
        "alpha_one_leading_constant": asymptote.constant,
        "alpha_one_log_n_times_u": u_n * math.log(n),
    }
    return report


def duality_suite(settings: Settings, hmax: int = 1000) -> Report:
    report = Report("verify-duality", index_name="h")
    cases = [
        ("model A alpha=2 nu=2 beta=1", model_a(2.0, 2.0)),
        ("model A alpha=0.5 nu=1 beta=0.5", model_a(0.5, 1.0, beta=0.5)),
        ("model A alpha=1 nu=1 beta=2", model_a(1.0, 1.0, beta=2.0)),
        ("model B alpha=2 beta=1", model_b(2.0)),
        ("model B alpha=0.5 beta=0.5", model_b(0.5, beta=0.5)),
        ("model B alpha=1 beta=2", model_b(1.0, beta=2.0)),
    ]
    for index, (label, spec) in enumerate(cases):
        law = height_law(spec, hmax)
        log_phi = log_scale_function(spec, hmax)
        survival = np.array([law.survival(h) for h in range(1, hmax + 1)])
        error = float(np.max(np.abs(np.log(survival) + log_phi[1:])))
        report.check(f"{label}: max |log P(H>=h) + log phi(h)|, h<={hmax}", error, 0.0, 1e-12)
        if index == 0:
            for h in (1, 2, 5, 10, 20, 50, 100, 200, 500, 1000):
                report.add_row(h, law.survival(h), 1.0 / scale_function(spec, h))
    report.summary = {"rows": cases[0][0]}
    return report


def extinction_suite(settings: Settings, xmax: int = 50) -> Report:
    report = Report("verify-extinction", index_name="x")
    config = _run_config(settings, 1_000_000)
    for label, spec, simulate in (
        ("model A alpha=1 nu=1 beta=2", model_a(1.0, 1.0, beta=2.0), False),
        ("model B alpha=1 beta=2", model_b(1.0, beta=2.0), True),
    ):
        closed = np.array([extinction_prob(spec, x) for x in range(xmax + 1)])
        series = np.array([extinction_prob_series(spec, x) for x in range(xmax + 1)])
        report.check(f"{label}: product vs series, x<={xmax}", float(np.max(np.abs(closed - series))), 0.0, 1e-10)
        if not simulate:
            continue
        frequencies = hit_frequency(spec, (1, 5, 20), config)
        for x in range(xmax + 1):
            estimate = frequencies.get(x)
            report.add_row(x, closed[x], series[x],
                           estimate.value if estimate else None, estimate.stderr if estimate else None)
        for x, estimate in frequencies.items():
            report.check_estimate(f"{label}: hit frequency from x={x}", estimate)
    report.summary = {"rows": "model B alpha=1 beta=2"}
    return report


def ct_tail_suite(settings: Settings) -> Report:
    report = Report("verify-ct-tail", index_name="case")
    spec = model_b(0.5).with_rates(0.5, 1.0)
    exponent = ct_excursion_tail_exponent(spec).exponent
    estimate = ct_tail_experiment(spec, _run_config(settings, 1_000_000))
    report.add_row(0, exponent, None, estimate.value, estimate.stderr)
    report.check_range("beta=1 alpha=0.5 lambda=0.5: Hill exponent of CT durations",
                       estimate.value, 0.85, 1.15, exponent)

    matched = model_b(2.0).with_rates(0.5)
    dt = simulate_excursions(matched, _run_config(settings, 20_000))
    ct = pooled_heights(simulate_ct(matched, _run_config(settings, 20_000.0, seed=settings.seed + 1)))
    pvalue = height_agreement_pvalue(dt[dt != ESCAPED], ct)
    report.check_range("model B alpha=2 lambda=0.5: CT vs DT heights, chi-square p-value",
                       pvalue, 0.01, 1.0, 0.5)
    report.summary = {"tail_exponent": exponent, "height_agreement_pvalue": pvalue}
    return report


def divisibility_suite(settings: Settings, n: int = 50) -> Report:
    report = Report("verify-divisibility", index_name="p0")
    grid = [round(0.01 * k, 2) for k in range(1, 101)]

    def factory(p0: float) -> ModelSpec:
        return model_a(1.5, 1.0, p0=p0)

    points = scan_p0(factory, grid, n)
    for point in points:
        special = sibuya_stationary_special_case(1.5, point.p0, n)
        report.add_row(point.p0, int(point.verdict.id), int(special.id))
    id_flip = first_flip(points, "id")
    sd_flip = first_flip(points, "sd")
    report.check("model A alpha=1.5 nu=1: id threshold in p0", id_flip if id_flip is not None else math.nan, 0.5, 0.02)
    report.check("model A alpha=1.5 nu=1: sd threshold in p0", sd_flip if sd_flip is not None else math.nan, 0.25, 0.02)

    worst = 0.0
    for p0 in grid:
        pmf = invariant_dt(factory(p0), n + 1)
        rebuilt = reconvolve(canonical_sequence(pmf, n))
        worst = max(worst, float(np.max(np.abs(rebuilt - pmf.dense(0)[: n + 2]))))
    report.check("canonical round trip, max error over the grid", worst, 0.0, 1e-10)

    mixture = canonical_sequence(geometric_mixture_pmf(0.3, 0.6, n + 1), n).r
    closed = geometric_mixture_canonical(0.3, 0.6, n)
    report.check("geometric mixture p=0.3 pi0=0.6: canonical sequence", float(np.max(np.abs(mixture - closed))), 0.0, 1e-10)

    agree = all(sibuya_stationary_special_case(1.5, p0, n).agrees for p0 in grid)
    report.check_flag("closed-form thresholds agree with canonical verdicts", agree)
    report.summary = {"id_flip": id_flip, "sd_flip": sd_flip,
                      "columns": "analytic = canonical id verdict, oracle = closed-form id verdict"}
    return report


def monotonicity_suite(settings: Settings, xmax: int = 50, order: int = 5) -> Report:
    report = Report("verify-monotonicity", index_name="x")
    x = np.arange(xmax + 1, dtype=float)
    for alpha in (0.5, 1.0, 1.5):
        result = complete_monotonicity_check((x + 1.0) ** -alpha, order)
        report.check_flag(f"Pareto tail alpha={alpha:g}: alternating differences to order {order}", result.passed)
    tail = (x + 1.0) ** -1.0
    for xi in range(xmax + 1):
        report.add_row(xi, tail[xi])
    return report


def limit_laws_suite(settings: Settings, r: float = 2.0, t: float = 10.0) -> Report:
    report = Report("verify-limit-laws", index_name="z")
    config = _run_config(settings, 100_000)
    for label, jumps in (("h=(d1+d2)/2", JumpLaw.from_mapping({1: 0.5, 2: 0.5})), ("h=d1", JumpLaw.unit())):
        id_samples = limit_law_id_generator(r, jumps, t, config)
        sd_samples = limit_law_sd_generator(r, jumps, t, config)
        for z in (0.2, 0.5, 0.8):
            for kind, samples, exact in (("id", id_samples, id_limit_pgf(r, jumps, z)),
                                         ("sd", sd_samples, sd_limit_pgf(r, jumps, z))):
                value, stderr = empirical_pgf(samples, z)
                if jumps.masses.size == 2:
                    exact_poisson = math.exp(-r * (1.0 - z))
                    report.check(f"{label} {kind}: limit pgf is Poisson({r:g}) at z={z:g}", exact, exact_poisson, 1e-9)
                else:
                    report.add_row(z, exact, None, value, stderr)
                report.check_estimate(f"{label} {kind}: empirical pgf at z={z:g}", Estimate(value, stderr, exact))
    report.summary = {"r": r, "t": t, "rows": "h=(d1+d2)/2, id then sd at each z"}
    return report


def renewal_suite(settings: Settings, xmax: int = 50) -> Report:
    report = Report("verify-renewal", index_name="x")
    for label, spec in (("model B alpha=2", model_b(2.0)), ("model A alpha=2 nu=2", model_a(2.0, 2.0))):
        pi = invariant_dt(spec, 100).masses
        renewal = return_time_tail(spec, 100) / mean_return_time(spec)
        report.check(f"{label}: pi_x vs P(tau > x) / mu", float(np.max(np.abs(pi - renewal))), 0.0, 1e-10)

    spec = model_b(2.0)
    backward = backward_recurrence_law(spec, _run_config(settings, 10_000_000), xmax)
    report.check("model B alpha=2: backward recurrence law, TV to pi", backward.tv, 0.0, 0.01)
    thinned = thinning_identity_sample(spec, _run_config(settings, 1_000_000), xmax)
    report.check("model B alpha=2: U o (tau_inf - 1), TV to pi", thinned.tv, 0.0, 0.01)
    for x in range(xmax + 1):
        report.add_row(x, backward.exact[x], thinned.empirical[x], backward.empirical[x])

    size_biased = size_biased_return_pmf(spec, 1 << 16)
    report.check("model B alpha=2: size-biased return law sums to one",
                 size_biased.total() + size_biased.tail_mass_bound, 1.0, 1e-8)

    stats = renewal_delta_stats(model_b(3.0, p0=0.5), _run_config(settings, 1_000_000))
    report.check_estimate("model B alpha=3 p0=0.5: idle period mean", stats.idle)
    report.check_estimate("model B alpha=3 p0=0.5: busy period mean", stats.busy)
    report.check_estimate("model B alpha=3 p0=0.5: renewal delta mean", stats.delta)
    if stats.correlation is not None:
        # roughly half of the 1e6 excursions are true ones
        report.check("model B alpha=3 p0=0.5: idle/busy correlation", stats.correlation, 0.0,
                     5.0 / math.sqrt(500_000))
    report.summary = {"rows": "model B alpha=2: oracle = thinning identity, mc = backward recurrence",
                      "idle_busy_correlation": stats.correlation}
    return report


def critical_model_a_suite(settings: Settings) -> Report:
    report = Report("verify-critical-modelA", index_name="x")
    report.check("alpha=2 nu=1: true excursion mean", busy_period_mean(model_a(2.0, 1.0)), 2.0, 1e-12)

    spec = model_a(2.0, 2.0)
    report.check("alpha=2 nu=2: mean return time", mean_return_time(spec), 3.0, 1e-12)

    curved = model_a(1.5, 2.0)
    for z in (0.2, 0.5, 0.9):
        oracle = 1.5 * z / 3.0 * float(sp.hyp2f1(1.0, 1.5, 4.0, z))
        report.check(f"alpha=1.5 nu=2: psi0({z:g}) vs scipy hyp2f1", psi0(curved, z), oracle, 1e-10)
        report.check(f"alpha=1.5 nu=2: return pgf closed form vs series at z={z:g}",
                     return_time_pgf(curved, z).value, return_pgf_partial(curved, z).value, 1e-9)

    pi = invariant_dt(spec, 2000)
    z = 0.5
    by_series = math.fsum(pi.masses * z ** np.arange(pi.masses.size))
    report.check("alpha=2 nu=2: stationary pgf at z=0.5", stationary_pgf(spec, z), by_series, 1e-10)

    estimate = _with_exact(mean_return_time_estimate(spec, _run_config(settings, 100_000)), 3.0)
    report.check_estimate("alpha=2 nu=2: Monte Carlo mean return time", estimate)

    occupation = occupation_and_recurrence_stats(spec, _run_config(settings, 1_000_000), x=1, ys=(2, 3))
    for y, ratio in occupation.visit_ratios.items():
        report.check_estimate(f"alpha=2 nu=2: visits to {y} over visits to 1", ratio)
    for y, visits in occupation.visits_per_excursion.items():
        report.check_estimate(f"alpha=2 nu=2: visits to {y} per excursion", visits)

    renewal = return_time_tail(spec, 20) / mean_return_time(spec)
    for x in range(21):
        report.add_row(x, pi.masses[x], renewal[x])
    report.summary = {"rows": "alpha=2 nu=2: pi_x against P(tau > x) / mu"}
    return report


def critical_model_b_suite(settings: Settings) -> Report:
    report = Report("verify-critical-modelB", index_name="x")
    spec = model_b(2.0)
    zeta2 = float(sp.zeta(2.0))
    pi = invariant_dt(spec, 100)
    report.check("alpha=2: pi_0 = 1 / (1 + zeta(2))", pi.masses[0], 1.0 / (1.0 + zeta2), 1e-12)
    report.check("alpha=2: pi_1 = pi_0 p0", pi.masses[1], 1.0 / (1.0 + zeta2), 1e-12)
    report.check("alpha=2: mean return time", mean_return_time(spec), 1.0 + zeta2, 1e-12)

    for z in (0.3, 0.7):
        oracle = 1.0 - (1.0 - z) * float(mpmath.polylog(2, z)) / z
        report.check(f"alpha=2: psi0({z:g}) vs mpmath polylog", psi0(spec, z), oracle, 1e-10)
        report.check(f"alpha=2: return pgf closed form vs series at z={z:g}",
                     return_time_pgf(spec, z).value, return_pgf_partial(spec, z).value, 1e-9)

    cubic = model_b(3.0)
    table = invariant_dt(cubic, 1_000_000)
    by_series = math.fsum(table.support.astype(float) ** 0.5 * table.masses)
    report.check("alpha=3: E X^0.5 closed form vs series", stationary_moment(cubic, 0.5), by_series, 1e-6)

    estimate = _with_exact(mean_return_time_estimate(spec, _run_config(settings, 100_000)), 1.0 + zeta2)
    report.check_estimate("alpha=2: Monte Carlo mean return time", estimate)
    occupation = occupation_and_recurrence_stats(spec, _run_config(settings, 1_000_000), x=1, ys=(2,))
    report.check_estimate("alpha=2: visits to 2 over visits to 1", occupation.visit_ratios[2])

    config = _run_config(settings, 100_000)
    primes = np.array(list(primerange(2, config.prime_max + 1)), dtype=float)
    smooth_one = float(np.prod(1.0 - primes ** -2.0))
    draws = zipf_prime_sampler(2.0, config)
    for y, exact in ((1, smooth_one), (2, smooth_one * 2.0 ** -2.0)):
        value, stderr = proportion_and_stderr(int(np.count_nonzero(draws == y)), draws.size)
        report.check_estimate(f"alpha=2: prime-product sampler P(Y={y})", Estimate(value, stderr, exact))
    inverse = zipf_inverse_sampler(2.0, 100_000, replication_streams(config.seed, 0).jump)
    value, stderr = proportion_and_stderr(int(np.count_nonzero(inverse == 1)), inverse.size)
    report.check_estimate("alpha=2: inverse-cdf sampler P(Y=1) = 1/zeta(2)", Estimate(value, stderr, 1.0 / zeta2))

    renewal = return_time_tail(spec, 20) / mean_return_time(spec)
    for x in range(21):
        report.add_row(x, pi.masses[x], renewal[x])
    report.summary = {"rows": "alpha=2: pi_x against P(tau > x) / mu"}
    return report


SUITES: dict[str, Callable[[Settings], Report]] = {
    "classification": classification_suite,
    "mean-return": mean_return_suite,
    "green": green_suite,
    "contact": contact_suite,
    "duality": duality_suite,
    "extinction": extinction_suite,
    "ct-tail": ct_tail_suite,
    "divisibility": divisibility_suite,
    "monotonicity": monotonicity_suite,
    "limit-laws": limit_laws_suite,
    "renewal": renewal_suite,
    "critical-modelA": critical_model_a_suite,
    "critical-modelB": critical_model_b_suite,
}


def run_suite(name: str, settings: Settings) -> list[Report]:
    """Reports of one suite, or of every suite in order for "all"."""
    names = list(SUITES) if name == "all" else [name]
    reports = []
    for suite in names:
        console.print(f"[blue]Running suite {suite}...[/blue]")
        reports.append(SUITES[suite](settings))
    return reports
