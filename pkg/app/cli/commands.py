"""Command-line subcommands.

Every subcommand builds a Report, prints it, writes ``<command>-<timestamp>``
CSV/JSON artifacts under the configured output directory and, unless
``--no-record`` is given, stores an ExperimentRecord.

Exit codes: 0 success, 1 a failed ``verify`` check, 2 usage or configuration
errors, 3 a parameter outside its domain (the message names the invariant).
"""

import argparse
import math
import time
from typing import Optional

import numpy as np
from rich.console import Console
from rich.markup import escape

from app.chain.continuous import (
    ct_excursion_tail_exponent,
    ct_mean_return_time,
    excursion_survival_given_height,
    explosion_report,
    phase_type_survival,
)
from app.chain.green import (
    MAX_ORDER,
    contact_asymptote,
    contact_probability,
    first_return_pgf_at,
    green_kernel,
    mean_first_return_at,
)
from app.chain.hitting import (
    busy_period_mean,
    escape_probability,
    extinction_prob,
    extinction_prob_series,
    height_law,
    idle_period_mean,
    mean_return_time,
    return_time_pgf,
    return_time_pmf,
    return_time_tail,
)
from app.chain.laws import thinned_sibuya_pmf
from app.chain.model import ModelKind, ModelSpec, Recurrence, classify, jump_rates, recurrence_of
from app.chain.stationary import criteria, invariant_ct, invariant_dt
from app.config import Settings, load_settings
from app.divisibility.canonical import (
    canonical_sequence,
    classify_divisibility,
    first_flip,
    is_log_convex,
    scan_p0,
    shifted_positive_part,
)
from app.divisibility.thinning import sibuya_stationary_special_case, thinning_scan
from app.errors import ConfigError, DisasterError, MissingRateLayerError
from app.simulation.rng import RunConfig, mean_and_stderr, proportion_and_stderr, replication_streams
from app.simulation.samplers import ct_excursion_lengths
from app.simulation.statistics import hit_frequency
from app.simulation.trajectories import ESCAPED, pooled_heights, pooled_visits, simulate_ct, simulate_dt, simulate_excursions
from app.cli.reporter import (
    Report,
    print_checks,
    print_rows,
    print_summary,
    record_experiment,
    timestamp,
    write_artifacts,
)
from app.cli.suites import SUITES, propagate_from_zero, run_suite, truncated_transition_matrix

console = Console(stderr=True)

EXIT_OK = 0
EXIT_FAILED_CHECKS = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3


class UsageError(Exception):
    """Flags parsed but do not make a usable request."""


def build_spec(args: argparse.Namespace) -> ModelSpec:
    if args.model is None or args.alpha is None:
        raise UsageError("--model and --alpha are required for this command")
    spec = ModelSpec(ModelKind(args.model), alpha=args.alpha, beta=args.beta, nu=args.nu, p0=args.p0)
    if args.lam is not None:
        spec = spec.with_rates(args.lam, args.r0)
    return spec


def _with_p0(spec: ModelSpec, p0: float) -> ModelSpec:
    rebuilt = ModelSpec(spec.kind, spec.alpha, spec.beta, spec.nu, p0)
    return rebuilt.with_rates(spec.ct.lam, spec.ct.r0) if spec.ct is not None else rebuilt


def _run_config(settings: Settings, args: argparse.Namespace, horizon: float) -> RunConfig:
    return RunConfig.from_settings(settings, horizon=horizon, replications=getattr(args, "replications", None))


def cmd_classify(args, settings: Settings) -> list[Report]:
    spec = build_spec(args)
    verdict = classify(spec)
    report = Report("classify", spec=spec.describe())
    report.summary = {
        "recurrence": verdict.recurrence.value,
        "ct_explosive": verdict.ct_explosive,
        "confined_to": verdict.confined_to,
        "dt_recurrence": recurrence_of(spec).value,
    }
    print(verdict.recurrence.value)
    return [report]


def cmd_invariant(args, settings: Settings) -> list[Report]:
    spec = build_spec(args)
    table = invariant_ct(spec, args.xmax) if args.ct else invariant_dt(spec, args.xmax)
    report = Report("invariant", spec=spec.describe())

    renewal = None
    if not args.ct and table.normalized:
        renewal = return_time_tail(spec, args.xmax) / mean_return_time(spec)

    mc = None
    if args.steps and not args.ct:
        visits = pooled_visits(simulate_dt(spec, _run_config(settings, args, args.steps)))
        mc = visits / visits.sum()

    for x in range(args.xmax + 1):
        report.add_row(
            x,
            table.masses[x],
            renewal[x] if renewal is not None else None,
            mc[x] if mc is not None and x < mc.size else (0.0 if mc is not None else None),
        )
    report.summary = {
        "normalized": table.normalized,
        "tail_mass_bound": table.tail_mass_bound,
        "criteria": vars(criteria(spec)),
    }
    return [report]


def cmd_return_time(args, settings: Settings) -> list[Report]:
    spec = build_spec(args)
    table = return_time_pmf(spec, args.xmax - 1)
    tail = return_time_tail(spec, args.xmax)
    report = Report("return-time", spec=spec.describe())

    counts = None
    if args.excursions:
        heights = simulate_excursions(spec, _run_config(settings, args, args.excursions))
        finished = heights[heights != ESCAPED]
        counts = np.bincount(finished + 1, minlength=args.xmax + 1)
        total = heights.size

    for x in range(1, args.xmax + 1):
        estimate = stderr = None
        if counts is not None:
            estimate, stderr = proportion_and_stderr(int(counts[x]) if x < counts.size else 0, total)
        report.add_row(x, table.pmf(x), tail[x - 1] - tail[x], estimate, stderr)

    pgf = return_time_pgf(spec, 0.5)
    report.summary = {
        "mean_return_time": mean_return_time(spec),
        "idle_period_mean": idle_period_mean(spec),
        "busy_period_mean": busy_period_mean(spec),
        "escape_probability": escape_probability(spec),
        "pgf_at_half": pgf.value,
        "pgf_closed_form": pgf.closed_form,
    }
    return [report]


def cmd_heights(args, settings: Settings) -> list[Report]:
    spec = build_spec(args)
    law = height_law(spec, args.hmax)
    reach = return_time_tail(spec, args.hmax + 1)
    report = Report("heights", index_name="h", spec=spec.describe())

    counts = None
    if args.excursions:
        heights = simulate_excursions(spec, _run_config(settings, args, args.excursions))
        counts = np.bincount(heights[heights != ESCAPED], minlength=args.hmax + 1)
        total = heights.size

    for h in range(args.hmax + 1):
        estimate = stderr = None
        if counts is not None:
            estimate, stderr = proportion_and_stderr(int(counts[h]) if h < counts.size else 0, total)
        report.add_row(h, law.pmf(h), reach[h] - reach[h + 1], estimate, stderr)
    report.summary = {"defect": law.defect, "survival_beyond_table": law.survival(args.hmax + 1)}
    return [report]


def cmd_green(args, settings: Settings) -> list[Report]:
    spec = build_spec(args)
    if not 0 <= args.order <= MAX_ORDER:
        raise UsageError(f"--order must lie in [0, {MAX_ORDER}]")
    series = green_kernel(spec, args.x, args.y, args.order)
    size = max(args.x, args.y) + args.order + 2
    matrix = truncated_transition_matrix(spec, size)
    row = np.zeros(size)
    row[args.x] = 1.0
    report = Report("green", index_name="n", spec=spec.describe())
    for n in range(args.order + 1):
        report.add_row(n, series[n], row[args.y])
        row = row @ matrix
    report.summary = {
        "x": args.x,
        "y": args.y,
        "first_return_pgf_at_half": first_return_pgf_at(spec, args.x, 0.5),
        "mean_first_return": mean_first_return_at(spec, args.x),
    }
    return [report]


def cmd_contact(args, settings: Settings) -> list[Report]:
    spec = build_spec(args)
    u = contact_probability(spec, args.nmax)
    oracle = propagate_from_zero(spec, args.nmax)
    report = Report("contact", index_name="n", spec=spec.describe())
    for n in range(args.nmax + 1):
        report.add_row(n, u[n], oracle[n])

    if spec.beta == 1:
        asymptote = contact_asymptote(spec)
        report.summary = {
            "regime": asymptote.regime.value,
            "exponent": asymptote.exponent,
            "constant": asymptote.constant,
            "published_constant": asymptote.published_constant,
            "prediction_at_nmax": asymptote.predict(args.nmax) if args.nmax > 1 else None,
            "refined_prediction_at_nmax": asymptote.predict_refined(args.nmax) if args.nmax > 1 else None,
            "note": asymptote.note,
        }
    return [report]


def cmd_extinction(args, settings: Settings) -> list[Report]:
    spec = build_spec(args)
    report = Report("extinction", spec=spec.describe())
    frequencies = {}
    if args.walkers:
        frequencies = hit_frequency(spec, range(1, args.xmax + 1), _run_config(settings, args, args.walkers))
    for x in range(args.xmax + 1):
        estimate = frequencies.get(x)
        report.add_row(x, extinction_prob(spec, x), extinction_prob_series(spec, x),
                       estimate.value if estimate else None, estimate.stderr if estimate else None)
    report.summary = {"recurrence": recurrence_of(spec).value, "escape_probability": escape_probability(spec)}
    if frequencies:
        report.summary["hit_bias_bound"] = max(e.bias_bound for e in frequencies.values())
    return [report]


def cmd_ct_excursion(args, settings: Settings) -> list[Report]:
    spec = build_spec(args)
    if spec.ct is None:
        raise MissingRateLayerError("ct-excursion needs the rate layer: pass --lam")
    report = Report("ct-excursion", index_name="h", spec=spec.describe())
    gen = None
    if args.samples:
        gen = replication_streams(settings.seed, 0).clock
    for h in range(args.hmax + 1):
        estimate = stderr = None
        if gen is not None:
            lengths = ct_excursion_lengths(spec, np.full(args.samples, h), gen)
            estimate, stderr = proportion_and_stderr(int(np.count_nonzero(lengths > args.t)), args.samples)
        report.add_row(h, excursion_survival_given_height(spec, h, args.t),
                       phase_type_survival(jump_rates(spec, h), args.t), estimate, stderr)

    summary = {"t": args.t, "ct_recurrence": recurrence_of(spec, continuous=True).value,
               "ct_mean_return_time": ct_mean_return_time(spec)}
    if spec.beta == 1 and spec.ct.lam != 1:
        tail = ct_excursion_tail_exponent(spec)
        summary.update(tail_kind=tail.kind, tail_exponent=tail.exponent, tail_mean_bound=tail.mean_bound)
    explosion = explosion_report(spec)
    summary.update(explosive=explosion.explosive, post_drift=explosion.post_drift_description,
                   yule_explosion_mean=explosion.yule_explosion_mean,
                   reciprocal_rate_sums=explosion.reciprocal_rate_sums)
    report.summary = summary
    return [report]


def _divisibility_law(spec: ModelSpec, law: str, n: int):
    if law == "ct-invariant":
        return invariant_ct(spec, n + 1)
    if law == "shifted":
        return shifted_positive_part(invariant_dt(spec, n + 2))
    return invariant_dt(spec, n + 1)


def _sibuya_case(spec: ModelSpec) -> bool:
    return spec.kind is ModelKind.MODEL_A and spec.nu == 1 and spec.beta == 1 and 1 < spec.alpha < 2


def cmd_divisibility(args, settings: Settings) -> list[Report]:
    spec = build_spec(args)
    if args.scan_p0:
        return [_scan_p0_report(spec, args)]

    pmf = _divisibility_law(spec, args.law, args.n)
    r = canonical_sequence(pmf, args.n).r
    verdict = classify_divisibility(pmf, args.n)
    closed = None
    if args.law == "invariant" and _sibuya_case(spec):
        pi0 = (spec.alpha - 1.0) / (spec.alpha - 1.0 + spec.p0)
        closed = canonical_sequence(thinned_sibuya_pmf(spec.alpha, pi0, args.n + 1), args.n).r

    report = Report("divisibility", spec=spec.describe())
    for x in range(args.n + 1):
        report.add_row(x, r[x], closed[x] if closed is not None else None)
    report.summary = {
        "law": args.law,
        "id": verdict.id,
        "sd": verdict.sd,
        "first_violation_index": verdict.first_violation_index,
        "inconclusive": verdict.inconclusive,
        "id_margin": verdict.id_margin,
        "sd_margin": verdict.sd_margin,
        "log_convex": is_log_convex(pmf),
        "thinning_remainder_min": thinning_scan(pmf, (0.25, 0.5, 0.75), args.n),
    }
    return [report]


def _scan_p0_report(spec: ModelSpec, args) -> Report:
    steps = int(round(1.0 / args.step))
    grid = [round(k * args.step, 10) for k in range(1, steps + 1)]
    points = scan_p0(lambda p0: _with_p0(spec, p0), grid, args.n,
                     law=lambda s, size: _divisibility_law(s, args.law, size - 1))
    report = Report("divisibility-scan", index_name="p0", spec=spec.describe())
    for point in points:
        closed = None
        if args.law == "invariant" and _sibuya_case(spec):
            closed = int(sibuya_stationary_special_case(spec.alpha, point.p0, args.n).id)
        report.add_row(point.p0, int(point.verdict.id), closed)
    report.summary = {
        "law": args.law,
        "id_holds_up_to": first_flip(points, "id"),
        "sd_holds_up_to": first_flip(points, "sd"),
        "sd_by_p0": {point.p0: point.verdict.sd for point in points},
    }
    return report


def cmd_simulate(args, settings: Settings) -> list[Report]:
    spec = build_spec(args)
    config = _run_config(settings, args, args.horizon)
    report = Report("simulate-ct" if args.ct else "simulate", index_name="h" if args.ct else "x",
                    spec=spec.describe())

    if args.ct:
        runs = simulate_ct(spec, config, args.start)
        heights = pooled_heights(runs)
        counts = np.bincount(heights, minlength=args.xmax + 1) if heights.size else np.zeros(args.xmax + 1)
        law = height_law(spec, args.xmax)
        for h in range(args.xmax + 1):
            estimate, stderr = proportion_and_stderr(int(counts[h]), heights.size)
            report.add_row(h, law.pmf(h), None, estimate, stderr)
        report.summary = {
            "stopped_by": [run.stopped_by for run in runs],
            "events": [run.events for run in runs],
            "time": [run.time for run in runs],
            "anomalies": sum(run.anomaly for run in runs),
            "explosion_proxy_times": [run.explosion_proxy_time for run in runs],
            "completed_excursions": int(heights.size),
        }
        return [report]

    runs = simulate_dt(spec, config, args.start)
    visits = pooled_visits(runs)
    total = visits.sum()
    pi = None
    if recurrence_of(spec) is Recurrence.POSITIVE_RECURRENT or spec.confined_to is not None:
        pi = invariant_dt(spec, args.xmax).masses
    for x in range(args.xmax + 1):
        share = visits[x] / total if x < visits.size else 0.0
        stderr = None
        if len(runs) > 1:
            shares = [run.visits[x] / run.visits.sum() if x < run.visits.size else 0.0 for run in runs]
            stderr = mean_and_stderr(shares)[1]
        report.add_row(x, pi[x] if pi is not None else None, None, share, stderr)

    heights = pooled_heights(runs)
    mean, mean_stderr = mean_and_stderr(heights + 1) if heights.size else (math.nan, math.nan)
    report.summary = {
        "steps": config.steps,
        "replications": config.replications,
        "completed_excursions": int(heights.size),
        "final_states": [run.final_state for run in runs],
        "first_passage": [run.first_passage for run in runs],
        "mean_return_time_estimate": mean,
        "mean_return_time_stderr": mean_stderr,
        "mean_return_time": mean_return_time(spec),
    }
    return [report]


def cmd_verify(args, settings: Settings) -> list[Report]:
    return run_suite(args.suite, settings)


def cmd_report(args, settings: Settings) -> list[Report]:
    return run_suite("all", settings)


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    model = common.add_argument_group("model")
    model.add_argument("--model", choices=["A", "B"], help="disaster mechanism")
    model.add_argument("--alpha", type=float)
    model.add_argument("--beta", type=float, default=1.0)
    model.add_argument("--nu", type=float, help="Model A only")
    model.add_argument("--p0", type=float, default=1.0)
    model.add_argument("--lam", type=float, help="rate exponent; adds the continuous-time layer")
    model.add_argument("--r0", type=float, default=1.0)

    run = common.add_argument_group("run")
    run.add_argument("--seed", type=int)
    run.add_argument("--workers", type=int)
    run.add_argument("--out-dir", dest="out_dir")
    run.add_argument("--config", help="dotenv file with DISASTER_* settings")
    run.add_argument("--no-record", action="store_true", help="skip the experiment database")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="disaster", description="Catastrophe Markov chains: analytics and simulation.")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_flags()

    def add(name: str, handler, help_text: str) -> argparse.ArgumentParser:
        command = sub.add_parser(name, parents=[common], help=help_text)
        command.set_defaults(handler=handler)
        return command

    add("classify", cmd_classify, "recurrence class from the phase diagram")

    command = add("invariant", cmd_invariant, "invariant measure")
    command.add_argument("--xmax", type=int, default=100)
    command.add_argument("--ct", action="store_true", help="continuous-time invariant law")
    command.add_argument("--steps", type=int, help="also estimate occupation frequencies by simulation")
    command.add_argument("--replications", type=int)

    command = add("return-time", cmd_return_time, "law of the return time to 0")
    command.add_argument("--xmax", type=int, default=50)
    command.add_argument("--excursions", type=int)
    command.add_argument("--replications", type=int)

    command = add("heights", cmd_heights, "law of the excursion height")
    command.add_argument("--hmax", type=int, default=50)
    command.add_argument("--excursions", type=int)
    command.add_argument("--replications", type=int)

    command = add("green", cmd_green, "Green kernel coefficients")
    command.add_argument("--x", type=int, default=0)
    command.add_argument("--y", type=int, default=0)
    command.add_argument("--order", type=int, default=25)

    command = add("contact", cmd_contact, "contact probability P_0(X_n = 0)")
    command.add_argument("--nmax", type=int, default=1000)

    command = add("extinction", cmd_extinction, "probability of ever hitting 0")
    command.add_argument("--xmax", type=int, default=50)
    command.add_argument("--walkers", type=int)
    command.add_argument("--replications", type=int)

    command = add("ct-excursion", cmd_ct_excursion, "continuous-time excursion durations")
    command.add_argument("--hmax", type=int, default=20)
    command.add_argument("--t", type=float, default=5.0)
    command.add_argument("--samples", type=int)

    command = add("divisibility", cmd_divisibility, "canonical sequence and ID/SD verdict")
    command.add_argument("--n", type=int, default=50)
    command.add_argument("--law", choices=["invariant", "ct-invariant", "shifted"], default="invariant")
    command.add_argument("--scan-p0", dest="scan_p0", action="store_true")
    command.add_argument("--step", type=float, default=0.01)

    command = add("simulate", cmd_simulate, "trajectory simulation")
    command.add_argument("--ct", action="store_true")
    command.add_argument("--horizon", type=float, default=10_000)
    command.add_argument("--replications", type=int)
    command.add_argument("--start", type=int, default=0)
    command.add_argument("--xmax", type=int, default=20)

    command = add("verify", cmd_verify, "run an acceptance suite")
    command.add_argument("--suite", choices=list(SUITES) + ["all"], required=True)

    add("report", cmd_report, "regenerate every suite's tables")
    return parser


def _emit(reports: list[Report], settings: Settings, wall_time: float) -> None:
    stamp = timestamp()
    for report in reports:
        print_summary(report)
        print_rows(report)
        print_checks(report)
        outputs = write_artifacts(report, settings, stamp)
        record_experiment(report, outputs, wall_time, settings)
        console.print(f"[green]✓ Wrote {outputs[0]}[/green]")


def run(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    try:
        settings = load_settings(
            args.config,
            seed=args.seed,
            workers=args.workers,
            out_dir=args.out_dir,
            record_runs=False if args.no_record else None,
        )
        started = time.perf_counter()
        reports = args.handler(args, settings)
        _emit(reports, settings, time.perf_counter() - started)
    except (UsageError, ConfigError) as e:
        parser.print_usage()
        console.print(f"[red]Error:[/red] {escape(str(e))}")
        return EXIT_USAGE
    except DisasterError as e:
        console.print(f"[red]Error:[/red] {escape(str(e))}")
        return EXIT_DOMAIN

    if args.command in ("verify", "report"):
        failed = [c.name for report in reports for c in report.checks if not c.passed]
        if failed:
            console.print(f"[red]✗ {len(failed)} check(s) failed[/red]")
            return EXIT_FAILED_CHECKS if args.command == "verify" else EXIT_OK
        console.print("[green]✓ All checks passed[/green]")
    return EXIT_OK
