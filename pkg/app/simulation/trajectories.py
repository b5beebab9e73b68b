"""Exact discrete- and continuous-time trajectory simulation.

A step from x is decided by one uniform U: the chain climbs to x + 1 when
U > q_x and collapses to 0 otherwise. Excursions from 0 are simulated in
batches, level by level, so a batch of walkers shares one vectorised draw
per level; the few walkers still climbing after that continue one at a time.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np
from rich.console import Console

from app.chain.model import ModelSpec, Recurrence, log_growth_probs, recurrence_of
from app.errors import DomainError, MissingRateLayerError
from app.simulation.rng import RunConfig, Streams, run_replications

console = Console(stderr=True)

ESCAPED = -1
SINGLE_WALKER_THRESHOLD = 32
FIRST_BATCH = 256
MAX_BATCH = 1 << 20
TRANSIENT_LEVEL_CAP = 4096


class DisasterTable:
    """q_x for x = 0, 1, ..., extended by doubling as walkers climb."""

    def __init__(self, spec: ModelSpec, size: int = 1024):
        self.spec = spec
        self._q = -np.expm1(log_growth_probs(spec, np.arange(size)))

    def _ensure(self, stop: int):
        size = len(self._q)
        if stop <= size:
            return
        new_size = max(stop, 2 * size)
        extra = -np.expm1(log_growth_probs(self.spec, np.arange(size, new_size)))
        self._q = np.concatenate((self._q, extra))

    def disaster(self, start: int, count: int) -> np.ndarray:
        self._ensure(start + count)
        return self._q[start : start + count]


@dataclass(frozen=True)
class ExcursionSample:
    height: int
    dt_length: int
    ct_length: Optional[float] = None


def climb(table: DisasterTable, x: int, gen: np.random.Generator, cap: int) -> tuple[int, bool]:
    """Successful climbs from x before the first disaster, at most ``cap`` steps.

    Returns (k, True) when the disaster strikes at state x + k, or
    (cap, False) when all ``cap`` steps went up.
    """
    done = 0
    chunk = 64
    while done < cap:
        m = min(chunk, cap - done)
        fail = np.flatnonzero(gen.random(m) <= table.disaster(x + done, m))
        if fail.size:
            return done + int(fail[0]), True
        done += m
        chunk = min(chunk * 2, 1 << 16)
    return cap, False


def excursion_heights(table: DisasterTable, gen: np.random.Generator, count: int,
                      cap: int) -> tuple[np.ndarray, np.ndarray]:
    """Heights of ``count`` consecutive excursions from 0 and whether each finished.

    An excursion that survives ``cap`` steps is unfinished and reported with height ``cap``.
    """
    heights = np.full(count, cap, dtype=np.int64)
    finished = np.zeros(count, dtype=bool)
    alive = np.arange(count)
    level = 0
    while alive.size > SINGLE_WALKER_THRESHOLD and level < cap:
        fail = gen.random(alive.size) <= table.disaster(level, 1)[0]
        heights[alive[fail]] = level
        finished[alive[fail]] = True
        alive = alive[~fail]
        level += 1
    if level < cap:
        for i in alive:
            k, failed = climb(table, level, gen, cap - level)
            heights[i] = level + k
            finished[i] = failed
    return heights, finished


def _visit_counts(heights: np.ndarray, extra_segments: list[tuple[int, int]]) -> np.ndarray:
    """Number of times each state is occupied: excursion heights plus [a, b] climbs."""
    top = max([int(heights.max()) if heights.size else 0] + [b for _, b in extra_segments])
    visits = np.zeros(top + 1, dtype=np.int64)
    if heights.size:
        at_least = np.bincount(heights, minlength=top + 1)[::-1].cumsum()[::-1]
        visits += at_least
    for a, b in extra_segments:
        visits[a : b + 1] += 1
    return visits


@dataclass(frozen=True)
class DtTrajectory:
    """Summary of X_0, ..., X_n for one replication."""
    steps: int
    start: int
    final_state: int
    heights: np.ndarray
    partial_height: Optional[int]
    first_passage: Optional[int]
    visits: np.ndarray

    @property
    def excursions(self) -> list[ExcursionSample]:
        return [ExcursionSample(int(h), int(h) + 1) for h in self.heights]


def _split_batch(heights: np.ndarray, finished: np.ndarray, remaining: int) -> tuple[int, np.ndarray]:
    """Number of excursions completed within ``remaining`` steps, and their end times."""
    lengths = np.where(finished, heights + 1, remaining + 1)
    ends = np.cumsum(lengths)
    return int(np.searchsorted(ends, remaining, side="right")), ends


def _dt_replication(spec: ModelSpec, n: int, start: int, streams: Streams) -> DtTrajectory:
    table = DisasterTable(spec)
    gen = streams.jump
    t = 0
    segments = []
    first_passage = None

    if start > 0:
        k, failed = climb(table, start, gen, n)
        segments.append((start, start + k))
        if not failed:
            empty = np.zeros(0, dtype=np.int64)
            return DtTrajectory(n, start, start + n, empty, None, None, _visit_counts(empty, segments))
        first_passage = t = k + 1

    completed = []
    partial = None
    batch = FIRST_BATCH
    while t < n:
        remaining = n - t
        heights, finished = excursion_heights(table, gen, batch, remaining)
        k, ends = _split_batch(heights, finished, remaining)
        completed.append(heights[:k])
        if k < batch:
            partial = remaining - (int(ends[k - 1]) if k else 0)
            break
        t += int(ends[-1])
        batch = min(batch * 2, MAX_BATCH)

    heights = np.concatenate(completed) if completed else np.zeros(0, dtype=np.int64)
    if partial is None:
        partial = 0
    segments.append((0, partial))
    return DtTrajectory(n, start, partial, heights, partial, first_passage, _visit_counts(heights, segments))


def simulate_dt(spec: ModelSpec, config: RunConfig, start: int = 0) -> list[DtTrajectory]:
    """``config.replications`` independent paths X_0..X_n with n = config.horizon."""
    if start < 0:
        raise DomainError(f"start must be nonnegative, got {start}")
    n = config.steps
    return run_replications(config, lambda streams: _dt_replication(spec, n, start, streams))


@dataclass(frozen=True)
class CtTrajectory:
    """Summary of one continuous-time run.

    ``stopped_by`` is "horizon" or "max_events"; ``anomaly`` flags an
    exhausted event budget in a regime that cannot explode.
    """
    time: float
    events: int
    stopped_by: str
    final_state: int
    heights: np.ndarray
    ct_lengths: np.ndarray
    anomaly: bool = False
    explosion_proxy_time: Optional[float] = None
    first_passage_time: Optional[float] = None

    @property
    def excursions(self) -> list[ExcursionSample]:
        return [ExcursionSample(int(h), int(h) + 1, float(s)) for h, s in zip(self.heights, self.ct_lengths)]


def _holds(spec: ModelSpec, states: np.ndarray, clock: np.random.Generator) -> np.ndarray:
    rates = spec.ct.r0 * (states + 1.0) ** spec.ct.lam
    return clock.standard_exponential(states.size) / rates


def _flat_states(lengths: np.ndarray) -> np.ndarray:
    """Concatenation of arange(l) for each l in ``lengths``."""
    total = int(lengths.sum())
    offsets = np.repeat(np.cumsum(lengths) - lengths, lengths)
    return np.arange(total, dtype=np.int64) - offsets


def _ct_replication(spec: ModelSpec, config: RunConfig, start: int, streams: Streams) -> CtTrajectory:
    table = DisasterTable(spec)
    horizon = float(config.horizon)
    budget = config.max_events
    time = 0.0
    events = 0
    first_passage_time = None
    completed_h, completed_s = [], []

    def finish(stopped_by: str, state: int) -> CtTrajectory:
        heights = np.concatenate(completed_h) if completed_h else np.zeros(0, dtype=np.int64)
        lengths = np.concatenate(completed_s) if completed_s else np.zeros(0)
        anomaly = False
        proxy = None
        if stopped_by == "max_events":
            if recurrence_of(spec) is Recurrence.TRANSIENT and spec.ct.lam > 1:
                proxy = time
            else:
                anomaly = True
                console.print(f"[yellow]event budget {budget} exhausted at t={time:.6g} "
                              f"in a regime that cannot explode[/yellow]")
        return CtTrajectory(time, events, stopped_by, state, heights, lengths, anomaly, proxy, first_passage_time)

    if start > 0:
        k, failed = climb(table, start, streams.jump, budget)
        states = np.arange(start, start + k + (1 if failed else 0))
        cumulative = np.cumsum(_holds(spec, states, streams.clock))
        if cumulative.size and cumulative[-1] > horizon:
            idx = int(np.searchsorted(cumulative, horizon, side="right"))
            time, events = horizon, idx
            return finish("horizon", int(states[idx]))
        time = float(cumulative[-1]) if cumulative.size else 0.0
        events = states.size
        if not failed:
            return finish("max_events", start + k)
        first_passage_time = time

    batch = FIRST_BATCH
    while events < budget:
        remaining = budget - events
        heights, finished = excursion_heights(table, streams.jump, batch, remaining)
        k, ends = _split_batch(heights, finished, remaining)
        lengths = heights[:k] + 1
        # jumps left for the excursion cut short by the budget
        tail = remaining - (int(ends[k - 1]) if k else 0)
        if k < batch:
            lengths = np.append(lengths, tail)
        states = _flat_states(lengths)
        cumulative = time + np.cumsum(_holds(spec, states, streams.clock))
        boundaries = np.cumsum(lengths[:k])

        if cumulative.size and cumulative[-1] > horizon:
            idx = int(np.searchsorted(cumulative, horizon, side="right"))
            done = int(np.searchsorted(boundaries, idx, side="right"))
            _record(completed_h, completed_s, heights[:done], cumulative, boundaries[:done], time)
            events += idx
            time = horizon
            return finish("horizon", int(states[idx]))

        _record(completed_h, completed_s, heights[:k], cumulative, boundaries, time)
        events += states.size
        if cumulative.size:
            time = float(cumulative[-1])
        if k < batch:
            return finish("max_events", tail)
        batch = min(batch * 2, MAX_BATCH)
    return finish("max_events", 0)


def _record(heights_out: list, lengths_out: list, heights: np.ndarray, cumulative: np.ndarray,
            boundaries: np.ndarray, time0: float):
    """Append completed excursions; ``boundaries`` are their cumulative jump counts."""
    if not heights.size:
        return
    end_times = cumulative[boundaries - 1]
    start_times = np.concatenate(([time0], end_times[:-1]))
    heights_out.append(heights)
    lengths_out.append(end_times - start_times)


def simulate_ct(spec: ModelSpec, config: RunConfig, start: int = 0) -> list[CtTrajectory]:
    """Event-driven runs up to time ``config.horizon`` or ``config.max_events`` jumps."""
    if spec.ct is None:
        raise MissingRateLayerError("spec has no continuous-time rate layer")
    if start < 0:
        raise DomainError(f"start must be nonnegative, got {start}")
    return run_replications(config, lambda streams: _ct_replication(spec, config, start, streams))


def simulate_excursions(spec: ModelSpec, config: RunConfig, level_cap: int = 1 << 24) -> np.ndarray:
    """Heights of int(config.horizon) excursions per replication, pooled in replication order.

    Excursions still climbing after ``level_cap`` steps are reported as ESCAPED.
    In a transient chain walkers past TRANSIENT_LEVEL_CAP are finished by
    inversion of the height law conditioned on the level they reached.
    """
    count = config.steps
    transient = recurrence_of(spec) is Recurrence.TRANSIENT
    cap = min(level_cap, TRANSIENT_LEVEL_CAP) if transient else level_cap

    def task(streams: Streams) -> np.ndarray:
        heights, finished = excursion_heights(DisasterTable(spec), streams.jump, count, cap)
        if transient and not finished.all():
            from app.simulation.samplers import draw_heights

            heights[~finished] = draw_heights(spec, int((~finished).sum()), streams.jump, at_least=cap)
            return heights
        return np.where(finished, heights, ESCAPED)

    return np.concatenate(run_replications(config, task))


def pooled_heights(trajectories) -> np.ndarray:
    return np.concatenate([t.heights for t in trajectories]) if trajectories else np.zeros(0, dtype=np.int64)


def pooled_visits(trajectories) -> np.ndarray:
    size = max(len(t.visits) for t in trajectories)
    total = np.zeros(size, dtype=np.int64)
    for t in trajectories:
        total[: len(t.visits)] += t.visits
    return total
