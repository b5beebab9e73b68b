"""Random streams and replication runner.

Every replication owns a stream derived from ``SeedSequence(seed,
spawn_key=(index,))`` feeding a Philox counter-based generator, so a
replication's draws depend only on (seed, index) and never on how the
replications are scheduled. Each stream is split once more into a jump
stream (transition uniforms) and a clock stream (holding times).
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, TypeVar

import numpy as np

from app.config import Settings, settings as default_settings
from app.errors import DomainError

T = TypeVar("T")


@dataclass(frozen=True)
class RunConfig:
    """Simulation controls.

    ``horizon`` is a step count for discrete-time runs, a time for
    continuous-time runs and a number of excursions for excursion samplers.
    """
    seed: int = 7
    replications: int = 1
    horizon: float = 10_000
    max_events: int = 10_000_000
    workers: int = 1
    prime_max: int = 997

    def __post_init__(self):
        if self.replications < 1:
            raise DomainError(f"need at least one replication, got {self.replications}")
        if not self.horizon > 0:
            raise DomainError(f"horizon must be positive, got {self.horizon}")
        if self.max_events < 1:
            raise DomainError(f"max_events must be positive, got {self.max_events}")

    @classmethod
    def from_settings(cls, config: Settings = None, **overrides) -> "RunConfig":
        config = config or default_settings
        base = cls(seed=config.seed, max_events=config.max_events,
                   workers=config.workers, prime_max=config.prime_max)
        return replace(base, **{k: v for k, v in overrides.items() if v is not None})

    @property
    def steps(self) -> int:
        if math.isinf(self.horizon):
            raise DomainError("a discrete-time run needs a finite horizon")
        return int(self.horizon)


@dataclass(frozen=True)
class Streams:
    jump: np.random.Generator
    clock: np.random.Generator


def replication_streams(seed: int, index: int) -> Streams:
    """Jump and clock generators of replication ``index``."""
    sequence = np.random.SeedSequence(seed, spawn_key=(index,))
    jump, clock = sequence.spawn(2)
    return Streams(np.random.Generator(np.random.Philox(jump)), np.random.Generator(np.random.Philox(clock)))


def run_replications(config: RunConfig, task: Callable[[Streams], T]) -> list[T]:
    """Run ``task`` once per replication; results come back in replication order."""
    streams = [replication_streams(config.seed, i) for i in range(config.replications)]
    if config.workers <= 1 or config.replications == 1:
        return [task(s) for s in streams]
    with ThreadPoolExecutor(max_workers=config.workers) as pool:
        return list(pool.map(task, streams))


def mean_and_stderr(values) -> tuple[float, float]:
    """Sample mean and its standard error, summed with math.fsum."""
    values = np.asarray(values, dtype=float)
    n = values.size
    if n == 0:
        return math.nan, math.nan
    mean = math.fsum(values) / n
    if n == 1:
        return mean, math.nan
    variance = math.fsum((values - mean) ** 2) / (n - 1)
    return mean, math.sqrt(variance / n)


def proportion_and_stderr(successes: int, trials: int) -> tuple[float, float]:
    if trials == 0:
        return math.nan, math.nan
    p = successes / trials
    return p, math.sqrt(max(p * (1.0 - p), 0.0) / trials)
