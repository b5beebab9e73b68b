"""Heavy-tail and limit-law samplers.

Inverse-transform samplers for excursion heights and first-passage times,
continuous-time excursion durations, Zipf samplers (prime products and
inverse cdf) and the compound-Poisson / immigration limit-law generators.
"""

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy import integrate
from scipy import special as sp
from sympy import primerange

from app.chain.hitting import log_tail_product, size_biased_return_pmf
from app.chain.model import ModelSpec, log_survival
from app.chain.stationary import log_survival_smooth
from app.errors import DomainError, MissingRateLayerError
from app.numerics.special import zeta
from app.simulation.rng import RunConfig, Streams, run_replications
from app.simulation.trajectories import ESCAPED

HEIGHT_TABLE = 1 << 20
MAX_TABLE = 1 << 23
MAX_HEIGHT = 2 ** 62
EXACT_LEVELS = 256
ZIPF_CHUNK = 8192


def _uniform_logs(gen: np.random.Generator, size: int) -> np.ndarray:
    """log V for V uniform on (0, 1]."""
    return np.log1p(-gen.random(size))


def _smooth_search(spec: ModelSpec, targets: np.ndarray, lo: np.ndarray) -> np.ndarray:
    """Largest integer h >= lo with log prod_{y<h} p_y >= target, from the closed form."""
    lo = lo.astype(np.int64)
    hi = np.minimum(lo * 2, MAX_HEIGHT)
    while True:
        grow = (log_survival_smooth(spec, hi.astype(float)) >= targets) & (hi < MAX_HEIGHT)
        if not grow.any():
            break
        hi[grow] = np.minimum(hi[grow] * 2, MAX_HEIGHT)
    while np.any(hi - lo > 1):
        mid = lo + (hi - lo) // 2
        ok = log_survival_smooth(spec, mid.astype(float)) >= targets
        lo = np.where(ok, mid, lo)
        hi = np.where(ok, hi, mid)
    ok_hi = log_survival_smooth(spec, hi.astype(float)) >= targets
    return np.where(ok_hi, hi, lo)


def draw_heights(spec: ModelSpec, size: int, gen: np.random.Generator, at_least: int = 0) -> np.ndarray:
    """Exact excursion heights by inversion of P(H >= h) = prod_{y<h} p_y.

    With ``at_least`` the draw is conditioned on H >= at_least. Excursions that
    never return are ESCAPED; heights past 2**62 are clamped there.
    """
    table_size = max(HEIGHT_TABLE, 2 * at_least)
    log_reach = log_survival(spec, table_size)
    base = log_reach[at_least]
    if base == -math.inf:
        raise DomainError(f"state {at_least} is unreachable")
    targets = base + _uniform_logs(gen, size)
    escaped = np.zeros(size, dtype=bool)
    if spec.beta > 1 and spec.confined_to is None:
        escaped = targets < log_tail_product(spec, 0).value

    while True:
        heights = np.searchsorted(-log_reach, -targets, side="right") - 1
        beyond = (heights >= table_size) & ~escaped
        if not beyond.any() or spec.beta == 1 or table_size >= MAX_TABLE:
            break
        table_size *= 4
        log_reach = log_survival(spec, table_size)

    heights = heights.astype(np.int64)
    if beyond.any():
        if spec.beta == 1:
            heights[beyond] = _smooth_search(spec, targets[beyond], np.full(beyond.sum(), table_size))
        else:
            heights[beyond] = ESCAPED
    heights[escaped] = ESCAPED
    return heights


def first_passage_steps(spec: ModelSpec, x: int, size: int, gen: np.random.Generator) -> np.ndarray:
    """Samples of tau_{x,0}; ESCAPED when the walker never comes back."""
    if x < 0:
        raise DomainError(f"state must be nonnegative, got {x}")
    heights = draw_heights(spec, size, gen, at_least=x)
    return np.where(heights == ESCAPED, ESCAPED, heights - x + 1)


def _power_sum(a: int, b: np.ndarray, p: float) -> np.ndarray:
    """sum_{y=a}^{b} (y + 1)**-p by the midpoint rule."""
    lo = a + 0.5
    hi = np.asarray(b, dtype=float) + 1.5
    if p == 1:
        return np.log(hi / lo)
    return (hi ** (1.0 - p) - lo ** (1.0 - p)) / (1.0 - p)


def holding_time_sums(spec: ModelSpec, first: int, counts: np.ndarray, gen: np.random.Generator,
                      exact_levels: int = EXACT_LEVELS) -> np.ndarray:
    """sum of Exp(r_y) for y = first .. first + count - 1, one sum per entry of ``counts``.

    The first ``exact_levels`` stages are drawn exactly; longer remainders use
    a gamma law with the remainder's mean and variance.
    """
    if spec.ct is None:
        raise MissingRateLayerError("spec has no continuous-time rate layer")
    r0, lam = spec.ct.r0, spec.ct.lam
    counts = np.asarray(counts, dtype=np.int64)
    sums = np.zeros(counts.size)
    top = min(int(counts.max()) if counts.size else 0, exact_levels)
    for j in range(top):
        alive = np.flatnonzero(counts > j)
        if not alive.size:
            break
        sums[alive] += gen.standard_exponential(alive.size) / (r0 * (first + j + 1.0) ** lam)

    far = np.flatnonzero(counts > exact_levels)
    if far.size:
        a = first + exact_levels
        b = first + counts[far] - 1
        mean = _power_sum(a, b, lam) / r0
        variance = _power_sum(a, b, 2 * lam) / r0 ** 2
        sums[far] += gen.gamma(mean ** 2 / variance, variance / mean)
    return sums


def ct_excursion_lengths(spec: ModelSpec, heights: np.ndarray, gen: np.random.Generator) -> np.ndarray:
    """tau_bar_00 = E_0 + ... + E_H for each height; nan for ESCAPED."""
    heights = np.asarray(heights, dtype=np.int64)
    finite = heights != ESCAPED
    lengths = np.full(heights.size, np.nan)
    lengths[finite] = holding_time_sums(spec, 0, heights[finite] + 1, gen)
    return lengths


def ct_first_extinction_time(spec: ModelSpec, x: int, size: int, gen: np.random.Generator) -> np.ndarray:
    """Samples of the CT first hitting time of 0 from x; inf when it never happens."""
    steps = first_passage_steps(spec, x, size, gen)
    times = np.full(size, np.inf)
    hit = steps != ESCAPED
    times[hit] = holding_time_sums(spec, x, steps[hit], gen)
    return times


@dataclass(frozen=True)
class SizeBiasedSample:
    values: np.ndarray
    tail_mass: float


def size_biased_sample(spec: ModelSpec, size: int, gen: np.random.Generator,
                       xmax: int = 1 << 16) -> SizeBiasedSample:
    """Draws of the excursion straddling a far-away time, x P(tau_00 = x) / mu.

    Draws landing beyond the table fall back to tau_00 conditioned on
    exceeding ``xmax``; their total weight is ``tail_mass``.
    """
    table = size_biased_return_pmf(spec, xmax)
    cdf = np.cumsum(table.masses)
    u = gen.random(size)
    idx = np.searchsorted(cdf, u, side="right")
    values = table.support_start + idx
    beyond = idx >= len(cdf)
    if beyond.any():
        values[beyond] = draw_heights(spec, int(beyond.sum()), gen, at_least=xmax) + 1
    return SizeBiasedSample(values.astype(np.int64), table.tail_mass_bound)


def zipf_smooth_probability(alpha: float, prime_max: int) -> float:
    """P(Y has no prime factor above prime_max) for Y ~ Zipf(alpha)."""
    primes = np.array(list(primerange(2, prime_max + 1)), dtype=float)
    return math.exp(-np.sum(np.log1p(-primes ** -alpha))) / zeta(alpha)


def _prime_products(gen: np.random.Generator, primes: np.ndarray, alpha: float, size: int) -> np.ndarray:
    exponents = gen.geometric(1.0 - primes.astype(float) ** -alpha, size=(size, primes.size)) - 1
    safe = exponents @ np.log(primes.astype(float)) < 62 * math.log(2)
    out = np.full(size, -1, dtype=np.int64)
    rows = np.flatnonzero(safe)
    values = np.ones(rows.size, dtype=np.int64)
    for j in np.flatnonzero(exponents[rows].any(axis=0)):
        values *= primes[j] ** exponents[rows, j]
    out[rows] = values
    return out


def zipf_prime_sampler(alpha: float, config: RunConfig) -> np.ndarray:
    """Y = prod_p p**G_p with independent G_p, P(G_p = k) = (1 - p**-alpha) p**(-alpha k).

    Only primes up to ``config.prime_max`` enter, so this is Zipf(alpha)
    conditioned on being prime_max-smooth. Products past 2**62 are reported as -1.
    """
    if not alpha > 1:
        raise DomainError(f"Zipf law needs alpha > 1, got {alpha}")
    primes = np.array(list(primerange(2, config.prime_max + 1)), dtype=np.int64)
    size = config.steps

    def task(streams: Streams) -> np.ndarray:
        out = np.empty(size, dtype=np.int64)
        for lo in range(0, size, ZIPF_CHUNK):
            n = min(ZIPF_CHUNK, size - lo)
            out[lo : lo + n] = _prime_products(streams.jump, primes, alpha, n)
        return out

    return np.concatenate(run_replications(config, task))


def zipf_inverse_sampler(alpha: float, size: int, gen: np.random.Generator, table: int = 1 << 16) -> np.ndarray:
    """Zipf(alpha) draws by inverting P(Y >= y) = zeta(alpha, y) / zeta(alpha)."""
    if not alpha > 1:
        raise DomainError(f"Zipf law needs alpha > 1, got {alpha}")
    total = zeta(alpha)
    y = np.arange(1, table + 2, dtype=float)
    survival = sp.zeta(alpha, y) / total
    v = 1.0 - gen.random(size)
    # survival is decreasing; count the y with P(Y >= y) >= v
    draws = np.searchsorted(-survival, -v, side="right").astype(np.int64)

    beyond = draws > table
    if beyond.any():
        target = v[beyond]
        lo = np.full(target.size, float(table))
        hi = lo * 2
        while np.any(sp.zeta(alpha, hi) / total >= target):
            hi = np.where(sp.zeta(alpha, hi) / total >= target, hi * 2, hi)
        while np.any(hi - lo > 1):
            mid = np.floor((lo + hi) / 2)
            ok = sp.zeta(alpha, mid) / total >= target
            lo = np.where(ok, mid, lo)
            hi = np.where(ok, hi, mid)
        draws[beyond] = lo.astype(np.int64)
    return draws


@dataclass(frozen=True)
class JumpLaw:
    """Finite-support law of the batch size, masses on 0..K."""
    masses: np.ndarray

    def __post_init__(self):
        masses = np.asarray(self.masses, dtype=float)
        if masses.min() < 0 or abs(masses.sum() - 1.0) > 1e-12:
            raise DomainError("jump law masses must be nonnegative and sum to 1")
        object.__setattr__(self, "masses", masses)

    @classmethod
    def from_mapping(cls, masses: Mapping[int, float]) -> "JumpLaw":
        out = np.zeros(max(masses) + 1)
        for k, mass in masses.items():
            out[k] = mass
        return cls(out)

    @classmethod
    def unit(cls) -> "JumpLaw":
        return cls(np.array([0.0, 1.0]))

    def pgf(self, z):
        return np.polynomial.polynomial.polyval(z, self.masses)

    def sample(self, size: int, gen: np.random.Generator) -> np.ndarray:
        return gen.choice(len(self.masses), size=size, p=self.masses)


def id_limit_pgf(r: float, jumps: JumpLaw, z: float, t: float = math.inf) -> float:
    """E z**X_t = exp(-r (1 - e**-t)(1 - h(z))) for the compound-Poisson process."""
    scale = -math.expm1(-t) if math.isfinite(t) else 1.0
    return math.exp(-r * scale * (1.0 - jumps.pgf(z)))


def sd_limit_pgf(r: float, jumps: JumpLaw, z: float) -> float:
    """exp(-r int_z^1 (1 - h(s)) / (1 - s) ds), the limiting law of the immigration process."""
    if z == 1:
        return 1.0
    integral, _ = integrate.quad(lambda s: (1.0 - jumps.pgf(s)) / (1.0 - s), z, 1.0, limit=200)
    return math.exp(-r * integral)


def sd_finite_time_pgf(r: float, jumps: JumpLaw, z: float, t: float) -> float:
    """exp(-r int_0^t (1 - h(1 - e**-v (1 - z))) dv), the law at time t."""
    integral, _ = integrate.quad(lambda v: 1.0 - jumps.pgf(1.0 - math.exp(-v) * (1.0 - z)), 0.0, t, limit=200)
    return math.exp(-r * integral)


def _require_settled(t: float):
    if not math.exp(-t) < 1e-4:
        raise DomainError(f"t = {t} is too small: need exp(-t) < 1e-4")


def _sum_by_owner(owners: np.ndarray, values: np.ndarray, size: int) -> np.ndarray:
    return np.bincount(owners, weights=values, minlength=size).astype(np.int64)


def limit_law_id_generator(r: float, jumps: JumpLaw, t: float, config: RunConfig) -> np.ndarray:
    """X_t = sum of Poisson(r (1 - e**-t)) jumps, int(config.horizon) draws per replication."""
    _require_settled(t)
    size = config.steps

    def task(streams: Streams) -> np.ndarray:
        gen = streams.jump
        batches = gen.poisson(r * -math.expm1(-t), size)
        owners = np.repeat(np.arange(size), batches)
        return _sum_by_owner(owners, jumps.sample(owners.size, gen), size)

    return np.concatenate(run_replications(config, task))


def limit_law_sd_generator(r: float, jumps: JumpLaw, t: float, config: RunConfig) -> np.ndarray:
    """Population at time t: batches immigrate at rate r, each member lives an Exp(1) time."""
    _require_settled(t)
    size = config.steps

    def task(streams: Streams) -> np.ndarray:
        gen = streams.jump
        arrivals = gen.poisson(r * t, size)
        owners = np.repeat(np.arange(size), arrivals)
        ages = t - gen.uniform(0.0, t, owners.size)
        batch_sizes = jumps.sample(owners.size, gen)
        members = np.repeat(np.arange(owners.size), batch_sizes)
        alive = streams.clock.standard_exponential(members.size) > ages[members]
        survivors = np.bincount(members[alive], minlength=owners.size)
        return _sum_by_owner(owners, survivors, size)

    return np.concatenate(run_replications(config, task))


def empirical_pgf(samples: np.ndarray, z: float) -> tuple[float, float]:
    """Mean of z**X and its standard error."""
    values = np.power(float(z), np.asarray(samples, dtype=float))
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(values.size))
