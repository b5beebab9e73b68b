"""First-passage laws: return times, excursion heights, scale function, extinction."""

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from app.chain.laws import PmfTable
from app.chain.model import (
    ModelKind,
    ModelSpec,
    Recurrence,
    disaster_probs,
    log_growth_probs,
    log_survival,
    recurrence_of,
)
from app.chain.stationary import criteria, survival_weighted_sum
from app.errors import DomainError, UnsupportedRegimeError
from app.numerics.special import SeriesValue, gauss_2f1, l_nu, polylog

HEAD_TERMS = 1 << 16
PGF_TOLERANCE = 1e-13


@dataclass(frozen=True)
class PgfValue:
    """A generating function value, flagged when no closed form was used."""
    value: float
    closed_form: bool
    tail_bound: float = 0.0

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class HeightLaw:
    """Law of the excursion height H = tau_00 - 1."""
    atom_at_zero: float
    masses: PmfTable

    @property
    def defect(self) -> float:
        return self.masses.defect

    def pmf(self, h: int) -> float:
        return self.atom_at_zero if h == 0 else self.masses.pmf(h)

    def survival(self, h: int) -> float:
        """P(H >= h), including the mass at infinity."""
        if h <= 0:
            return 1.0
        return self.masses.survival(h) + self.masses.tail_mass_bound + self.masses.defect


def log_tail_product(spec: ModelSpec, x: int) -> SeriesValue:
    """sum_{y>=x} log p_y, i.e. log P(no disaster ever, starting the climb at x)."""
    if spec.beta <= 1 or spec.confined_to is not None and x <= spec.confined_to:
        return SeriesValue(-math.inf, 0, 0.0)
    stop = max(x, HEAD_TERMS)
    head = math.fsum(log_growth_probs(spec, np.arange(x, stop, dtype=float))) if stop > x else 0.0

    def log_p(s):
        return float(log_growth_probs(spec, np.array([s]))[0])

    integral, error = integrate.quad(log_p, stop, np.inf, epsabs=1e-16, epsrel=1e-12, limit=500)
    h = 1e-3 * stop
    slope = (log_p(stop + h) - log_p(stop - h)) / (2 * h)
    tail = integral + log_p(stop) / 2 - slope / 12
    return SeriesValue(head + tail, stop - x, abs(slope) / 12 + error)


def escape_probability(spec: ModelSpec) -> float:
    """u_inf = P(tau_00 = infinity) = prod_{y>=0} p_y."""
    return math.exp(log_tail_product(spec, 0).value)


def extinction_prob(spec: ModelSpec, x: int) -> float:
    """Probability of ever hitting 0 from x: 1 - prod_{y>=x} p_y."""
    if x < 0:
        raise DomainError(f"state must be nonnegative, got {x}")
    return -math.expm1(log_tail_product(spec, x).value)


def extinction_prob_series(spec: ModelSpec, x: int, terms: int = HEAD_TERMS) -> float:
    """Extinction probability from the series sum_{y>=x} q_y prod_{x<=y'<y} p_y'.

    The first ``terms`` summands are added explicitly; what remains equals
    prod_{x<=y'<x+terms} p_y' times the extinction probability from x + terms.
    """
    if x < 0:
        raise DomainError(f"state must be nonnegative, got {x}")
    ys = np.arange(x, x + terms, dtype=float)
    logp = log_growth_probs(spec, ys)
    reach = np.concatenate(([0.0], np.cumsum(logp[:-1])))
    head = math.fsum(-np.expm1(logp) * np.exp(reach))
    remainder = math.exp(reach[-1] + logp[-1]) * extinction_prob(spec, x + terms)
    return head + remainder


def return_time_tail(spec: ModelSpec, xmax: int) -> np.ndarray:
    """P(tau_00 > x) = prod_{y<x} p_y for x = 0..xmax."""
    return np.exp(log_survival(spec, xmax))


def return_time_pmf(spec: ModelSpec, xmax: int) -> PmfTable:
    """P(tau_00 = x + 1) = q_x prod_{y<x} p_y for x = 0..xmax, with its defect."""
    tail = return_time_tail(spec, xmax + 1)
    masses = disaster_probs(spec, xmax) * tail[:-1]
    defect = escape_probability(spec)
    return PmfTable(1, masses, True, max(tail[-1] - defect, 0.0), defect)


def psi0(spec: ModelSpec, z: float) -> float:
    """pgf of the true-excursion height (tau_00 - 1 given tau_00 >= 2), beta = 1."""
    if spec.beta != 1:
        raise UnsupportedRegimeError("psi0 has a closed form only at beta = 1")
    if not 0 <= z <= 1:
        raise DomainError(f"z must lie in [0, 1], got {z}")
    if spec.kind is ModelKind.MODEL_A:
        nu, alpha = spec.nu, spec.alpha
        return alpha * z / (nu + 1) * gauss_2f1(1.0, nu + 1 - alpha, nu + 2, z).value
    if z == 0:
        return 0.0
    if z == 1:
        return 1.0
    return 1.0 - (1.0 - z) * polylog(spec.alpha, z).value / z


def psi0_alpha_one(spec: ModelSpec, z: float) -> float:
    """Elementary form of psi0 at alpha = 1."""
    if spec.beta != 1 or spec.alpha != 1:
        raise UnsupportedRegimeError("elementary psi0 needs beta = 1 and alpha = 1")
    if not 0 <= z < 1:
        raise DomainError(f"z must lie in [0, 1), got {z}")
    if spec.kind is ModelKind.MODEL_A:
        return z - spec.nu * l_nu(spec.nu, z).value * (1.0 - z)
    if z == 0:
        return 0.0
    return 1.0 + (1.0 - z) * math.log1p(-z) / z


def return_pgf_partial(spec: ModelSpec, z: float, start: int = 0) -> PgfValue:
    """sum_{x>=start} z**(x+1) q_x prod_{y<x} p_y, summed until z**(N+1) prod_{y<N} p_y is negligible."""
    if not 0 <= z < 1:
        raise DomainError(f"z must lie in [0, 1), got {z}")
    if z == 0:
        return PgfValue(0.0, False)
    log_z = math.log(z)
    log_u = log_survival(spec, start)[-1]
    partials = []
    x = start
    chunk = 1024
    while True:
        xs = np.arange(x, x + chunk, dtype=float)
        logp = log_growth_probs(spec, xs)
        logs = log_u + np.concatenate(([0.0], np.cumsum(logp[:-1])))
        partials.append(math.fsum(np.exp((xs + 1) * log_z + logs) * -np.expm1(logp)))
        log_u = logs[-1] + logp[-1]
        x += chunk
        bound = math.exp((x + 1) * log_z + log_u)
        if bound <= PGF_TOLERANCE or x - start >= 10_000_000:
            return PgfValue(math.fsum(partials), False, bound)
        chunk = min(chunk * 2, 1 << 20)


def return_time_pgf(spec: ModelSpec, z: float) -> PgfValue:
    """phi_00(z) = E z**tau_00 = z (q0 + p0 psi0(z)); series fallback off criticality."""
    if not 0 <= z <= 1:
        raise DomainError(f"z must lie in [0, 1], got {z}")
    if spec.beta == 1:
        return PgfValue(z * (spec.q0 + spec.p0 * psi0(spec, z)), True)
    if z == 1:
        return PgfValue(1.0 - escape_probability(spec), False)
    return return_pgf_partial(spec, z)


def mean_return_time(spec: ModelSpec) -> float:
    """E tau_00: 1 + C2 when positive recurrent, infinite otherwise."""
    report = criteria(spec)
    if not report.c2_finite:
        if spec.confined_to is not None:
            return 1.0 + survival_weighted_sum(spec).value
        return math.inf
    return 1.0 + report.c2_value


def idle_period_mean(spec: ModelSpec) -> float:
    """Mean number of trivial excursions before a true one: q0 / p0."""
    return spec.q0 / spec.p0


def busy_period_mean(spec: ModelSpec) -> float:
    """Mean length of a true excursion, 1 + C2 / p0."""
    return 1.0 + (mean_return_time(spec) - 1.0) / spec.p0


def busy_period_pmf(spec: ModelSpec, xmax: int) -> PmfTable:
    """Law of a true excursion length: P(tau+ = x + 1) = q_x prod_{y<x} p_y / p0, x >= 1."""
    table = return_time_pmf(spec, xmax)
    return PmfTable(2, table.masses[1:] / spec.p0, True,
                    table.tail_mass_bound / spec.p0, table.defect / spec.p0)


def size_biased_return_pmf(spec: ModelSpec, xmax: int) -> PmfTable:
    """Law of the excursion straddling a far-away time: x P(tau_00 = x) / mu."""
    mu = mean_return_time(spec)
    if not math.isfinite(mu):
        raise UnsupportedRegimeError("size-biasing needs a finite mean return time")
    table = return_time_pmf(spec, xmax - 1)
    masses = table.support * table.masses / mu
    beyond = survival_weighted_sum(spec, start=xmax).value if xmax >= 1 else mu
    tail = (xmax * return_time_tail(spec, xmax)[-1] + beyond) / mu
    return PmfTable(1, masses, True, tail)


def scale_function(spec: ModelSpec, x: int) -> float:
    """Harmonic function phi(x) = 1 / prod_{y<x} p_y with phi(0) = 0."""
    if x < 0:
        raise DomainError(f"state must be nonnegative, got {x}")
    if x == 0:
        return 0.0
    return math.exp(-log_survival(spec, x)[-1])


def log_scale_function(spec: ModelSpec, xmax: int) -> np.ndarray:
    """log phi(x) for x = 0..xmax; the entry at 0 is -inf."""
    out = -log_survival(spec, xmax)
    out[0] = -math.inf
    return out


def height_law(spec: ModelSpec, hmax: int) -> HeightLaw:
    """Excursion height law from P(H=h) = p0 phi(1)/phi(h) (1 - phi(h)/phi(h+1))."""
    log_phi = -log_survival(spec, hmax + 1)
    h = np.arange(1, hmax + 1)
    with np.errstate(invalid="ignore", divide="ignore"):
        logs = (math.log(spec.p0) + log_phi[1] - log_phi[h]
                + np.log(-np.expm1(log_phi[h] - log_phi[h + 1])))
    masses = np.where(np.isfinite(log_phi[h]), np.exp(logs), 0.0)
    defect = escape_probability(spec)
    tail = max(math.exp(-log_phi[hmax + 1]) - defect, 0.0)
    return HeightLaw(spec.q0, PmfTable(1, masses, True, tail, defect))


def first_passage_down_pmf(spec: ModelSpec, x: int, kmax: int) -> PmfTable:
    """P(tau_{x,0} = k) = q_{k+x-1} prod_{y=x}^{k+x-2} p_y for k = 1..kmax."""
    if x < 1:
        raise DomainError("first passage down starts from x >= 1")
    logp = log_growth_probs(spec, np.arange(x, x + kmax, dtype=float))
    reach = np.concatenate(([0.0], np.cumsum(logp[:-1])))
    masses = -np.expm1(logp) * np.exp(reach)
    defect = 1.0 - extinction_prob(spec, x)
    tail = max(math.exp(reach[-1] + logp[-1]) - defect, 0.0)
    return PmfTable(1, masses, True, tail, defect)


def first_passage_down_pgf(spec: ModelSpec, x: int, z: float, kmax: int = 1 << 20) -> PgfValue:
    """E z**tau_{x,0} summed from the pmf; exact at z = 1."""
    if not 0 <= z <= 1:
        raise DomainError(f"z must lie in [0, 1], got {z}")
    if z == 1:
        return PgfValue(extinction_prob(spec, x), False)
    kmax = max(8, min(kmax, int(math.ceil(math.log(PGF_TOLERANCE) / math.log(z))) + 8)) if z > 0 else 1
    table = first_passage_down_pmf(spec, x, kmax)
    powers = z ** table.support.astype(float)
    return PgfValue(math.fsum(powers * table.masses), False, z ** (kmax + 1))


def mean_first_passage_down(spec: ModelSpec, x: int) -> float:
    """E tau_{x,0} = phi(x) sum_{j>=x} prod_{y<j} p_y; finite iff positive recurrent."""
    if x < 1:
        raise DomainError("first passage down starts from x >= 1")
    if recurrence_of(spec) is not Recurrence.POSITIVE_RECURRENT and spec.confined_to is None:
        return math.inf
    return scale_function(spec, x) * survival_weighted_sum(spec, start=x).value


def excursion_count_law(spec: ModelSpec, kmax: int) -> PmfTable:
    """Law of the number of completed excursions before drifting away: (1-phi00) phi00**k."""
    phi00 = 1.0 - escape_probability(spec)
    k = np.arange(kmax + 1)
    masses = (1.0 - phi00) * phi00 ** k
    return PmfTable(0, masses, True, phi00 ** (kmax + 1))
