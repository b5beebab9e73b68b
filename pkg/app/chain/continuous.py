"""Continuous-time layer: excursion durations, tail exponents and explosion."""

import math
from dataclasses import dataclass, field
from typing import Optional

import mpmath
import numpy as np
from rich.console import Console
from scipy import linalg, stats

from app.chain.hitting import escape_probability, excursion_count_law
from app.chain.laws import PmfTable
from app.chain.model import ModelSpec, jump_rates, recurrence_of, Recurrence
from app.chain.stationary import survival_weighted_sum
from app.errors import DomainError, MissingRateLayerError, UnsupportedRegimeError
from app.numerics.special import zeta

console = Console(stderr=True)

CLOSED_FORM_MAX_HEIGHT = 40
WEIGHT_SUM_TOLERANCE = 1e-6


def _require_rates(spec: ModelSpec):
    if spec.ct is None:
        raise MissingRateLayerError("spec has no continuous-time rate layer")


@dataclass(frozen=True)
class HypoexpLaw:
    """Sum of independent Exp(r_0), ..., Exp(r_h) with distinct rates.

    Weights c_x = prod_{y != x} r_y / (r_y - r_x) alternate in sign and grow
    combinatorially, so they are held as mpmath numbers at ``digits`` precision.
    """
    rates: np.ndarray
    weights: tuple
    digits: int

    def weight_sum(self) -> float:
        with mpmath.workdps(self.digits):
            return float(mpmath.fsum(self.weights))

    def survival(self, t: float) -> float:
        if t < 0:
            raise DomainError(f"time must be nonnegative, got {t}")
        with mpmath.workdps(self.digits):
            terms = [c * mpmath.exp(-mpmath.mpf(r) * t) for c, r in zip(self.weights, self.rates)]
            return float(mpmath.fsum(terms))


def _hypoexp_weights(rates: list, digits: int) -> tuple:
    with mpmath.workdps(digits):
        mp_rates = [mpmath.mpf(r) for r in rates]
        weights = []
        for x, rx in enumerate(mp_rates):
            weight = mpmath.mpf(1)
            for y, ry in enumerate(mp_rates):
                if y != x:
                    weight *= ry / (ry - rx)
            weights.append(weight)
        return tuple(weights)


def hypoexp_law(spec: ModelSpec, h: int) -> HypoexpLaw:
    """Duration law of an excursion of height h: the sum of the h + 1 holding times."""
    _require_rates(spec)
    if h < 0:
        raise DomainError(f"height must be nonnegative, got {h}")
    if spec.ct.lam == 0:
        raise UnsupportedRegimeError("constant rates are not distinct; use the Erlang law")
    rates = jump_rates(spec, h)
    digits = 30 + 2 * h
    for _ in range(4):
        weights = _hypoexp_weights(list(rates), digits)
        law = HypoexpLaw(rates, weights, digits)
        with mpmath.workdps(digits):
            if abs(mpmath.fsum(weights) - 1) < mpmath.mpf(10) ** (-20):
                return law
        digits *= 2
    return law


def phase_type_survival(rates: np.ndarray, t: float) -> float:
    """P(E_0 + ... + E_h > t) from the matrix exponential of the sequential phase generator."""
    rates = np.asarray(rates, dtype=float)
    generator = np.diag(-rates) + np.diag(rates[:-1], k=1)
    row = linalg.expm(generator * t)[0]
    return float(min(max(row.sum(), 0.0), 1.0))


def excursion_survival_given_height(spec: ModelSpec, h: int, t: float) -> float:
    """P(tau_bar_00 > t | H = h)."""
    _require_rates(spec)
    if t < 0:
        raise DomainError(f"time must be nonnegative, got {t}")
    if h < 0:
        raise DomainError(f"height must be nonnegative, got {h}")
    if spec.ct.lam == 0:
        return float(stats.gamma.sf(t, a=h + 1, scale=1.0 / spec.ct.r0))
    if h > CLOSED_FORM_MAX_HEIGHT:
        return phase_type_survival(jump_rates(spec, h), t)

    law = hypoexp_law(spec, h)
    if abs(law.weight_sum() - 1.0) > WEIGHT_SUM_TOLERANCE:
        console.print(f"[yellow]hypoexponential weights cancel badly at h={h}; using the phase-type form[/yellow]")
        return phase_type_survival(law.rates, t)
    return law.survival(t)


@dataclass(frozen=True)
class CtTail:
    """Tail of the CT excursion duration: a power law or an exponential bound."""
    kind: str
    exponent: Optional[float] = None
    mean_bound: Optional[float] = None


def ct_excursion_tail_exponent(spec: ModelSpec) -> CtTail:
    """P(tau_bar_00 > t) ~ t**-(alpha / (1 - lam)) for lam < 1 at beta = 1."""
    _require_rates(spec)
    if spec.beta != 1:
        raise UnsupportedRegimeError("the CT tail exponent is derived for beta = 1")
    lam = spec.ct.lam
    if lam == 1:
        raise UnsupportedRegimeError("no tail law is available at lam = 1")
    if lam < 1:
        return CtTail("power", exponent=spec.alpha / (1.0 - lam))
    return CtTail("exponential", mean_bound=1.0 / (spec.ct.r0 * (lam - 1.0)))


def ct_mean_return_time(spec: ModelSpec) -> float:
    """E tau_bar_00 = sum_y P(H >= y) / r_y = 1 / (r0 pi_bar_0)."""
    _require_rates(spec)
    if recurrence_of(spec, continuous=True) is not Recurrence.POSITIVE_RECURRENT:
        return math.inf
    return (1.0 + survival_weighted_sum(spec, spec.ct.lam).value) / spec.ct.r0


@dataclass(frozen=True)
class ExplosionReport:
    explosive: bool
    post_drift_description: str
    reciprocal_rate_sums: dict = field(default_factory=dict)
    yule_explosion_mean: Optional[float] = None
    drift_excursions: Optional[PmfTable] = None
    phi00: Optional[float] = None


def explosion_report(spec: ModelSpec, checkpoints=(10, 100, 1_000, 10_000, 100_000)) -> ExplosionReport:
    """Whether the CT chain explodes, and what it does after its last visit to 0."""
    _require_rates(spec)
    lam = spec.ct.lam
    transient = recurrence_of(spec) is Recurrence.TRANSIENT and spec.confined_to is None
    explosive = transient and lam > 1

    sums = np.cumsum(1.0 / jump_rates(spec, max(checkpoints)))
    partial = {n: float(sums[n]) for n in checkpoints}

    if not transient:
        return ExplosionReport(False, "recurrent: returns to 0 forever, no explosion", partial)

    phi00 = 1.0 - escape_probability(spec)
    excursions = excursion_count_law(spec, 20)
    if explosive:
        description = (f"after the last excursion the chain is a pure-birth Yule process at rates "
                       f"{spec.ct.r0:g}(x+1)^{lam:g} and explodes in finite time")
        return ExplosionReport(True, description, partial, zeta(lam) / spec.ct.r0, excursions, phi00)
    return ExplosionReport(False, "drifts to infinity without exploding", partial, None, excursions, phi00)
