"""Green kernels, first-return generating functions and contact probabilities."""

import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import special as sp

from app.chain.hitting import (
    escape_probability,
    first_passage_down_pmf,
    return_pgf_partial,
    return_time_pgf,
    return_time_pmf,
)
from app.chain.model import ModelKind, ModelSpec, Recurrence, log_growth_probs, log_survival, recurrence_of
from app.chain.stationary import criteria, invariant_dt
from app.errors import DomainError, UnsupportedRegimeError
from app.numerics.series import PowerSeries

MAX_ORDER = 10_000


def return_time_series(spec: ModelSpec, order: int) -> PowerSeries:
    """phi_00(z) as a power series: coefficient k is P(tau_00 = k)."""
    masses = return_time_pmf(spec, max(order - 1, 0)).masses
    return PowerSeries(np.concatenate(([0.0], masses)), order, "pgf of tau_00")


def _renewal_series(spec: ModelSpec, order: int) -> PowerSeries:
    """g_00(z) = 1 / (1 - phi_00(z))."""
    return (PowerSeries.one(order) - return_time_series(spec, order)).reciprocal()


def _check_order(order: int, limit: int = MAX_ORDER):
    if not 0 <= order <= limit:
        raise DomainError(f"series order must lie in [0, {limit}], got {order}")


def green_diag(spec: ModelSpec, x: int, order: int) -> PowerSeries:
    """g_{x,x}(z) = N_x(z) / (1 - phi_00(z)), N_x(z) = 1 - sum_{k<=x} P(tau_00 = k) z**k."""
    _check_order(order)
    if x < 0:
        raise DomainError(f"state must be nonnegative, got {x}")
    phi = return_time_series(spec, order)
    numerator = PowerSeries.one(order)
    numerator.coeffs[1 : x + 1] -= phi.coeffs[1 : x + 1]
    return numerator * _renewal_series(spec, order)


def green_kernel(spec: ModelSpec, x: int, y: int, order: int) -> PowerSeries:
    """Coefficient n of g_{x,y}(z) is P^n(x, y).

    Below the diagonal every path from x to y passes through 0, so when x is
    out of reach of y (a chain confined near the origin) the kernel is
    g_{x,y} = F_{x,0} * g_{0,y} with F_{x,0} the pgf of the first passage down.
    """
    _check_order(order)
    if x < 0 or y < 0:
        raise DomainError("states must be nonnegative")
    if y == x:
        return green_diag(spec, x, order)
    log_u = log_survival(spec, max(x, y))
    if y > x:
        climb = math.exp(math.fsum(log_growth_probs(spec, np.arange(x, y, dtype=float))))
        return (green_diag(spec, x, order) * climb).shift(y - x).truncate(order)

    if log_u[x] == -math.inf:
        down = first_passage_down_pmf(spec, x, max(order, 1)).masses
        passage = PowerSeries(np.concatenate(([0.0], down)), order, "pgf of tau_{x,0}")
        return (passage * green_kernel(spec, 0, y, order)).truncate(order)
    diag = green_diag(spec, x, order + x - y)
    return PowerSeries(diag.coeffs[x - y :] / math.exp(log_u[x] - log_u[y]), order, diag.radius_note)


def first_passage_pgf_series(spec: ModelSpec, x: int, y: int, order: int) -> PowerSeries:
    """phi_{x,y}(z) = g_{x,y}(z) / g_{y,y}(z)."""
    return green_kernel(spec, x, y, order) / green_diag(spec, y, order)


def first_return_pgf_at(spec: ModelSpec, x: int, z: float) -> float:
    """phi_{x,x}(z), the pgf of the first return time to x.

    Both sums use prod_{y=0}^{x'-1} p_y:
    sum_{x'>=x} z**(x'+1) q_x' prod p / (1 - sum_{x'<x} z**(x'+1) q_x' prod p).
    """
    if x < 0:
        raise DomainError(f"state must be nonnegative, got {x}")
    if not 0 <= z <= 1:
        raise DomainError(f"z must lie in [0, 1], got {z}")
    if x == 0:
        return return_time_pgf(spec, z).value
    if z == 1:
        reach = math.exp(log_survival(spec, x)[-1])
        return 1.0 - escape_probability(spec) / reach
    above = return_pgf_partial(spec, z, start=x).value
    below = return_time_series(spec, x)(z)
    return above / (1.0 - below)


def mean_first_return_at(spec: ModelSpec, x: int) -> float:
    """E tau_{x,x} = 1 / pi_x for a positive recurrent chain."""
    if recurrence_of(spec) is not Recurrence.POSITIVE_RECURRENT:
        return math.inf
    return 1.0 / invariant_dt(spec, x).masses[-1]


def contact_probability(spec: ModelSpec, nmax: int) -> np.ndarray:
    """u_n = P_0(X_n = 0) for n = 0..nmax by the renewal recursion u_n = sum f_k u_{n-k}."""
    if nmax < 0:
        raise DomainError(f"nmax must be nonnegative, got {nmax}")
    return _renewal_series(spec, nmax).coeffs


class ContactRegime(str, enum.Enum):
    ALGEBRAIC = "algebraic"
    LOGARITHMIC = "logarithmic"
    CONSTANT = "constant"


@dataclass(frozen=True)
class ContactAsymptote:
    """Large-n behaviour of P_0(X_n = 0) in the critical case.

    ALGEBRAIC: constant * n**-(1 - alpha). LOGARITHMIC: 1 / (rate * log n),
    refined to 1 / (rate * (log n + euler_gamma) + offset). CONSTANT: pi_0.
    """
    regime: ContactRegime
    exponent: float
    constant: float
    published_constant: float
    rate: Optional[float] = None
    offset: Optional[float] = None
    note: str = ""

    def predict(self, n: float) -> float:
        if self.regime is ContactRegime.ALGEBRAIC:
            return self.constant * n ** -self.exponent
        if self.regime is ContactRegime.LOGARITHMIC:
            return self.constant / math.log(n)
        return self.constant

    def predict_refined(self, n: float) -> float:
        if self.regime is ContactRegime.LOGARITHMIC:
            return 1.0 / (self.rate * (math.log(n) + np.euler_gamma) + self.offset)
        return self.predict(n)


def contact_asymptote(spec: ModelSpec) -> ContactAsymptote:
    """Regime, exponent and constant of the contact probability at beta = 1."""
    if spec.beta != 1:
        raise UnsupportedRegimeError("contact asymptotics are derived for beta = 1")
    if spec.confined_to is not None:
        raise UnsupportedRegimeError(
            f"chain is confined to {{0, .., {spec.confined_to}}}: P_0(X_n = 0) has no decaying asymptote"
        )
    alpha, p0 = spec.alpha, spec.p0

    if alpha < 1:
        base = 1.0 / (p0 * sp.gamma(1 - alpha) * sp.gamma(alpha))
        if spec.kind is ModelKind.MODEL_A:
            ratio = math.exp(sp.gammaln(spec.nu + 1 - alpha) - sp.gammaln(spec.nu + 1))
            return ContactAsymptote(ContactRegime.ALGEBRAIC, 1 - alpha, base * ratio, base * ratio)
        return ContactAsymptote(
            ContactRegime.ALGEBRAIC, 1 - alpha, base, 1.0 / (p0 * sp.gamma(1 - alpha)),
            note="published Model B constant lacks the 1/Gamma(alpha) factor",
        )

    if alpha == 1:
        if spec.kind is ModelKind.MODEL_A:
            rate = p0 * spec.nu
            offset = 1.0 + p0 - rate * (sp.digamma(spec.nu + 1) + np.euler_gamma)
        else:
            rate = p0
            offset = 1.0
        return ContactAsymptote(ContactRegime.LOGARITHMIC, 0.0, 1.0 / rate, 1.0 / rate, rate, offset)

    pi0 = 1.0 / (1.0 + criteria(spec).c2_value)
    return ContactAsymptote(ContactRegime.CONSTANT, 0.0, pi0, pi0)


def fit_contact_constant(spec: ModelSpec, n: int) -> float:
    """Series estimate of the leading constant: u_n rescaled by the regime's shape."""
    asymptote = contact_asymptote(spec)
    u_n = contact_probability(spec, n)[-1]
    if asymptote.regime is ContactRegime.ALGEBRAIC:
        return u_n * n ** asymptote.exponent
    if asymptote.regime is ContactRegime.LOGARITHMIC:
        return u_n * math.log(n)
    return u_n
