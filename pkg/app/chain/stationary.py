"""Invariant measures, integrability criteria and stationary generating functions."""

import math
from dataclasses import dataclass
from typing import Optional

import mpmath
import numpy as np
from scipy import integrate
from scipy import special as sp

from app.chain.laws import PmfTable
from app.chain.model import (
    ModelKind,
    ModelSpec,
    Recurrence,
    log_growth_probs,
    log_survival,
    recurrence_of,
)
from app.errors import (
    DomainError,
    MissingRateLayerError,
    NoInvariantMeasureError,
    UnsupportedRegimeError,
)
from app.numerics.special import SeriesValue, gauss_2f1, hurwitz_tail, polylog, zeta


SUM_TOLERANCE = 1e-15
MAX_SUM_TERMS = 10_000_000
DIRECT_HEAD = 1 << 16
TAIL_DIGITS = 30


@dataclass(frozen=True)
class CriterionReport:
    """Finiteness of C1 = sum q_y, C2 = sum prod p_y and the CT analogue of C2."""
    c1_finite: bool
    c2_finite: bool
    c2_value: Optional[float] = None
    ct_c2_finite: Optional[bool] = None
    ct_c2_value: Optional[float] = None


def log_survival_smooth(spec: ModelSpec, s) -> np.ndarray:
    """Closed-form log prod_{y<s} p_y at beta = 1, valid for real s >= 1."""
    if spec.beta != 1:
        raise UnsupportedRegimeError("the survival product has a closed form only at beta = 1")
    s = np.asarray(s, dtype=float)
    if spec.kind is ModelKind.MODEL_B:
        return math.log(spec.p0) - spec.alpha * np.log(s)
    nu, alpha = spec.nu, spec.alpha
    return (math.log(spec.p0) + sp.gammaln(nu + 1) - sp.gammaln(nu + 1 - alpha)
            + sp.gammaln(nu + s - alpha) - sp.gammaln(nu + s))


def _smooth_term(spec: ModelSpec, lam: float):
    """s -> (s+1)**-lam prod_{y<s} p_y as an mpmath function, for beta = 1."""
    alpha, lam = mpmath.mpf(spec.alpha), mpmath.mpf(lam)
    if spec.kind is ModelKind.MODEL_B:
        p0 = mpmath.mpf(spec.p0)
        return lambda s: p0 * s ** -alpha * (s + 1) ** -lam
    nu = mpmath.mpf(spec.nu)
    offset = mpmath.log(spec.p0) + mpmath.loggamma(nu + 1) - mpmath.loggamma(nu + 1 - alpha)
    return lambda s: mpmath.exp(offset + mpmath.loggamma(nu + s - alpha) - mpmath.loggamma(nu + s)) * (s + 1) ** -lam


def _euler_maclaurin_tail(spec: ModelSpec, lam: float, n: int) -> SeriesValue:
    """sum_{x>=n} (x+1)**-lam prod_{y<x} p_y by Euler-Maclaurin summation."""
    with mpmath.workdps(TAIL_DIGITS):
        value, error = mpmath.sumem(_smooth_term(spec, lam), [n, mpmath.inf], error=True)
    return SeriesValue(float(value), 0, float(abs(error)))


def _critical_sum(spec: ModelSpec, lam: float, start: int) -> SeriesValue:
    """sum_{x>=start} (x+1)**-lam prod_{y<x} p_y at beta = 1."""
    alpha = spec.alpha
    if alpha + lam <= 1:
        return SeriesValue(math.inf, 0, 0.0)

    if lam == 0:
        if spec.kind is ModelKind.MODEL_B:
            return SeriesValue(spec.p0 * hurwitz_tail(alpha, start), 0, 0.0)
        # sum_{x>=M} Gamma(x+a)/Gamma(x+b) = Gamma(M+a) / ((b-a-1) Gamma(M+b-1))
        nu = spec.nu
        log_value = (math.log(spec.p0) + sp.gammaln(nu + 1) - sp.gammaln(nu + 1 - alpha)
                     + sp.gammaln(start + nu - alpha) - sp.gammaln(start + nu - 1)
                     - math.log(alpha - 1))
        return SeriesValue(math.exp(log_value), 0, 0.0)

    stop = start + DIRECT_HEAD
    xs = np.arange(start, stop, dtype=float)
    head = math.fsum(np.exp(log_survival_smooth(spec, xs)) * (xs + 1) ** -lam)

    tail = _euler_maclaurin_tail(spec, lam, stop)
    return SeriesValue(head + tail.value, DIRECT_HEAD, tail.tail_bound)


def _stretched_constant(spec: ModelSpec) -> float:
    """c with q_y >= c * y**-beta for y >= 1."""
    if spec.kind is ModelKind.MODEL_A:
        return spec.alpha / (abs(spec.nu) + 1.0)
    return spec.alpha * 2.0 ** (-spec.alpha - 1.0)


def _direct_sum(spec: ModelSpec, lam: float, start: int, tol: float, max_terms: int) -> SeriesValue:
    """Chunked summation with the stretched-exponential tail bound."""
    log_u = log_survival(spec, start)[-1]
    c = _stretched_constant(spec)
    gap = 1.0 - spec.beta
    partials = []
    x = start
    chunk = 1024
    while True:
        xs = np.arange(x, x + chunk, dtype=float)
        logp = log_growth_probs(spec, xs)
        logs = log_u + np.concatenate(([0.0], np.cumsum(logp[:-1])))
        weights = (xs + 1.0) ** -lam
        partials.append(math.fsum(weights * np.exp(logs)))
        log_u = logs[-1] + logp[-1]
        x += chunk

        if log_u == -np.inf:
            return SeriesValue(math.fsum(partials), x - start, 0.0)
        if gap > 0:
            anchor = x ** gap

            def envelope(s, anchor=anchor):
                return (s + 1.0) ** -lam * math.exp(-c * (s ** gap - anchor) / gap)

            integral, _ = integrate.quad(envelope, x, np.inf, limit=200)
            bound = math.exp(log_u) * ((x + 1.0) ** -lam + integral)
            if bound <= tol:
                return SeriesValue(math.fsum(partials), x - start, bound)
        if x - start >= max_terms:
            return SeriesValue(math.fsum(partials), x - start, math.inf if gap <= 0 else bound)
        chunk = min(chunk * 2, 1 << 20)


def survival_weighted_sum(spec: ModelSpec, lam: float = 0.0, start: int = 1,
                          tol: float = SUM_TOLERANCE, max_terms: int = MAX_SUM_TERMS) -> SeriesValue:
    """sum_{x>=start} (x+1)**-lam prod_{y<x} p_y, infinite when it diverges.

    With lam = 0 and start = 1 this is C2; with lam the CT constant.
    """
    if spec.confined_to is not None:
        return _direct_sum(spec, lam, start, tol, max_terms)
    if spec.beta > 1:
        return SeriesValue(math.inf, 0, 0.0)
    if spec.beta == 1:
        return _critical_sum(spec, lam, start)
    return _direct_sum(spec, lam, start, tol, max_terms)


def criteria(spec: ModelSpec) -> CriterionReport:
    """Decide finiteness of C1, C2 and the CT constant; give C2 when finite."""
    c1_finite = spec.beta > 1
    c2_finite = recurrence_of(spec) is Recurrence.POSITIVE_RECURRENT
    c2_value = None
    if c2_finite:
        if spec.beta == 1 and spec.kind is ModelKind.MODEL_A:
            c2_value = spec.p0 * spec.nu / (spec.alpha - 1)
        elif spec.beta == 1:
            c2_value = spec.p0 * zeta(spec.alpha)
        else:
            c2_value = survival_weighted_sum(spec).value

    ct_finite = ct_value = None
    if spec.ct is not None:
        ct_finite = recurrence_of(spec, continuous=True) is Recurrence.POSITIVE_RECURRENT
        if ct_finite:
            ct_value = survival_weighted_sum(spec, spec.ct.lam).value
    return CriterionReport(c1_finite, c2_finite, c2_value, ct_finite, ct_value)


def _invariant_table(spec: ModelSpec, xmax: int, lam: float, recurrence: Recurrence) -> PmfTable:
    if recurrence is Recurrence.TRANSIENT and spec.confined_to is None:
        raise NoInvariantMeasureError("transient chain has no invariant measure")

    x = np.arange(xmax + 1, dtype=float)
    measure = np.exp(log_survival(spec, xmax)) * (x + 1.0) ** -lam
    if recurrence is Recurrence.NULL_RECURRENT:
        return PmfTable(0, measure, False, math.inf)

    total = survival_weighted_sum(spec, lam, start=1)
    if not math.isfinite(total.value):
        return PmfTable(0, measure, False, math.inf)
    pi0 = 1.0 / (1.0 + total.value)
    tail = survival_weighted_sum(spec, lam, start=xmax + 1)
    tail_mass = pi0 * (tail.value + tail.tail_bound + total.tail_bound)
    return PmfTable(0, pi0 * measure, True, tail_mass)


def invariant_dt(spec: ModelSpec, xmax: int) -> PmfTable:
    """pi_x = pi_0 prod_{y<x} p_y; normalised when positive recurrent, pi_0 = 1 when null."""
    return _invariant_table(spec, xmax, 0.0, recurrence_of(spec))


def invariant_ct(spec: ModelSpec, xmax: int) -> PmfTable:
    """Invariant law of the CT chain, proportional to prod_{y<x} p_y / (x+1)**lam."""
    if spec.ct is None:
        raise MissingRateLayerError("spec has no continuous-time rate layer")
    return _invariant_table(spec, xmax, spec.ct.lam, recurrence_of(spec, continuous=True))


def psi_infinity(spec: ModelSpec, z: float) -> float:
    """pgf of Y = X | X >= 1 under the stationary law, critical case."""
    if spec.beta != 1 or spec.alpha <= 1:
        raise UnsupportedRegimeError("closed-form stationary pgf needs beta = 1 and alpha > 1")
    if spec.kind is ModelKind.MODEL_B:
        return polylog(spec.alpha, z).value / zeta(spec.alpha)
    nu, alpha = spec.nu, spec.alpha
    return (alpha - 1) * z / nu * gauss_2f1(1.0, nu + 1 - alpha, nu + 1, z).value


def stationary_pgf(spec: ModelSpec, z: float) -> float:
    """E z**X under the stationary law: pi_0 + (1 - pi_0) psi_inf(z)."""
    if not 0 <= z <= 1:
        raise DomainError(f"z must lie in [0, 1], got {z}")
    if recurrence_of(spec) is not Recurrence.POSITIVE_RECURRENT:
        raise NoInvariantMeasureError("stationary pgf needs a positive recurrent chain")
    if z == 1:
        return 1.0
    pi0 = 1.0 / (1.0 + criteria(spec).c2_value)
    return pi0 + (1.0 - pi0) * psi_infinity(spec, z)


def zipf_moment(alpha: float, q: float) -> float:
    """E Y**q = zeta(alpha - q) / zeta(alpha) for Y ~ Zipf(alpha)."""
    if not alpha > 1:
        raise DomainError(f"Zipf law needs alpha > 1, got {alpha}")
    if not 0 <= q < alpha - 1:
        raise DomainError(f"moment order must lie in [0, {alpha - 1}), got {q}")
    if q == 0:
        return 1.0
    return zeta(alpha - q) / zeta(alpha)


def stationary_moment(spec: ModelSpec, q: float) -> float:
    """E X**q under the stationary law of Model B at beta = 1."""
    if spec.kind is not ModelKind.MODEL_B or spec.beta != 1:
        raise UnsupportedRegimeError("closed-form stationary moments exist for Model B at beta = 1")
    if q == 0:
        return 1.0
    c2 = spec.p0 * zeta(spec.alpha)
    return c2 * zipf_moment(spec.alpha, q) / (1.0 + c2)
