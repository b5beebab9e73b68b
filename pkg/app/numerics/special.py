"""Series kernels for hypergeometric, polylogarithm, zeta and L_nu functions.

Every positive series is summed in chunks of vectorised term ratios. Once the
ratio of consecutive terms is bounded by ``rho < 1`` the remainder after the
last summed term ``t`` is at most ``t * rho / (1 - rho)``, which is what
``SeriesValue.tail_bound`` records.
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from rich.console import Console
from scipy import special as sp

from app.errors import DivergentSeriesError, DomainError

console = Console(stderr=True)

DEFAULT_TOLERANCE = 1e-12
MAX_TERMS = 10_000_000


@dataclass(frozen=True)
class SeriesValue:
    """A truncated series together with a bound on what was left out."""
    value: float
    terms_used: int
    tail_bound: float

    def __float__(self) -> float:
        return self.value


def _sum_ratio_series(
    first: float,
    ratio: Callable[[np.ndarray], np.ndarray],
    limit_ratio: float,
    tol: float,
    max_terms: int,
) -> SeriesValue:
    """Sum t_0 + t_1 + ... where t_{n+1} = t_n * ratio(n).

    ``limit_ratio`` is the limit of ``ratio(n)``; the tail estimate uses the
    larger of it and the latest ratio.
    """
    partials = []
    term = first
    start = 0
    chunk = 256
    while True:
        n = np.arange(start, start + chunk, dtype=float)
        r = ratio(n)
        terms = term * np.concatenate(([1.0], np.cumprod(r[:-1])))
        partials.append(math.fsum(terms))
        term = terms[-1] * r[-1]
        start += chunk

        rho = max(abs(r[-1]), abs(limit_ratio))
        if term == 0.0:
            return SeriesValue(math.fsum(partials), start, 0.0)
        if rho < 1:
            bound = abs(term) / (1.0 - rho)
            if bound <= tol:
                return SeriesValue(math.fsum(partials), start, bound)
        else:
            bound = math.inf

        if start >= max_terms:
            if not math.isfinite(bound):
                raise DivergentSeriesError(f"series did not settle within {max_terms} terms")
            console.print(f"[yellow]series stopped at the term cap with tail bound {bound:.3e}[/yellow]")
            return SeriesValue(math.fsum(partials), start, bound)
        chunk = min(chunk * 2, 65536)


def gauss_2f1(a: float, b: float, c: float, z: float,
              tol: float = DEFAULT_TOLERANCE, max_terms: int = MAX_TERMS) -> SeriesValue:
    """Gauss hypergeometric series 2F1(a, b; c; z) for z in [0, 1]."""
    if c <= 0 and float(c).is_integer():
        raise DomainError(f"c must not be a nonpositive integer, got {c}")
    if not 0 <= z <= 1:
        raise DomainError(f"z must lie in [0, 1], got {z}")
    if z == 1:
        return SeriesValue(gauss_2f1_at_one(a, b, c), 0, 0.0)
    if z == 0 or a == 0 or b == 0:
        return SeriesValue(1.0, 1, 0.0)

    def ratio(n):
        return z * (a + n) * (b + n) / ((c + n) * (n + 1.0))

    return _sum_ratio_series(1.0, ratio, z, tol, max_terms)


def gauss_2f1_at_one(a: float, b: float, c: float) -> float:
    """Gauss summation Gamma(c)Gamma(c-a-b) / (Gamma(c-a)Gamma(c-b))."""
    excess = c - a - b
    if excess <= 0:
        raise DivergentSeriesError(f"2F1 diverges at z = 1 when c - a - b = {excess} <= 0")
    if a == 0 or b == 0:
        return 1.0
    args = np.array([c, excess, c - a, c - b])
    logs = sp.gammaln(args)
    signs = sp.gammasgn(args)
    sign = signs[0] * signs[1] * signs[2] * signs[3]
    return float(sign * math.exp(logs[0] + logs[1] - logs[2] - logs[3]))


def zeta(alpha: float) -> float:
    """Riemann zeta function for alpha > 1."""
    if alpha <= 1:
        raise DivergentSeriesError(f"zeta diverges for alpha = {alpha} <= 1")
    return float(sp.zeta(alpha))


def hurwitz_tail(alpha: float, start: float) -> float:
    """Sum of x**-alpha over x >= start."""
    if alpha <= 1:
        raise DivergentSeriesError(f"power tail diverges for alpha = {alpha} <= 1")
    return float(sp.zeta(alpha, start))


def polylog(alpha: float, z: float,
            tol: float = DEFAULT_TOLERANCE, max_terms: int = MAX_TERMS) -> SeriesValue:
    """Polylogarithm Li_alpha(z) = sum_{n>=1} z**n / n**alpha on [0, 1]."""
    if not 0 <= z <= 1:
        raise DomainError(f"z must lie in [0, 1], got {z}")
    if z == 1:
        return SeriesValue(zeta(alpha), 0, 0.0)
    if z == 0:
        return SeriesValue(0.0, 0, 0.0)

    def ratio(k):
        return z * ((k + 1.0) / (k + 2.0)) ** alpha

    return _sum_ratio_series(z, ratio, z, tol, max_terms)


def l_nu(nu: float, z: float,
         tol: float = DEFAULT_TOLERANCE, max_terms: int = MAX_TERMS) -> SeriesValue:
    """L_nu(z) = sum_{n>=1} z**n / (nu + n)."""
    if not nu > -1:
        raise DomainError(f"nu must exceed -1, got {nu}")
    if not 0 <= z < 1:
        raise DomainError(f"z must lie in [0, 1), got {z}")
    if z == 0:
        return SeriesValue(0.0, 0, 0.0)

    def ratio(k):
        return z * (nu + k + 1.0) / (nu + k + 2.0)

    return _sum_ratio_series(z / (nu + 1.0), ratio, z, tol, max_terms)
