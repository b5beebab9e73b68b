"""Binomial thinning, complete monotonicity and closed-form divisibility cases."""

from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np

from app.chain.laws import PmfTable, thinned_sibuya_pmf
from app.chain.model import model_a
from app.divisibility.canonical import DivisibilityVerdict, classify_divisibility
from app.errors import DomainError, NotApplicableError
from app.numerics.series import PowerSeries

MONOTONICITY_TOLERANCE = 1e-12
SPECIAL_CASE_ORDER = 60


@dataclass(frozen=True)
class MonotonicityResult:
    passed: bool
    first_violation: Optional[tuple[int, int]] = None  # (order k, index x)


def complete_monotonicity_check(tail, kmax: int, tol: float = MONOTONICITY_TOLERANCE) -> MonotonicityResult:
    """Check (-1)**k Delta**k F(x) >= -tol for k = 0..kmax over the available range."""
    tail = np.asarray(tail, dtype=float)
    if tail.size == 0:
        return MonotonicityResult(True)
    if tail.min() < 0 or tail.max() > 1 or np.any(np.diff(tail) > tol):
        raise DomainError("tail must be nonincreasing with values in [0, 1]")

    for k in range(kmax + 1):
        if k >= tail.size:
            break
        signed = (-1) ** k * np.diff(tail, n=k)
        bad = np.flatnonzero(signed < -tol)
        if bad.size:
            return MonotonicityResult(False, (k, int(bad[0])))
    return MonotonicityResult(True)


def thinning_remainder(pmf: PmfTable, u: float, n: int) -> np.ndarray:
    """Coefficients 0..n of phi(z) / phi(1 - u(1 - z)).

    They are all nonnegative iff X = u o X + R with R independent, i.e. the
    self-decomposition at this u exists.
    """
    if not 0 < u < 1:
        raise DomainError(f"thinning parameter must lie in (0, 1), got {u}")
    pi = pmf.dense(0)
    if pi[0] <= 0:
        raise NotApplicableError("the law has no mass at 0")
    order = len(pi) - 1
    if n > order:
        raise DomainError(f"pmf table holds {len(pi)} masses, {n + 1} are needed")

    phi = PowerSeries(pi, order, "pgf")
    return (phi.truncate(n) / phi.thin(u, n)).coeffs


def thinning_scan(pmf: PmfTable, grid: Iterable[float], n: int, tol: float = 1e-10) -> dict[float, float]:
    """Smallest remainder coefficient for each u; negatives beyond -tol rule out SD."""
    return {u: float(thinning_remainder(pmf, u, n).min()) for u in grid}


@dataclass(frozen=True)
class SibuyaSpecialCase:
    """Stationary law of Model A with nu = 1, beta = 1 and alpha in (1, 2).

    Its pgf is 1 - (1 - pi0)(1 - z)**(alpha - 1); it is ID iff p0 <= 2 - alpha
    and SD iff p0 <= 1 - alpha / 2.
    """
    alpha: float
    p0: float
    pi0: float
    id: bool
    sd: bool
    verdict: DivisibilityVerdict

    @property
    def pgf(self) -> Callable[[float], float]:
        return lambda z: 1.0 - (1.0 - self.pi0) * (1.0 - z) ** (self.alpha - 1.0)

    @property
    def agrees(self) -> bool:
        """Closed-form thresholds and the canonical-sequence verdict coincide."""
        if self.verdict.inconclusive:
            return True
        return self.verdict.id == self.id and self.verdict.sd == self.sd


def sibuya_stationary_special_case(alpha: float, p0: float, n: int = SPECIAL_CASE_ORDER) -> SibuyaSpecialCase:
    if not 1 < alpha < 2:
        raise DomainError(f"alpha must lie in (1, 2), got {alpha}")
    model_a(alpha, nu=1.0, p0=p0)

    pi0 = (alpha - 1.0) / (alpha - 1.0 + p0)
    verdict = classify_divisibility(thinned_sibuya_pmf(alpha, pi0, n + 1), n)
    return SibuyaSpecialCase(alpha, p0, pi0, p0 <= 2.0 - alpha, p0 <= 1.0 - alpha / 2.0, verdict)
