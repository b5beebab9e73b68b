"""Canonical sequences and infinite-divisibility / self-decomposability verdicts.

A pmf pi on the nonnegative integers with pi_0 > 0 has pgf phi and canonical
function R(z) = phi'(z) / phi(z) = sum_x r_x z**x, so that

    (x + 1) pi_{x+1} = sum_{y<=x} pi_y r_{x-y}.

The law is infinitely divisible iff every r_x >= 0, and discrete
self-decomposable iff moreover r_x is nonincreasing.
"""

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np

from app.chain.laws import PmfTable
from app.chain.model import ModelSpec
from app.chain.stationary import invariant_dt
from app.errors import DomainError, NotApplicableError
from app.numerics.series import PowerSeries

DEFAULT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class CanonicalSequence:
    r: np.ndarray
    derived_from: PmfTable

    def __len__(self) -> int:
        return len(self.r)


@dataclass(frozen=True)
class DivisibilityVerdict:
    """ID/SD verdict on r_0..r_n.

    Margins are scaled by max |r_x|: ``id_margin`` is min r_x and
    ``sd_margin`` is min (r_x - r_{x+1}). A verdict that changes when the
    tolerance moves by a factor of ten either way is marked inconclusive.
    """
    id: bool
    sd: bool
    first_violation_index: Optional[int]
    tolerance_used: float
    id_margin: float = 0.0
    sd_margin: float = 0.0
    inconclusive: bool = False


def _dense_masses(pmf: PmfTable, count: int) -> np.ndarray:
    masses = pmf.dense(0)
    if len(masses) < count:
        raise DomainError(f"pmf table holds {len(masses)} masses, {count} are needed")
    return masses[:count]


def canonical_sequence(pmf: PmfTable, n: int) -> CanonicalSequence:
    """r_0..r_n from R = phi' / phi, using pi_0..pi_{n+1}."""
    if n < 0:
        raise DomainError(f"order must be nonnegative, got {n}")
    if not pmf.normalized:
        raise DomainError("canonical sequence needs a normalized pmf")
    pi = _dense_masses(pmf, n + 2)
    if pi[0] <= 0:
        raise NotApplicableError("a law without mass at 0 cannot be infinitely divisible")

    phi = PowerSeries(pi, n + 1, "pgf")
    r = (phi.derivative() / phi.truncate(n)).coeffs
    return CanonicalSequence(r, pmf)


def reconvolve(canonical: CanonicalSequence) -> np.ndarray:
    """pi_0..pi_{n+1} rebuilt from pi_0 and r_0..r_n."""
    r = canonical.r
    pi = np.zeros(len(r) + 1)
    pi[0] = canonical.derived_from.dense(0)[0]
    for x in range(len(r)):
        pi[x + 1] = np.dot(pi[: x + 1], r[x::-1]) / (x + 1)
    return pi


def _verdict_at(r: np.ndarray, tol: float) -> tuple[bool, bool, Optional[int]]:
    negative = np.flatnonzero(r < -tol)
    if negative.size:
        return False, False, int(negative[0])
    rising = np.flatnonzero(np.diff(r) > tol)
    if rising.size:
        return True, False, int(rising[0]) + 1
    return True, True, None


def classify_divisibility(pmf: PmfTable, n: int, tol: float = DEFAULT_TOLERANCE) -> DivisibilityVerdict:
    """ID iff r_x >= -tol for x <= n; SD iff also r_{x+1} <= r_x + tol. tol is relative to max |r_x|."""
    r = canonical_sequence(pmf, n).r
    scale = float(np.max(np.abs(r))) or 1.0
    tolerance = tol * scale

    is_id, is_sd, first = _verdict_at(r, tolerance)
    loose = _verdict_at(r, tolerance * 10)[:2]
    tight = _verdict_at(r, tolerance / 10)[:2]

    id_margin = float(r.min()) / scale
    sd_margin = float(-np.diff(r).min()) / scale if len(r) > 1 else math.inf
    return DivisibilityVerdict(is_id, is_sd, first, tolerance, id_margin, sd_margin, loose != tight)


def geometric_mixture_canonical(p: float, pi0: float, n: int) -> np.ndarray:
    """r_x = q**(x+1) - (1 - p/pi0)**(x+1) for pi0 delta_0 + (1 - pi0) Geometric_{>=1}(p)."""
    if not (0 < p < 1 and 0 < pi0 <= 1):
        raise DomainError(f"need 0 < p < 1 and 0 < pi0 <= 1, got p={p}, pi0={pi0}")
    x = np.arange(n + 1)
    return (1.0 - p) ** (x + 1) - (1.0 - p / pi0) ** (x + 1)


def geometric_mixture_pmf(p: float, pi0: float, xmax: int) -> PmfTable:
    x = np.arange(1, xmax + 1)
    masses = np.concatenate(([pi0], (1.0 - pi0) * p * (1.0 - p) ** (x - 1)))
    return PmfTable(0, masses, True, (1.0 - pi0) * (1.0 - p) ** xmax)


def is_log_convex(pmf: PmfTable, tol: float = 1e-12) -> bool:
    """pi_x**2 <= pi_{x-1} pi_{x+1} at every interior point of the table."""
    pi = pmf.dense(0)
    if len(pi) < 3:
        return True
    if np.any(pi <= 0):
        return False
    logs = np.log(pi)
    return bool(np.all(2 * logs[1:-1] <= logs[:-2] + logs[2:] + tol))


def shifted_positive_part(pmf: PmfTable) -> PmfTable:
    """Law of Y - 1 where Y is the law conditioned on being positive."""
    tail = pmf.dense(0)[1:]
    total = math.fsum(tail) + pmf.tail_mass_bound
    return PmfTable(0, tail / total, True, pmf.tail_mass_bound / total, provenance="shifted")


@dataclass(frozen=True)
class ScanPoint:
    p0: float
    verdict: DivisibilityVerdict


def scan_p0(spec_factory: Callable[[float], ModelSpec], grid: Iterable[float], n: int = 50,
            law: Callable[[ModelSpec, int], PmfTable] = invariant_dt) -> list[ScanPoint]:
    """Classify the law produced by ``spec_factory(p0)`` across a p0 grid."""
    return [ScanPoint(p0, classify_divisibility(law(spec_factory(p0), n + 1), n)) for p0 in grid]


def first_flip(points: list[ScanPoint], attribute: str) -> Optional[float]:
    """Last grid value where the verdict still holds, before it first turns false."""
    previous = None
    for point in points:
        if not getattr(point.verdict, attribute):
            return previous
        previous = point.p0
    return None
