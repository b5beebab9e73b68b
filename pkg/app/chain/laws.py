"""Discrete laws shared by the chain modules."""

import math
from dataclasses import dataclass

import numpy as np
from rich.console import Console
from scipy import special as sp

from app.errors import DomainError

console = Console(stderr=True)

NORMALIZATION_SLACK = 1e-9


@dataclass(frozen=True)
class PmfTable:
    """Masses of a law on support_start, support_start + 1, ...

    ``tail_mass_bound`` covers mass beyond the table on the integers and
    ``defect`` the mass sitting at infinity (defective laws).
    """
    support_start: int
    masses: np.ndarray
    normalized: bool
    tail_mass_bound: float = 0.0
    defect: float = 0.0
    provenance: str = "analytic"

    def __post_init__(self):
        masses = np.asarray(self.masses, dtype=float)
        if masses.size and masses.min() < 0:
            raise DomainError(f"negative mass {masses.min():.3e} in pmf table")
        object.__setattr__(self, "masses", masses)
        if self.normalized and math.isfinite(self.tail_mass_bound):
            total = math.fsum(masses) + self.tail_mass_bound + self.defect
            if abs(total - 1.0) > NORMALIZATION_SLACK:
                console.print(
                    f"[yellow]pmf table accounts for {total:.12f} of the mass; tail bound is loose[/yellow]"
                )

    @property
    def support(self) -> np.ndarray:
        return np.arange(self.support_start, self.support_start + len(self.masses))

    @property
    def stop(self) -> int:
        """One past the last tabulated point."""
        return self.support_start + len(self.masses)

    def pmf(self, x: int) -> float:
        if self.support_start <= x < self.stop:
            return float(self.masses[x - self.support_start])
        return 0.0

    def survival(self, x: int) -> float:
        """Tabulated mass at points >= x."""
        if x >= self.stop:
            return 0.0
        return math.fsum(self.masses[max(x - self.support_start, 0):])

    def total(self) -> float:
        return math.fsum(self.masses)

    def mean(self) -> float:
        return math.fsum(self.support * self.masses)

    def dense(self, start: int = 0) -> np.ndarray:
        """Masses re-indexed from ``start``, zero-padded below support_start."""
        if self.support_start < start:
            return self.masses[start - self.support_start:]
        return np.concatenate((np.zeros(self.support_start - start), self.masses))


def renormalized(table: PmfTable) -> PmfTable:
    """The table conditioned on its own support."""
    masses = table.masses / table.total()
    return PmfTable(table.support_start, masses, True, 0.0, 0.0, table.provenance)


def sibuya_log_tail(alpha: float, nu: float, x: np.ndarray) -> np.ndarray:
    """log P(S > x) for the extended Sibuya law, x >= 0."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (sp.gammaln(nu + 1) + sp.gammaln(nu + x + 1 - alpha)
               - sp.gammaln(nu + 1 - alpha) - sp.gammaln(nu + x + 1))
    if nu + 1 - alpha == 0:
        out = np.where(x >= 1, -np.inf, 0.0)
    return out


def sibuya_pmf_table(alpha: float, nu: float, xmax: int) -> PmfTable:
    """Extended Sibuya(alpha, nu) masses s_1..s_xmax.

    s_1 = alpha / (nu + 1) and s_{x+1} / s_x = (nu - alpha + x) / (nu + x + 1).
    """
    if not (alpha > 0 and nu > -1 and alpha <= nu + 1):
        raise DomainError(f"Sibuya law needs 0 < alpha <= nu + 1, got alpha={alpha}, nu={nu}")
    k = np.arange(1, xmax, dtype=float)
    with np.errstate(divide="ignore"):
        log_ratios = np.log(nu - alpha + k) - np.log(nu + k + 1)
    logs = math.log(alpha / (nu + 1)) + np.concatenate(([0.0], np.cumsum(log_ratios)))
    tail = float(np.exp(sibuya_log_tail(alpha, nu, np.array([xmax]))[0]))
    return PmfTable(1, np.exp(logs[:xmax]), True, tail)


def sibuya_pmf(alpha: float, nu: float, x: int) -> float:
    if x < 1:
        return 0.0
    return sibuya_pmf_table(alpha, nu, x).masses[-1]


def pareto_pmf_table(alpha: float, xmax: int) -> PmfTable:
    """Discrete Pareto masses P(P = x) = x**-alpha - (x + 1)**-alpha for x = 1..xmax."""
    if not alpha > 0:
        raise DomainError(f"Pareto law needs alpha > 0, got {alpha}")
    x = np.arange(1, xmax + 1, dtype=float)
    masses = x ** -alpha * -np.expm1(-alpha * np.log1p(1.0 / x))
    return PmfTable(1, masses, True, float((xmax + 1.0) ** -alpha))


def pareto_pmf(alpha: float, x: int) -> float:
    if x < 1:
        return 0.0
    return float(x ** -alpha * -math.expm1(-alpha * math.log1p(1.0 / x)))


def thinned_sibuya_pmf(alpha: float, pi0: float, xmax: int) -> PmfTable:
    """Law with pgf 1 - (1 - pi0)(1 - z)**(alpha - 1), for alpha in (1, 2)."""
    if not 1 < alpha < 2:
        raise DomainError(f"alpha must lie in (1, 2), got {alpha}")
    sibuya = sibuya_pmf_table(alpha - 1.0, 0.0, xmax)
    masses = np.concatenate(([pi0], (1.0 - pi0) * sibuya.masses))
    return PmfTable(0, masses, True, (1.0 - pi0) * sibuya.tail_mass_bound)
