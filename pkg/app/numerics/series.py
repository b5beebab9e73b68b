"""Truncated power series arithmetic for generating functions."""

from dataclasses import dataclass

import numpy as np
from scipy import stats

from app.errors import DomainError


@dataclass(frozen=True)
class PowerSeries:
    """Coefficients c_0..c_N of a series known up to ``truncation_order`` = N."""
    coeffs: np.ndarray
    truncation_order: int
    radius_note: str = ""

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=float)
        if coeffs.ndim != 1:
            raise DomainError("coefficients must be one-dimensional")
        if len(coeffs) < self.truncation_order + 1:
            coeffs = np.concatenate((coeffs, np.zeros(self.truncation_order + 1 - len(coeffs))))
        object.__setattr__(self, "coeffs", coeffs[: self.truncation_order + 1])

    @classmethod
    def from_coeffs(cls, coeffs, note: str = "") -> "PowerSeries":
        coeffs = np.asarray(coeffs, dtype=float)
        return cls(coeffs, len(coeffs) - 1, note)

    @classmethod
    def one(cls, order: int) -> "PowerSeries":
        coeffs = np.zeros(order + 1)
        coeffs[0] = 1.0
        return cls(coeffs, order)

    def __getitem__(self, n: int) -> float:
        return float(self.coeffs[n])

    def __len__(self) -> int:
        return self.truncation_order + 1

    def _order_with(self, other: "PowerSeries") -> int:
        return min(self.truncation_order, other.truncation_order)

    def __add__(self, other: "PowerSeries") -> "PowerSeries":
        order = self._order_with(other)
        return PowerSeries(self.coeffs[: order + 1] + other.coeffs[: order + 1], order, self.radius_note)

    def __sub__(self, other: "PowerSeries") -> "PowerSeries":
        order = self._order_with(other)
        return PowerSeries(self.coeffs[: order + 1] - other.coeffs[: order + 1], order, self.radius_note)

    def __mul__(self, other) -> "PowerSeries":
        if np.isscalar(other):
            return PowerSeries(self.coeffs * float(other), self.truncation_order, self.radius_note)
        order = self._order_with(other)
        product = np.convolve(self.coeffs[: order + 1], other.coeffs[: order + 1])[: order + 1]
        return PowerSeries(product, order, self.radius_note)

    __rmul__ = __mul__

    def reciprocal(self) -> "PowerSeries":
        """1 / f by the coefficient recursion b_n = -(sum_{k>=1} a_k b_{n-k}) / a_0."""
        a = self.coeffs
        if a[0] == 0:
            raise DomainError("series with zero constant term has no reciprocal")
        order = self.truncation_order
        b = np.zeros(order + 1)
        b[0] = 1.0 / a[0]
        # reversed copy keeps both dot operands contiguous: a_rev[order - k] = a[k]
        a_rev = np.ascontiguousarray(a[::-1])
        for n in range(1, order + 1):
            b[n] = -np.dot(a_rev[order - n : order], b[:n]) / a[0]
        return PowerSeries(b, order, self.radius_note)

    def __truediv__(self, other) -> "PowerSeries":
        if np.isscalar(other):
            return PowerSeries(self.coeffs / float(other), self.truncation_order, self.radius_note)
        return self * other.reciprocal()

    def shift(self, k: int) -> "PowerSeries":
        """Multiply by z**k; a negative k drops the first |k| coefficients."""
        if k >= 0:
            return PowerSeries(np.concatenate((np.zeros(k), self.coeffs)), self.truncation_order, self.radius_note)
        return PowerSeries(self.coeffs[-k:], self.truncation_order + k, self.radius_note)

    def truncate(self, order: int) -> "PowerSeries":
        return PowerSeries(self.coeffs[: order + 1], min(order, self.truncation_order), self.radius_note)

    def derivative(self) -> "PowerSeries":
        n = np.arange(1, self.truncation_order + 1)
        return PowerSeries(self.coeffs[1:] * n, self.truncation_order - 1, self.radius_note)

    def thin(self, u: float, order: int = None) -> "PowerSeries":
        """Coefficients of f(1 - u(1 - z)), the binomial u-thinning of a pmf.

        Coefficient j sums c_k * Binomial(k, u)(j) over the available k, so
        it is accurate when the dropped mass beyond the table sits where
        Binomial(k, u) has negligible weight at j.
        """
        if not 0 < u <= 1:
            raise DomainError(f"thinning parameter must lie in (0, 1], got {u}")
        order = self.truncation_order if order is None else min(order, self.truncation_order)
        j = np.arange(order + 1)[:, None]
        k = np.arange(self.truncation_order + 1)[None, :]
        kernel = stats.binom.pmf(j, k, u)
        return PowerSeries(kernel @ self.coeffs, order, self.radius_note)

    def __call__(self, z: float) -> float:
        return float(np.polynomial.polynomial.polyval(z, self.coeffs))

    def partial_sums(self) -> np.ndarray:
        return np.cumsum(self.coeffs)
