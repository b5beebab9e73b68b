"""Numeric kernels: special-function series and truncated power series."""

from app.numerics.special import (
    SeriesValue,
    gauss_2f1,
    gauss_2f1_at_one,
    hurwitz_tail,
    l_nu,
    polylog,
    zeta,
)
from app.numerics.series import PowerSeries

__all__ = [
    "SeriesValue",
    "gauss_2f1",
    "gauss_2f1_at_one",
    "hurwitz_tail",
    "l_nu",
    "polylog",
    "zeta",
    "PowerSeries",
]
