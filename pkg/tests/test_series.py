import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import stats

from app.errors import DomainError
from app.numerics.series import PowerSeries


class TestPowerSeries:
    def test_reciprocal_of_one_minus_z(self):
        series = PowerSeries.from_coeffs([1.0, -1.0, 0.0, 0.0, 0.0, 0.0])
        assert_allclose(series.reciprocal().coeffs, np.ones(6))

    def test_reciprocal_inverts_product(self):
        series = PowerSeries.from_coeffs([2.0, 0.5, -0.25, 1.0, 0.3])
        product = series * series.reciprocal()
        assert_allclose(product.coeffs, [1.0, 0.0, 0.0, 0.0, 0.0], atol=1e-14)

    def test_zero_constant_term_has_no_reciprocal(self):
        with pytest.raises(DomainError):
            PowerSeries.from_coeffs([0.0, 1.0]).reciprocal()

    def test_product_truncates_to_common_order(self):
        a = PowerSeries.from_coeffs([1.0, 1.0, 0.0, 0.0])
        b = PowerSeries.from_coeffs([1.0, 1.0, 0.0])
        product = a * b
        assert product.truncation_order == 2
        assert_allclose(product.coeffs, [1.0, 2.0, 1.0])

    def test_division(self):
        one = PowerSeries.one(4)
        geometric = one / PowerSeries.from_coeffs([1.0, -0.5, 0.0, 0.0, 0.0])
        assert_allclose(geometric.coeffs, 0.5 ** np.arange(5))
        assert_allclose((geometric / 2.0).coeffs, 0.5 ** np.arange(1, 6))

    def test_shift(self):
        series = PowerSeries.from_coeffs([1.0, 2.0, 3.0])
        assert_allclose(series.shift(2).coeffs, [0.0, 0.0, 1.0])
        dropped = series.shift(-1)
        assert dropped.truncation_order == 1
        assert_allclose(dropped.coeffs, [2.0, 3.0])

    def test_derivative_and_evaluation(self):
        series = PowerSeries.from_coeffs([1.0, 2.0, 3.0])
        assert_allclose(series.derivative().coeffs, [2.0, 6.0])
        assert_allclose(series(0.5), 1.0 + 1.0 + 0.75)
        assert_allclose(series.partial_sums(), [1.0, 3.0, 6.0])

    def test_thinning_a_point_mass_gives_a_binomial(self):
        series = PowerSeries.from_coeffs([0.0, 0.0, 0.0, 1.0])
        assert_allclose(series.thin(0.3).coeffs, stats.binom.pmf(np.arange(4), 3, 0.3), rtol=1e-14)

    def test_thinning_parameter_domain(self):
        with pytest.raises(DomainError):
            PowerSeries.from_coeffs([1.0, 0.0]).thin(0.0)

    def test_short_coefficients_are_padded(self):
        series = PowerSeries(np.array([1.0]), 3)
        assert len(series) == 4
        assert series[3] == 0.0
