import math

import mpmath
import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import special as sp

from app.chain.model import log_survival, model_a, model_b
from app.cli.suites import truncated_transition_matrix
from app.chain.stationary import (
    criteria,
    invariant_ct,
    invariant_dt,
    psi_infinity,
    stationary_moment,
    stationary_pgf,
    survival_weighted_sum,
    zipf_moment,
)
from app.errors import DomainError, MissingRateLayerError, NoInvariantMeasureError, UnsupportedRegimeError


def model_b_survival(alpha):
    return lambda x: x ** -mpmath.mpf(alpha)


def model_a_survival(alpha, nu):
    alpha, nu = mpmath.mpf(alpha), mpmath.mpf(nu)
    return lambda x: mpmath.gammaprod([nu + 1, nu + x - alpha], [nu + 1 - alpha, nu + x])


def ct_constant(survival, lam, head=1000):
    """sum_{x>=1} (x+1)**-lam u_x: direct head, Euler-Maclaurin beyond."""
    with mpmath.workdps(30):
        def term(x):
            return survival(x) * (x + 1) ** -mpmath.mpf(lam)

        total = mpmath.fsum(term(mpmath.mpf(x)) for x in range(1, head + 1))
        total += mpmath.sumem(term, [head + 1, mpmath.inf])
        return float(total)


class TestCriteria:
    def test_model_a_closed_form(self):
        report = criteria(model_a(1.5, nu=2.0, p0=0.5))
        assert report.c2_finite and not report.c1_finite
        assert_allclose(report.c2_value, 0.5 * 2.0 / 0.5)

    def test_model_a_closed_form_matches_gamma_sum(self):
        spec = model_a(1.5, nu=2.0)
        assert_allclose(survival_weighted_sum(spec).value, criteria(spec).c2_value, rtol=1e-12)

    def test_model_b_is_zeta(self, model_b_two):
        assert_allclose(criteria(model_b_two).c2_value, math.pi ** 2 / 6, rtol=1e-14)

    def test_subcritical_sum_matches_direct_product(self):
        spec = model_b(1.0, beta=0.5)
        direct = math.fsum(np.exp(log_survival(spec, 20_000))[1:])
        assert_allclose(criteria(spec).c2_value, direct, rtol=1e-10)

    def test_transient(self):
        report = criteria(model_b(1.0, beta=2.0))
        assert report.c1_finite and not report.c2_finite
        assert report.c2_value is None

    def test_ct_constant(self):
        report = criteria(model_b(0.5).with_rates(0.8))
        assert report.c2_finite is False
        assert report.ct_c2_finite is True
        assert_allclose(report.ct_c2_value, ct_constant(model_b_survival(0.5), 0.8), rtol=1e-10)

    def test_ct_constant_model_a(self):
        report = criteria(model_a(0.5, nu=1.0).with_rates(0.7))
        assert_allclose(report.ct_c2_value, ct_constant(model_a_survival(0.5, 1.0), 0.7), rtol=1e-10)


class TestInvariantMeasure:
    def test_model_b_power_law(self, model_b_two):
        table = invariant_dt(model_b_two, 50)
        pi0 = 1.0 / (1.0 + math.pi ** 2 / 6)
        assert table.normalized
        assert_allclose(table.masses[0], pi0, rtol=1e-14)
        assert_allclose(table.masses[5], pi0 / 25, rtol=1e-12)
        assert_allclose(table.total() + table.tail_mass_bound, 1.0, atol=1e-9)

    def test_null_recurrent_measure_is_not_normalised(self):
        table = invariant_dt(model_b(1.0), 10)
        assert not table.normalized
        assert table.masses[0] == 1.0
        assert_allclose(table.masses[4], 0.25, rtol=1e-12)
        assert math.isinf(table.tail_mass_bound)

    def test_transient_has_no_invariant_measure(self):
        with pytest.raises(NoInvariantMeasureError):
            invariant_dt(model_b(1.0, beta=1.5), 10)

    def test_confined_chain(self, critical_a):
        table = invariant_dt(critical_a, 5)
        assert_allclose(table.masses, [0.5, 0.5, 0.0, 0.0, 0.0, 0.0])

    def test_fixed_point_of_the_kernel(self, model_b_two):
        xmax = 200
        matrix = truncated_transition_matrix(model_b_two, xmax + 1)
        pi = invariant_dt(model_b_two, xmax).masses
        assert np.max(np.abs((pi @ matrix - pi)[1:])) <= 1e-8

        fast = model_b(2.0, beta=0.5)
        pi = invariant_dt(fast, xmax).masses
        assert np.max(np.abs(pi @ truncated_transition_matrix(fast, xmax + 1) - pi)) <= 1e-8

    def test_ct_law(self):
        spec = model_b(0.5).with_rates(0.8)
        table = invariant_ct(spec, 20)
        assert table.normalized
        ratio = table.masses[3] / table.masses[1]
        assert_allclose(ratio, 3 ** -0.5 * 4 ** -0.8 / 2 ** -0.8, rtol=1e-12)

    @pytest.mark.parametrize("spec, survival, lam", [
        (model_b(0.5).with_rates(0.8), model_b_survival(0.5), 0.8),
        (model_a(0.5, nu=1.0).with_rates(0.7), model_a_survival(0.5, 1.0), 0.7),
    ])
    def test_ct_law_is_normalised(self, spec, survival, lam):
        table = invariant_ct(spec, 20)
        assert_allclose(table.masses[0], 1.0 / (1.0 + ct_constant(survival, lam)), rtol=1e-10)
        assert abs(table.total() + table.tail_mass_bound - 1.0) <= 1e-9

    def test_ct_needs_rates(self):
        with pytest.raises(MissingRateLayerError):
            invariant_ct(model_b(2.0), 5)


class TestStationaryGeneratingFunction:
    @pytest.mark.parametrize("spec", [model_b(2.0), model_b(2.5, p0=0.4), model_a(1.5, nu=1.0, p0=0.8)])
    def test_matches_the_tabulated_law(self, spec):
        z = 0.5
        masses = invariant_dt(spec, 400).masses
        direct = math.fsum(masses * z ** np.arange(masses.size))
        assert_allclose(stationary_pgf(spec, z), direct, rtol=1e-10)

    def test_value_at_one(self, model_b_two):
        assert stationary_pgf(model_b_two, 1.0) == 1.0

    def test_needs_positive_recurrence(self):
        with pytest.raises(NoInvariantMeasureError):
            stationary_pgf(model_b(1.0), 0.5)

    def test_psi_infinity_regime(self):
        with pytest.raises(UnsupportedRegimeError):
            psi_infinity(model_b(0.5), 0.5)

    def test_model_b_moment(self):
        spec = model_b(3.0)
        expected = sp.zeta(2.5) / (1.0 + sp.zeta(3.0))
        assert_allclose(stationary_moment(spec, 0.5), expected, rtol=1e-12)
        assert stationary_moment(spec, 0.0) == 1.0

    def test_zipf_moment_domain(self):
        assert_allclose(zipf_moment(3.0, 1.0), sp.zeta(2.0) / sp.zeta(3.0))
        with pytest.raises(DomainError):
            zipf_moment(3.0, 2.0)
        with pytest.raises(DomainError):
            zipf_moment(1.0, 0.0)
