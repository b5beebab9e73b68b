import math

import mpmath
import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import special as sp

from app.chain.hitting import (
    busy_period_mean,
    escape_probability,
    excursion_count_law,
    extinction_prob,
    extinction_prob_series,
    first_passage_down_pmf,
    height_law,
    idle_period_mean,
    log_scale_function,
    mean_return_time,
    psi0,
    psi0_alpha_one,
    return_time_pgf,
    return_time_pmf,
    return_time_tail,
    scale_function,
    size_biased_return_pmf,
)
from app.chain.model import model_a, model_b
from app.errors import DomainError, UnsupportedRegimeError


class TestReturnTime:
    def test_first_masses(self):
        table = return_time_pmf(model_b(2.0, p0=0.5), 20)
        assert_allclose(table.pmf(1), 0.5)
        assert_allclose(table.pmf(2), 0.5 * 0.75)
        assert table.pmf(0) == 0.0

    def test_masses_account_for_everything(self):
        for spec in (model_b(2.0), model_a(1.0, nu=1.0), model_b(1.0, beta=2.0)):
            table = return_time_pmf(spec, 100)
            assert_allclose(table.total() + table.tail_mass_bound + table.defect, 1.0, rtol=1e-12)

    def test_tail_is_a_survival_product(self, model_b_two):
        tail = return_time_tail(model_b_two, 6)
        assert tail[0] == 1.0
        assert_allclose(tail[1:], 1.0 / np.arange(1, 7) ** 2, rtol=1e-12)

    def test_mean(self):
        assert mean_return_time(model_a(2.0, nu=2.0)) == 3.0
        assert_allclose(mean_return_time(model_b(2.0)), 1.0 + math.pi ** 2 / 6, rtol=1e-14)
        assert math.isinf(mean_return_time(model_b(1.0)))

    def test_confined_mean(self, critical_a):
        assert_allclose(mean_return_time(critical_a), 2.0)

    def test_tabulated_mean(self):
        spec = model_b(3.0)
        assert_allclose(return_time_pmf(spec, 10_000).mean(), mean_return_time(spec), atol=1e-6)

    def test_idle_and_busy_periods(self):
        spec = model_a(2.0, nu=2.0, p0=0.25)
        assert_allclose(idle_period_mean(spec), 3.0)
        assert_allclose(busy_period_mean(spec), 1.0 + (mean_return_time(spec) - 1.0) / 0.25)

    def test_size_biased_law_is_normalised(self):
        table = size_biased_return_pmf(model_b(3.0), 200)
        assert_allclose(table.total() + table.tail_mass_bound, 1.0, atol=1e-10)
        with pytest.raises(UnsupportedRegimeError):
            size_biased_return_pmf(model_b(1.0), 10)


class TestGeneratingFunctions:
    def test_psi0_model_a(self):
        spec = model_a(1.5, nu=2.0)
        z = 0.7
        expected = 1.5 * z / 3.0 * sp.hyp2f1(1.0, 1.5, 4.0, z)
        assert_allclose(psi0(spec, z), expected, rtol=1e-11)

    def test_psi0_model_b(self):
        z = 0.4
        expected = 1.0 - (1.0 - z) * float(mpmath.polylog(2.5, z)) / z
        assert_allclose(psi0(model_b(2.5), z), expected, rtol=1e-11)
        assert psi0(model_b(2.5), 1.0) == 1.0

    @pytest.mark.parametrize("spec", [model_b(1.0), model_a(1.0, nu=1.5)])
    def test_alpha_one_forms_agree(self, spec):
        assert_allclose(psi0_alpha_one(spec, 0.5), psi0(spec, 0.5), rtol=1e-10)

    def test_pgf_matches_pmf(self):
        spec = model_b(2.0, p0=0.5)
        z = 0.6
        table = return_time_pmf(spec, 200)
        direct = math.fsum(table.masses * z ** table.support)
        value = return_time_pgf(spec, z)
        assert value.closed_form
        assert_allclose(value.value, direct, rtol=1e-10)

    def test_off_critical_pgf_uses_the_series(self):
        spec = model_b(1.0, beta=0.5)
        z = 0.6
        table = return_time_pmf(spec, 200)
        value = return_time_pgf(spec, z)
        assert not value.closed_form
        assert_allclose(value.value, math.fsum(table.masses * z ** table.support), rtol=1e-10)

    def test_domain(self):
        with pytest.raises(DomainError):
            psi0(model_b(2.0), 1.2)
        with pytest.raises(UnsupportedRegimeError):
            psi0(model_b(2.0, beta=0.5), 0.5)


class TestHeights:
    def test_height_is_return_time_minus_one(self):
        spec = model_a(1.5, nu=1.0, p0=0.7)
        law = height_law(spec, 30)
        table = return_time_pmf(spec, 31)
        assert_allclose(law.pmf(0), 0.3)
        for h in range(1, 11):
            assert_allclose(law.pmf(h), table.pmf(h + 1), rtol=1e-12)

    def test_survival(self):
        spec = model_b(1.5)
        law = height_law(spec, 40)
        assert_allclose(law.survival(5), return_time_tail(spec, 5)[-1], rtol=1e-10)
        assert law.survival(0) == 1.0

    def test_transient_height_is_defective(self):
        spec = model_b(1.0, beta=2.0)
        law = height_law(spec, 40)
        assert_allclose(law.defect, escape_probability(spec))


class TestExtinction:
    def test_closed_form_product(self):
        # prod_{y>=1} (1 + y**-2) = sinh(pi) / pi
        spec = model_b(1.0, beta=2.0)
        assert_allclose(escape_probability(spec), math.pi / math.sinh(math.pi), rtol=1e-10)
        assert_allclose(extinction_prob(spec, 1), 1.0 - math.pi / math.sinh(math.pi), rtol=1e-10)

    @pytest.mark.parametrize("x", [1, 5, 20])
    def test_product_matches_series(self, x):
        for spec in (model_b(1.0, beta=2.0), model_a(1.0, nu=1.0, beta=2.0)):
            assert_allclose(extinction_prob(spec, x), extinction_prob_series(spec, x), rtol=1e-10)

    def test_recurrent_chains_always_return(self):
        assert extinction_prob(model_b(0.5), 10) == 1.0

    def test_decreasing_in_start(self):
        spec = model_b(1.0, beta=2.0)
        values = [extinction_prob(spec, x) for x in range(1, 20)]
        assert all(a > b for a, b in zip(values, values[1:]))

    def test_negative_state(self):
        with pytest.raises(DomainError):
            extinction_prob(model_b(1.0, beta=2.0), -1)


class TestScaleFunctionAndPassages:
    def test_scale_function(self, model_b_two):
        assert scale_function(model_b_two, 0) == 0.0
        assert_allclose(scale_function(model_b_two, 3), 9.0, rtol=1e-12)
        logs = log_scale_function(model_b_two, 5)
        assert logs[0] == -math.inf
        assert_allclose(np.exp(logs[1:]), [scale_function(model_b_two, x) for x in range(1, 6)], rtol=1e-12)

    def test_first_passage_down(self, model_b_two):
        table = first_passage_down_pmf(model_b_two, 3, 50)
        assert_allclose(table.pmf(1), 1.0 - 0.75 ** 2)
        assert_allclose(table.total() + table.tail_mass_bound + table.defect, 1.0, rtol=1e-12)
        with pytest.raises(DomainError):
            first_passage_down_pmf(model_b_two, 0, 5)

    def test_excursion_count_is_geometric(self):
        spec = model_b(1.0, beta=2.0)
        phi = 1.0 - escape_probability(spec)
        law = excursion_count_law(spec, 10)
        assert_allclose(law.masses, (1.0 - phi) * phi ** np.arange(11))
