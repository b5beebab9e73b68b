import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import stats

from app.chain.laws import PmfTable
from app.chain.model import model_a
from app.divisibility.canonical import (
    canonical_sequence,
    classify_divisibility,
    first_flip,
    geometric_mixture_canonical,
    geometric_mixture_pmf,
    is_log_convex,
    reconvolve,
    scan_p0,
    shifted_positive_part,
)
from app.divisibility.thinning import (
    complete_monotonicity_check,
    sibuya_stationary_special_case,
    thinning_remainder,
    thinning_scan,
)
from app.errors import DomainError, NotApplicableError


def poisson_table(rate, xmax=40):
    x = np.arange(xmax + 1)
    return PmfTable(0, stats.poisson.pmf(x, rate), True, float(stats.poisson.sf(xmax, rate)))


class TestCanonicalSequence:
    def test_poisson_has_a_single_atom(self):
        r = canonical_sequence(poisson_table(2.0), 20).r
        assert_allclose(r[0], 2.0, rtol=1e-12)
        assert_allclose(r[1:], 0.0, atol=1e-12)

    def test_geometric_mixture_closed_form(self):
        for pi0 in (0.3, 0.8):
            r = canonical_sequence(geometric_mixture_pmf(0.5, pi0, 60), 40).r
            assert_allclose(r, geometric_mixture_canonical(0.5, pi0, 40), atol=1e-12)

    def test_reconvolution_round_trip(self):
        table = geometric_mixture_pmf(0.4, 0.7, 40)
        rebuilt = reconvolve(canonical_sequence(table, 30))
        assert_allclose(rebuilt, table.masses[:32], rtol=1e-10)

    def test_needs_a_normalized_law_with_mass_at_zero(self):
        with pytest.raises(DomainError):
            canonical_sequence(PmfTable(0, np.ones(5), False), 2)
        with pytest.raises(NotApplicableError):
            canonical_sequence(PmfTable(0, [0.0, 0.5, 0.5], True), 1)
        with pytest.raises(DomainError):
            canonical_sequence(poisson_table(1.0, 5), 10)


class TestVerdicts:
    def test_poisson_is_self_decomposable(self):
        verdict = classify_divisibility(poisson_table(2.0), 20)
        assert verdict.id and verdict.sd
        assert verdict.first_violation_index is None

    def test_geometric_mixture(self):
        assert classify_divisibility(geometric_mixture_pmf(0.5, 0.8, 60), 40).id
        verdict = classify_divisibility(geometric_mixture_pmf(0.5, 0.3, 60), 40)
        assert not verdict.id and not verdict.sd
        assert verdict.first_violation_index == 1

    @pytest.mark.parametrize("p0, is_id, is_sd", [(0.1, True, True), (0.4, True, False), (0.9, False, False)])
    def test_sibuya_thresholds(self, p0, is_id, is_sd):
        case = sibuya_stationary_special_case(1.5, p0)
        assert case.id is is_id
        assert case.sd is is_sd
        assert case.agrees
        assert_allclose(case.pgf(0.0), case.pi0)

    def test_special_case_domain(self):
        with pytest.raises(DomainError):
            sibuya_stationary_special_case(2.5, 0.5)

    def test_scan_finds_the_flips(self):
        points = scan_p0(lambda p0: model_a(1.5, nu=1.0, p0=p0), [0.2, 0.45, 0.6, 0.8], 50)
        assert first_flip(points, "id") == 0.45
        assert first_flip(points, "sd") == 0.2
        assert first_flip(points[:1], "id") is None


class TestShapes:
    def test_log_convexity(self):
        assert is_log_convex(geometric_mixture_pmf(0.5, 0.8, 30))
        assert not is_log_convex(poisson_table(2.0))

    def test_shifted_positive_part_of_a_mixture_is_geometric(self):
        shifted = shifted_positive_part(geometric_mixture_pmf(0.5, 0.8, 30))
        assert_allclose(shifted.masses, 0.5 * 0.5 ** np.arange(30), rtol=1e-12)

    def test_complete_monotonicity(self):
        assert complete_monotonicity_check(1.0 / np.arange(1, 30), 10).passed
        result = complete_monotonicity_check([1.0, 0.2, 0.19, 0.0], 3)
        assert not result.passed
        assert result.first_violation == (2, 1)
        with pytest.raises(DomainError):
            complete_monotonicity_check([0.5, 0.6], 1)


class TestThinning:
    def test_poisson_remainder_is_poisson(self):
        u = 0.3
        remainder = thinning_remainder(poisson_table(2.0), u, 20)
        assert_allclose(remainder, stats.poisson.pmf(np.arange(21), 2.0 * (1 - u)), atol=1e-12)

    def test_scan_reports_the_smallest_coefficient(self):
        scan = thinning_scan(poisson_table(2.0), (0.25, 0.5), 20)
        assert set(scan) == {0.25, 0.5}
        assert all(value > -1e-12 for value in scan.values())

    def test_domain(self):
        with pytest.raises(DomainError):
            thinning_remainder(poisson_table(2.0), 1.0, 5)
        with pytest.raises(DomainError):
            thinning_remainder(poisson_table(2.0, 5), 0.5, 10)
