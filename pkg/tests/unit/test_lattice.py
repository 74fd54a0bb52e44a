#!/usr/bin/env python3
"""
Unit tests for theta functions, chi transforms, lattice sums and the Bessel-series identities.
"""

import math

import numpy as np
import pytest

from hlzeta.core.exceptions import BranchError, ConvergenceError, DomainError
from hlzeta.models.schemas import TernaryForm
from hlzeta.services import lattice

SIGNED_R3 = [1, -6, 12, -8, 6, -24, 24, 0, 12, -30, 24]


class TestTheta:
    """theta_4 and the two expansions of its cube."""

    @pytest.mark.parametrize("t", [0.05, 0.5, 2.0])
    def test_theta4_t_matches_direct_cube(self, t):
        cube = lattice.theta4_cubed(math.exp(-t), "direct_cube")
        assert lattice.theta4_t(t) ** 3 == pytest.approx(cube.value, abs=1e-12)

    @pytest.mark.parametrize("q", [0.1, 0.5, 0.7])
    def test_cubed_check(self, q):
        assert lattice.theta4_cubed_check(q).passed

    @pytest.mark.parametrize("method", ["direct_cube", "andrews"])
    def test_coefficients(self, method):
        coeff = lattice.theta4_cubed_coefficients(10, method)
        assert coeff.tolist() == SIGNED_R3

    def test_coefficients_check(self):
        report = lattice.theta_coefficients_check(200)
        assert report.passed
        assert report.details["mismatches"] == []

    def test_nome_range(self):
        with pytest.raises(DomainError):
            lattice.theta4_cubed(1.0)
        with pytest.raises(DomainError):
            lattice.theta4_cubed(0.5, "jacobi")
        with pytest.raises(DomainError):
            lattice.theta4_t(0.0)


class TestChiHalf:
    """chi(1/2, t) through its accelerated form."""

    @pytest.mark.parametrize("t", [1.0, 4.0, 16.0])
    def test_check(self, t):
        assert lattice.chi_half_check(t).passed

    def test_explicit_term_count(self):
        result = lattice.chi_half_accel(9.0, N_odd=50)
        assert result.terms == 50

    def test_positive_t(self):
        with pytest.raises(DomainError):
            lattice.chi_half_accel(0.0)

    @pytest.mark.parametrize("t", [0.0, 4.0, -7.5])
    def test_fourier_transform(self, t):
        assert lattice.ghat_check(t).passed

    def test_fourier_range(self):
        with pytest.raises(DomainError):
            lattice.ghat_check(25.0)


class TestEpstein:
    """Alternating Epstein sums and the triple sums behind them."""

    def test_direct_needs_large_s(self):
        with pytest.raises(DomainError):
            lattice.alt_epstein(2.0, TernaryForm.Q1, "direct")

    def test_unknown_method(self):
        with pytest.raises(DomainError):
            lattice.alt_epstein(3.0, "q1", "ewald")

    def test_triple_sum_convergence_range(self):
        with pytest.raises(DomainError):
            lattice.q2_triple_sum(1.5, 1000)

    def test_triple_sum_first_shells(self):
        # v = 3 at (1,1,1) and v = 5 at the three permutations of (1,1,2)
        result = lattice.q2_triple_sum(3.0, 5, alternating=False)
        assert result.value == pytest.approx(3.0 ** -3 + 3 * 5.0 ** -3, abs=1e-15)

    @pytest.mark.slow
    @pytest.mark.parametrize("form", ["q1", "q2"])
    def test_mellin_against_direct(self, form):
        assert lattice.alt_epstein_check(3.0, form).passed

    @pytest.mark.slow
    def test_crandall_relation(self):
        assert lattice.crandall_relation_check(3.0).passed

    @pytest.mark.slow
    def test_double_integral(self):
        assert lattice.double_integral_check().passed


class TestBesselSeries:
    """Segal and K0 expansions."""

    @pytest.mark.parametrize("z", [0.5, 1.0, 5.0])
    def test_segal(self, z):
        assert lattice.segal_identity_check(z).passed

    def test_segal_range(self):
        with pytest.raises(DomainError):
            lattice.segal_identity_check(0.0)

    @pytest.mark.parametrize("z", [1 + 0j, 2 + 1j, 0.5 + 2j])
    def test_hl_k0(self, z):
        assert lattice.hl_k0_identity_check(z).passed

    def test_hl_k0_branch(self):
        with pytest.raises(BranchError):
            lattice.hl_k0_series(1j)
        with pytest.raises(DomainError):
            lattice.hl_k0_series(-1.0)


class TestMiscellaneous:
    """Partial fractions, chi powers, lcm growth and G_nu."""

    @pytest.mark.parametrize("p", [0.01, 0.05, 0.5, 1.0, 10.0, 1000.0])
    def test_laplace(self, p):
        report = lattice.laplace_partial_fraction_check(p)
        assert report.passed
        assert report.details["printed_variant_diff"] > 1.0 / (4.0 * p)

    def test_laplace_small_p_scales_terms(self):
        report = lattice.laplace_partial_fraction_check(0.01)
        assert 100_000 <= report.details["terms"] <= 100_001
        assert report.tolerance <= 1e-12 * abs(report.rhs) + report.details["bound"]

    def test_laplace_large_p_asymptotic(self):
        p = 1000.0
        report = lattice.laplace_partial_fraction_check(p)
        zeta2 = math.pi ** 2 / 6.0
        assert report.lhs * p ** 3 / zeta2 == pytest.approx(1.0, abs=1e-5)

    def test_laplace_term_budget(self):
        with pytest.raises(ConvergenceError) as excinfo:
            lattice.laplace_partial_fraction_check(1e-5)
        assert excinfo.value.best_estimate == pytest.approx(math.pi / 2e-10)

    def test_laplace_positive(self):
        with pytest.raises(DomainError):
            lattice.laplace_partial_fraction_check(-1.0)

    def test_chi_squared_alternating(self):
        report = lattice.chi_squared_mellin_check(2.0, "alternating")
        assert report.passed

    def test_chi_squared_plain(self):
        assert lattice.chi_squared_mellin_check(5.0, "plain").passed

    def test_chi_squared_ranges(self):
        with pytest.raises(DomainError):
            lattice.chi_squared_mellin_check(1.5, "alternating")
        with pytest.raises(DomainError):
            lattice.chi_squared_mellin_check(3.0, "plain")
        with pytest.raises(DomainError):
            lattice.chi_squared_mellin_check(3.0, "cubed")

    @pytest.mark.parametrize("n", [10, 100, 1000])
    def test_lcm_growth(self, n):
        report = lattice.lcm_growth_check(n)
        assert report.passed
        assert report.details["below_3_to_n"] is True

    def test_lcm_of_ten(self):
        report = lattice.lcm_growth_check(10)
        assert report.lhs == pytest.approx(math.log(2520))

    def test_g_nu(self):
        assert lattice.g_nu_check(0.0, 0.5).passed

    def test_signed_r3_table(self, small_sieve):
        r3 = small_sieve.r3(10)
        signs = np.where(np.arange(11) % 2 == 0, 1, -1)
        assert (r3 * signs).tolist() == SIGNED_R3
