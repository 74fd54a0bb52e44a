#!/usr/bin/env python3
"""
Unit tests for sawtooth conventions and the identities built on them.
"""

import math
from fractions import Fraction

import pytest

from hlzeta.core.exceptions import DomainError
from hlzeta.models.schemas import SawtoothConvention
from hlzeta.services import sawtooth as st
from hlzeta.services.specfun import riemann_zeta


class TestConventions:
    """Fractional part and centered sawtooth stay distinct."""

    def test_fractional(self):
        assert st.sawtooth(2.75) == 0.75
        assert st.sawtooth(-0.25) == 0.75
        assert st.sawtooth(Fraction(7, 2)) == Fraction(1, 2)

    def test_centered(self):
        assert st.sawtooth(2.75, SawtoothConvention.CENTERED) == 0.25
        assert st.sawtooth(3, "centered") == 0
        assert st.sawtooth(Fraction(7, 2), "centered") == 0

    def test_centered_is_odd_off_integers(self):
        for x in (0.1, 0.37, 1.9):
            assert st.sawtooth(-x, "centered") == pytest.approx(-st.sawtooth(x, "centered"), abs=1e-15)

    def test_unknown_convention(self):
        with pytest.raises(ValueError):
            st.sawtooth(0.5, "rounded")

    def test_rho_sum_keeps_half_at_integers(self):
        assert st.rho_sum(0.5) == 0.0
        assert st.rho_sum(1.0) == -0.5
        assert st.rho_bar(1.0) == 0.0


class TestKubert:
    """Kubert identity for the centered sawtooth."""

    def test_acceptance_value(self):
        report = st.kubert_check(2, 0.3)
        assert report.lhs == pytest.approx(0.1, abs=1e-15)
        assert report.rhs == pytest.approx(0.1, abs=1e-15)
        assert report.passed

    @pytest.mark.parametrize("m", [1, 3, 7])
    @pytest.mark.parametrize("x", [2.0, -1.45, 0.5])
    def test_grid(self, m, x):
        assert st.kubert_check(m, x).passed

    def test_bad_m(self):
        with pytest.raises(DomainError):
            st.kubert_check(0, 0.3)


class TestDivisorSums:
    """sum sigma(k)/k against the fractional-part decomposition."""

    def test_integer_is_exact(self):
        report = st.divisor_sum_identity(60)
        assert report.details["exact"] is True
        assert report.passed

    def test_non_integer(self):
        report = st.divisor_sum_identity(1000.5)
        assert report.details["exact"] is False
        assert report.passed

    def test_small_x(self):
        assert st.divisor_sum_identity(1).passed
        with pytest.raises(DomainError):
            st.divisor_sum_identity(0.5)

    def test_scan_rows(self):
        rows = st.divisor_scan([100.0, 10.0])
        assert [row[0] for row in rows] == [10.0, 100.0]
        # sigma(1) + ... + sigma(10)
        assert rows[0][3] == pytest.approx(87.0)


class TestMellinChecks:
    """Mellin transforms of the dilated sawtooth."""

    def test_beurling_acceptance_value(self):
        report = st.beurling_mellin_check(1.0, 2.0)
        assert report.rhs == pytest.approx(1.0 - riemann_zeta(2.0) / 2.0)
        assert report.rhs == pytest.approx(0.17753, abs=1e-5)
        assert report.passed

    @pytest.mark.parametrize("theta, s", [(0.25, 1.5), (0.5, 3.0)])
    def test_beurling_grid(self, theta, s):
        assert st.beurling_mellin_check(theta, s).passed

    def test_beurling_needs_s_above_one(self):
        with pytest.raises(DomainError):
            st.beurling_mellin_check(0.5, 0.5)

    @pytest.mark.parametrize("theta, s", [(0.5, 0.25), (1.0, 0.5), (1.0, 0.75)])
    def test_classical_strip(self, theta, s):
        assert st.classical_integral_check(theta, s).passed

    def test_classical_range(self):
        with pytest.raises(DomainError):
            st.classical_integral_check(0.5, 1.5)

    def test_theta_range(self):
        with pytest.raises(DomainError):
            st.beurling_mellin_check(1.5, 2.0)

    @pytest.mark.parametrize("s, a", [(0.5, 1.0), (2.0, 0.5), (3.5, 2.5)])
    def test_hurwitz_integral(self, s, a):
        assert st.hurwitz_integral_check(s, a).passed

    def test_hurwitz_integral_domain(self):
        with pytest.raises(DomainError):
            st.hurwitz_integral_check(1.0, 1.0)
        with pytest.raises(DomainError):
            st.hurwitz_integral_check(2.0, 0.0)


class TestDecomposition:
    """Decomposition formula with the built-in test functions."""

    @pytest.mark.parametrize("name", ["zero", "linear", "sine"])
    @pytest.mark.parametrize("theta", [0.3, 1.0])
    def test_builtin(self, name, theta):
        report = st.rho_decomposition_check(theta, name)
        assert report.identity_id == f"rho_decomposition.{name}"
        assert report.passed

    def test_zero_function_is_trivial(self):
        report = st.rho_decomposition_check(0.5, "zero")
        assert report.lhs == 0.0
        assert report.rhs == 0.0

    def test_unknown_function(self):
        with pytest.raises(DomainError):
            st.rho_decomposition_check(0.5, "cubic")


class TestFourierCoefficients:
    """a_n from the sin^2 series against direct quadrature."""

    @pytest.mark.parametrize("theta, n", [(0.3, 1), (0.5, 4), (0.9, 11)])
    def test_paths_agree(self, theta, n):
        assert st.fourier_an_check(theta, n).passed

    def test_index_range(self):
        with pytest.raises(DomainError):
            st.fourier_coeff_an(0.5, 0)
        with pytest.raises(DomainError):
            st.fourier_coeff_an(0.5, 201)


class TestBodScan:
    """Pointwise Mobius inversion of the dilated sawtooth."""

    def test_checkpoints_and_target(self):
        rows = st.bod_pointwise_scan(0.5, 0.25, 1000)
        assert [row[0] for row in rows] == [1, 2, 4, 8, 16, 32, 64, 128, 256, 512, 1000]
        assert all(row[2] == -1.0 for row in rows)

    def test_target_beyond_theta(self):
        rows = st.bod_pointwise_scan(0.3, 0.7, 64)
        assert rows[-1][2] == 0.0

    def test_range(self):
        with pytest.raises(DomainError):
            st.bod_pointwise_scan(0.5, 1.5, 64)
