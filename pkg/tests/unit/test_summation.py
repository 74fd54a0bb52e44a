#!/usr/bin/env python3
"""
Unit tests for the Poisson, Voronoi and Koshliakov summation checks.
"""

import pytest

from hlzeta.core.exceptions import DomainError
from hlzeta.services import summation


class TestTestFunctions:
    """Built-in Gaussian test functions."""

    def test_lookup(self):
        f = summation.test_function("gauss_1")
        assert f.alpha == 1.0
        assert f(0.0) == 1.0

    def test_unknown(self):
        with pytest.raises(DomainError):
            summation.test_function("bump")


class TestPoisson:
    """Even Poisson summation on Gaussians."""

    @pytest.mark.parametrize("name", ["gauss_pi", "gauss_1", "gauss_half_width"])
    def test_standard_functions(self, name):
        report = summation.poisson_even_check(summation.test_function(name))
        assert report.passed


class TestKoshliakov:
    """Koshliakov's formula is symmetric under a -> 1/a."""

    def test_fixed_point(self):
        report = summation.koshliakov_check(1.0)
        assert report.lhs == report.rhs

    @pytest.mark.parametrize("a", [0.5, 1.7, 3.0])
    def test_grid(self, a):
        assert summation.koshliakov_check(a).passed

    def test_range(self):
        with pytest.raises(DomainError):
            summation.koshliakov_check(20.0)


class TestMellinPairs:
    """Closed forms and checks for the Bessel Mellin pairs."""

    def test_closed_forms(self):
        assert summation.voronoi_mellin_closed(0.5, "K0") == pytest.approx(0.25, abs=1e-15)
        assert summation.voronoi_mellin_closed(0.5, "J0") == pytest.approx(2.0, abs=1e-14)
        assert summation.voronoi_mellin_closed(0.5, "Y0") == pytest.approx(0.0, abs=1e-16)

    def test_unknown_kernel(self):
        with pytest.raises(DomainError):
            summation.voronoi_mellin_closed(0.5, "I0")

    @pytest.mark.parametrize("s", [0.25, 0.5, 0.75])
    def test_k0_pair(self, s):
        assert summation.voronoi_mellin_check(s, "K0").passed

    def test_k0_range(self):
        with pytest.raises(DomainError):
            summation.voronoi_mellin_check(1.5, "K0")

    def test_j0_range(self):
        with pytest.raises(DomainError):
            summation.voronoi_mellin_check(0.8, "J0")

    @pytest.mark.slow
    def test_j0_pair(self):
        report = summation.voronoi_mellin_check(0.5, "J0")
        assert report.passed
        assert len(report.details["abel_values"]) == len(summation.ABEL_LEVELS)

    @pytest.mark.slow
    def test_y0_pair(self):
        assert summation.voronoi_mellin_check(0.25, "Y0").passed


class TestRichardson:
    """Extrapolation to zero damping."""

    def test_linear_in_eps_is_exact(self):
        values = [1.0 + 2.0 * eps for eps in summation.ABEL_LEVELS]
        estimate, error, diagonal = summation.richardson(values)
        assert estimate == pytest.approx(1.0, abs=1e-14)
        assert error == pytest.approx(0.0, abs=1e-14)
        assert len(diagonal) == len(values)

    def test_quadratic_in_eps(self):
        values = [3.0 - eps + 5.0 * eps ** 2 for eps in summation.ABEL_LEVELS]
        estimate, _, _ = summation.richardson(values)
        assert estimate == pytest.approx(3.0, abs=1e-12)


class TestVoronoi:
    """Voronoi summation for the divisor function."""

    @pytest.mark.slow
    def test_gauss_pi(self):
        report = summation.voronoi_check(summation.test_function("gauss_pi"))
        assert report.passed
