#!/usr/bin/env python3
"""
Unit tests for the Hardy-Littlewood series evaluators and their checks.
"""

import math

import pytest

from hlzeta.core.exceptions import ConvergenceError, DomainError
from hlzeta.models.schemas import PowerSeriesForm, SeriesKind, TruncationPolicy
from hlzeta.services import hlseries
from hlzeta.services.specfun import eta_raw, riemann_zeta

TIGHT = TruncationPolicy(tail_tolerance=1e-12)


def sin_form_by_hand(x, terms=30):
    return sum(
        (-1) ** j * riemann_zeta(2 * j + 2) * x ** (2 * j + 1) / math.factorial(2 * j + 1)
        for j in range(terms)
    )


class TestEvalF:
    """sum sin(x/n)/n on the real line."""

    @pytest.mark.parametrize("x", [0.1, 0.5, 0.9])
    def test_matches_zeta_expansion(self, x):
        result = hlseries.eval_f(x, TIGHT)
        assert abs(result.value - sin_form_by_hand(x)) <= max(result.error_bound, 1e-13)

    def test_odd(self):
        pos = hlseries.eval_f(3.7, TIGHT)
        neg = hlseries.eval_f(-3.7, TIGHT)
        assert neg.value == pytest.approx(-pos.value, abs=1e-15)
        assert neg.error_bound == pos.error_bound

    def test_zero(self):
        result = hlseries.eval_f(0.0)
        assert result.value == 0.0
        assert result.error_bound == 0.0

    def test_tail_modes_agree(self):
        em = hlseries.eval_f(10.0, TruncationPolicy(tail_tolerance=1e-9))
        plain = hlseries.eval_f(10.0, TruncationPolicy(tail_tolerance=1e-5, tail_mode="bound"))
        assert abs(em.value - plain.value) <= em.error_bound + plain.error_bound
        assert plain.terms > em.terms

    def test_work_limit(self):
        policy = TruncationPolicy(tail_tolerance=1e-8, tail_mode="bound", max_terms=100)
        with pytest.raises(ConvergenceError) as excinfo:
            hlseries.eval_f(1.0, policy)
        assert excinfo.value.best_estimate is not None

    def test_argument_range(self):
        with pytest.raises(DomainError):
            hlseries.eval_f(1e12)


class TestRelatedSeries:
    """F_cos, sin^2, G, chi and chi~."""

    def test_f_cos_at_zero_is_zeta2(self):
        result = hlseries.eval_series(SeriesKind.F_COS, 0.0, policy=TIGHT)
        assert result.value == pytest.approx(math.pi ** 2 / 6, abs=1e-11)

    def test_sin2_sum_small_argument(self):
        # sin^2(x/n) ~ x^2/n^2 - x^4/(3 n^4)
        x = 1e-3
        result = hlseries.eval_sin2_sum(x, TIGHT)
        expected = x ** 2 * riemann_zeta(2.0) - x ** 4 * riemann_zeta(4.0) / 3
        assert result.value == pytest.approx(expected, abs=1e-14)

    def test_g_tenenbaum_at_zero(self):
        result = hlseries.eval_series(SeriesKind.G_TENENBAUM, 0.0, policy=TIGHT)
        assert result.value == pytest.approx(math.pi ** 2 / 6, abs=1e-11)

    def test_g_tenenbaum_half_plane(self):
        with pytest.raises(DomainError):
            hlseries.eval_series(SeriesKind.G_TENENBAUM, 1.0)

    def test_chi_at_zero_is_minus_eta(self):
        result = hlseries.eval_series(SeriesKind.CHI, 0.0, s=2.0, policy=TIGHT)
        assert abs(result.value + eta_raw(2.0)[0]) <= max(result.error_bound, 1e-12)

    def test_chi_tilde_at_zero_is_zeta(self):
        result = hlseries.eval_series(SeriesKind.CHI_TILDE, 0.0, s=3.0, policy=TIGHT)
        assert abs(result.value - riemann_zeta(3.0)) <= max(result.error_bound, 1e-12)

    def test_chi_needs_s(self):
        with pytest.raises(DomainError):
            hlseries.eval_series(SeriesKind.CHI, 1.0)

    def test_real_kinds_reject_complex(self):
        with pytest.raises(DomainError):
            hlseries.eval_series(SeriesKind.F_HL, 1 + 1j)

    @pytest.mark.parametrize("s, t", [(2.0, 1.0), (3.0, 4.5), (1.5, 0.2)])
    def test_chi_split(self, s, t):
        report = hlseries.chi_split_check(s, t, TIGHT)
        assert report.passed, report.abs_diff


class TestPowerSeries:
    """Zeta-coefficient expansions for |z| < 1."""

    def test_sin_form(self):
        result = hlseries.eval_power_series(PowerSeriesForm.SIN_FORM, 0.5)
        assert result.value == pytest.approx(sin_form_by_hand(0.5), abs=1e-15)

    def test_exp_form_matches_direct(self):
        z = 0.5 + 0.3j
        series = hlseries.eval_power_series("exp_form", z)
        direct = hlseries.eval_ein_form(z, TIGHT)
        assert abs(series.value - direct.value) <= series.error_bound + direct.error_bound + 1e-13

    def test_unit_disc(self):
        with pytest.raises(DomainError):
            hlseries.eval_power_series("sin_form", 1.0)

    @pytest.mark.parametrize(
        "form, z",
        [("sin_form", 0.3), ("sin_form", -0.8), ("onemcos_form", 0.6), ("exp_form", 0.2 + 0.7j)],
    )
    def test_power_series_check(self, form, z):
        report = hlseries.power_series_check(form, z)
        assert report.passed
        assert report.identity_id == f"power_series.{form}"

    def test_power_series_check_real_forms(self):
        with pytest.raises(DomainError):
            hlseries.power_series_check("onemcos_form", 0.3j)


class TestGNu:
    """G_nu series against its direct oracle."""

    @pytest.mark.parametrize("nu, z", [(0.0, 0.5), (-1.0, 0.5), (1.5, 0.3 + 0.4j)])
    def test_series_matches_direct(self, nu, z):
        series = hlseries.g_nu_series(nu, z)
        direct = hlseries.g_nu_direct(nu, z, M=20_000)
        assert abs(complex(series.value) - complex(direct.value)) <= 10 * (
            series.error_bound + direct.error_bound
        ) + 1e-12

    def test_disc(self):
        with pytest.raises(DomainError):
            hlseries.g_nu_series(0.0, 1.5)


class TestEvalNamed:
    """Name-based dispatch used by the API and CLI."""

    def test_power_form_by_name(self):
        result = hlseries.eval_named("sin_form", 0.5)
        assert result.value == pytest.approx(sin_form_by_hand(0.5), abs=1e-15)

    def test_series_kind_by_name(self):
        result = hlseries.eval_named("chi_tilde", 0.0, s=2.0, policy=TIGHT)
        assert result.value == pytest.approx(math.pi ** 2 / 6, abs=1e-11)

    def test_unknown_kind(self):
        with pytest.raises(DomainError):
            hlseries.eval_named("theta", 0.5)

    def test_g_nu_needs_nu(self):
        with pytest.raises(DomainError):
            hlseries.eval_named("G_nu", 0.5)


class TestChecks:
    """Identity checks built on the series layer."""

    def test_g_mean_divisor_sum(self):
        report = hlseries.g_mean_check(2, 1000)
        assert report.rhs == pytest.approx(1.25)
        assert report.passed

    def test_g_mean_direct_average(self):
        report = hlseries.g_mean_check(1, 20)
        assert report.rhs == pytest.approx(1.0)
        assert report.details["direct_average_diff"] <= report.details["truncation_bound"] + 1e-8

    def test_g_mean_range(self):
        with pytest.raises(DomainError):
            hlseries.g_mean_check(2000, 10)

    @pytest.mark.parametrize("test_fn", ["sin", "char:4:1", "constant"])
    def test_delange(self, test_fn):
        report = hlseries.delange_check(1000.0, test_fn)
        assert report.passed

    def test_delange_unknown_character(self):
        with pytest.raises(DomainError):
            hlseries.delange_check(100.0, "char:7:2")

    def test_delange_small_x(self):
        with pytest.raises(DomainError):
            hlseries.delange_check(5.0)

    def test_sin2_limit(self):
        report = hlseries.sin2_limit_check(1e4)
        assert report.passed
        assert report.rhs == pytest.approx(math.pi / 2)

    def test_sin2_limit_domain(self):
        with pytest.raises(DomainError):
            hlseries.sin2_limit_check(0.5)


class TestScans:
    """Davenport, Mobius and growth scans."""

    def test_davenport_quarter(self):
        rows = hlseries.davenport_scan([0.25], [10, 10_000])
        assert rows[0][3] == pytest.approx(-1 / math.pi)
        assert [row[1] for row in rows] == [10, 10_000]
        assert rows[-1][4] == pytest.approx(abs(rows[-1][2] + 1 / math.pi))

    def test_davenport_sum_matches_scan(self):
        rows = hlseries.davenport_scan([0.3], [500])
        assert hlseries.davenport_sum(0.3, 500) == pytest.approx(rows[0][2], abs=1e-12)

    def test_mertens_column(self):
        rows = hlseries.mertens_column([10])
        # M(10) = -1
        assert rows == [(10, 0.1)]

    def test_mobius_exp_scan_at_zero(self):
        rows = hlseries.mobius_exp_scan([10], [0.0])
        assert rows[0][1] == pytest.approx(0.1)

    def test_growth_envelope(self):
        assert hlseries.growth_envelope(2.0, 0.1) == 0.0
        assert hlseries.growth_envelope(1e6, 0.1) > 0.0

    def test_growth_scan_running_max(self):
        rows = hlseries.growth_scan([10.0, 1.0, 100.0])
        assert [row[0] for row in rows] == [1.0, 10.0, 100.0]
        running = [row[3] for row in rows]
        assert running == sorted(running)
