#!/usr/bin/env python3
"""
Unit tests for the Franel-type integrals.
"""

import math
from fractions import Fraction

import pytest

from hlzeta.core.exceptions import ConvergenceError, DomainError
from hlzeta.models.symbolic import SymbolicConstant
from hlzeta.services import franel

EULER_GAMMA = 0.5772156649015329


class TestMordellProducts:
    """Bernoulli products with gcd/lcm scaling."""

    def test_first_order_is_gcd_form(self):
        assert franel.classical_product(1, 1, 2).rational == Fraction(1, 24)
        assert franel.mordell_oracle(1, 1, 2) == Fraction(1, 24)

    def test_second_order(self):
        assert franel.classical_product(2, 1, 1).rational == Fraction(1, 720)
        assert franel.mordell_oracle(2, 1, 1) == Fraction(1, 720)

    @pytest.mark.parametrize("r, a, b", [(1, 2, 3), (2, 3, 4), (3, 2, 6)])
    def test_closed_form_matches_exact_pieces(self, r, a, b):
        assert franel.classical_product(r, a, b).rational == franel.mordell_oracle(r, a, b)

    def test_check_against_quadrature(self):
        report = franel.classical_product_check(2, 3, 4)
        assert report.passed
        assert report.details["exact_match"] is True

    def test_disambiguation_picks_gcd(self):
        report = franel.mordell_disambiguation()
        assert report.details["verdict"] == "gcd form"
        assert report.details["lcm_form"] == "1/12"
        assert report.passed

    def test_argument_checks(self):
        with pytest.raises(DomainError):
            franel.classical_product(2, 1, 1, kind="sawtooth")
        with pytest.raises(DomainError):
            franel.classical_product(11, 1, 1)
        with pytest.raises(DomainError):
            franel.classical_product(1, 0, 1)

    @pytest.mark.slow
    def test_hurwitz_product(self):
        assert franel.hurwitz_product_check(2.0, 1, 2).passed

    def test_hurwitz_product_range(self):
        with pytest.raises(DomainError):
            franel.hurwitz_product_check(0.4, 1, 2)


class TestSecondKind:
    """I_{n,m} = int_0^1 {n x}{m/x} dx."""

    @pytest.mark.parametrize(
        "n, m, expected",
        [(2, 1, 0.1619187), (1, 2, 0.2101319), (2, 2, 0.2006360)],
    )
    def test_oracle_acceptance_values(self, n, m, expected):
        result = franel.franel2_oracle(n, m)
        assert result.value == pytest.approx(expected, abs=5e-8)
        assert result.error_bound <= 1e-12

    def test_closed_form_structure(self):
        assert franel.franel2_closed(1, 2) == SymbolicConstant.parse("7/2 - 2*zeta2")
        assert franel.franel2_closed(2, 1) == SymbolicConstant.parse("5/2 - log(2) - zeta2")

    def test_zeta2_coefficient(self):
        closed = franel.franel2_closed(3, 4)
        assert closed.zeta2_coeff == Fraction(-3 * 16, 2)

    @pytest.mark.parametrize("n, m", [(1, 1), (3, 5), (6, 2)])
    def test_check(self, n, m):
        assert franel.franel2_check(n, m).passed

    def test_closed_form_beyond_oracle_range(self):
        closed = franel.franel2_closed(20, 20)
        assert math.isfinite(closed.evaluate())

    def test_ranges(self):
        with pytest.raises(DomainError):
            franel.franel2_oracle(13, 1)
        with pytest.raises(DomainError):
            franel.franel2_closed(0, 1)

    def test_pieces_cover_unit_tail(self):
        pieces = franel.franel_pieces(2, 3)
        assert pieces[0].lo == Fraction(1, 2)
        assert pieces[-1].hi == 1
        assert all(a.hi == b.lo for a, b in zip(pieces, pieces[1:]))

    def test_printed_table_verdicts(self):
        rows = {row["label"]: row for row in franel.franel2_table_rows()}
        assert rows["(2,1)"]["verdict"] == "exact"
        assert rows["(1,4)"]["verdict"] == "relabelled"
        assert rows["(5,1)"]["verdict"] == "misprinted"

    def test_table_check(self):
        report = franel.franel2_table_check()
        assert report.passed
        assert report.details["unexplained"] == []


class TestFirstKind:
    """J(beta) = int_0^1 {1/x}{beta/x} dx."""

    def test_zero(self):
        assert franel.franel_first_kind(0.0).value == 0.0

    def test_beta_one(self):
        result = franel.franel_first_kind(1.0)
        expected = math.log(2 * math.pi) - EULER_GAMMA - 1.0
        assert result.error_bound <= 1e-10
        assert abs(result.value - expected) <= result.error_bound + 1e-15

    @pytest.mark.parametrize("beta", [1.0, 0.5, 0.25, 0.1])
    def test_default_tolerance_reached(self, beta):
        result = franel.franel_first_kind(beta)
        assert result.error_bound <= 1e-10
        assert 0.0 < result.value < 1.0

    def test_range(self):
        with pytest.raises(DomainError):
            franel.franel_first_kind(1.5)

    @pytest.mark.parametrize("beta", [math.pi / 4, 1.0 / 3.0, 0.123])
    def test_pieces_match_quadrature(self, beta):
        body, rounding, _ = franel._first_kind_body(beta, 60)
        assert body == pytest.approx(franel._first_kind_quad(beta, 60), abs=1e-12)
        assert rounding < 1e-12

    def test_rational_period_detection(self):
        assert franel._rational_period(0.5) == Fraction(1, 2)
        assert franel._rational_period(1.0 / 3.0) == Fraction(1, 3)
        assert franel._rational_period(0.123) == Fraction(123, 1000)
        assert franel._rational_period(math.pi / 4) is None

    def test_non_grid_rational_against_quadrature(self):
        beta = 1.0 / 3.0
        result = franel.franel_first_kind(beta)
        mean = float(franel._product_period_mean(Fraction(1, 3)))
        tail, tail_bound = franel._periodic_tail(mean, 3, 60)
        oracle = franel._first_kind_quad(beta, 60) + tail
        assert abs(result.value - oracle) <= result.error_bound + tail_bound + 1e-12

    def test_irrational_beta_against_quadrature(self):
        beta = math.pi / 4
        result = franel.franel_first_kind(beta, tol=1e-4)
        assert result.error_bound <= 1e-4
        tail, tail_bound = franel._equidistributed_tail(beta, 60)
        oracle = franel._first_kind_quad(beta, 60) + tail
        assert abs(result.value - oracle) <= result.error_bound + tail_bound + 1e-12

    def test_irrational_bounds_nest(self):
        coarse = franel.franel_first_kind(math.pi / 4, tol=1e-3)
        fine = franel.franel_first_kind(math.pi / 4, tol=1e-4)
        assert abs(coarse.value - fine.value) <= coarse.error_bound + fine.error_bound

    def test_periodic_tail_is_sound(self):
        mean = float(franel._product_period_mean(Fraction(1, 2)))
        tail, tail_bound = franel._periodic_tail(mean, 2, 40)
        exact = franel.franel_first_kind(0.5)
        partial = franel._first_kind_quad(0.5, 40)
        assert abs(partial + tail - exact.value) <= tail_bound + exact.error_bound + 1e-12

    def test_budget_too_small(self, monkeypatch):
        monkeypatch.setattr(franel.settings, "max_terms", 1000)
        with pytest.raises(ConvergenceError) as excinfo:
            franel.franel_first_kind(math.pi / 4)
        assert excinfo.value.achieved_bound > 1e-10
        assert excinfo.value.best_estimate is not None

    @pytest.mark.slow
    def test_check_against_mpmath(self):
        assert franel.franel_first_kind_check(0.5).passed

    @pytest.mark.slow
    def test_check_irrational(self):
        report = franel.franel_first_kind_check(math.pi / 4)
        assert report.passed
        assert report.details["periodic"] is False
