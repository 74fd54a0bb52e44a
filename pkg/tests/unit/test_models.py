#!/usr/bin/env python3
"""
Unit tests for the pydantic models and the exact symbolic constants.
"""

import math
from fractions import Fraction

import numpy as np
import pytest
from pydantic import ValidationError

from hlzeta.core.exceptions import DomainError
from hlzeta.models.schemas import (
    ComplexValue,
    EvalResult,
    IdentityReport,
    QuadratureSpec,
    SuiteConfig,
    SuiteRun,
    TestFunction,
    TruncationPolicy,
    VerifyRequest,
)
from hlzeta.models.symbolic import FranelPiece, SymbolicConstant


class TestIdentityReport:
    """Verdict consistency and record layout."""

    def test_build_sets_verdict(self):
        report = IdentityReport.build("x.y", 1.0, 1.0 + 1e-12, 1e-10, "anchor")
        assert report.passed
        assert report.abs_diff == pytest.approx(1e-12, rel=1e-3)

    def test_inconsistent_verdict_rejected(self):
        with pytest.raises(ValidationError):
            IdentityReport(
                identity_id="x", lhs=1.0, rhs=2.0, abs_diff=1.0, tolerance=0.1, passed=True, anchor="a"
            )

    def test_non_finite_side_fails(self):
        report = IdentityReport.build("x", float("nan"), 1.0, 1e-10, "a")
        assert report.abs_diff == math.inf
        assert not report.passed

    def test_tolerance_positive(self):
        with pytest.raises(ValidationError):
            IdentityReport.build("x", 1.0, 1.0, 0.0, "a")

    def test_record_keys(self, make_report):
        record = make_report().to_record()
        assert list(record) == ["identity_id", "lhs", "rhs", "abs_diff", "tolerance", "pass", "anchor", "details"]

    def test_numpy_sides_are_normalised(self):
        report = IdentityReport.build("x", np.complex128(2.0 + 0j), np.float64(2.0), 1e-10, "a")
        assert isinstance(report.lhs, float)


class TestValues:
    """EvalResult and ComplexValue."""

    def test_eval_result_collapses_real_complex(self):
        result = EvalResult(value=np.complex128(3.0 + 0j), error_bound=0.0)
        assert result.value == 3.0
        assert isinstance(result.value, float)

    def test_eval_result_keeps_complex(self):
        result = EvalResult(value=1 + 2j, error_bound=1e-15)
        assert result.value == 1 + 2j
        assert result.real == 1.0

    def test_eval_result_finite(self):
        with pytest.raises(ValidationError):
            EvalResult(value=math.inf, error_bound=0.0)
        with pytest.raises(ValidationError):
            EvalResult(value=1.0, error_bound=-1.0)

    def test_complex_value(self):
        value = ComplexValue.of(1.5 - 2j)
        assert (value.re, value.im) == (1.5, -2.0)
        assert value.to_complex() == 1.5 - 2j
        with pytest.raises(ValidationError):
            ComplexValue(re=math.nan)


class TestPolicies:
    """Truncation, quadrature and suite configuration."""

    def test_policy_defaults(self):
        policy = TruncationPolicy()
        assert policy.tail_mode == "euler_maclaurin"
        assert policy.tail_tolerance > 0

    def test_policy_validation(self):
        with pytest.raises(ValidationError):
            TruncationPolicy(tail_tolerance=0.0)
        with pytest.raises(ValidationError):
            TruncationPolicy(tail_mode="richardson")

    def test_breakpoints(self):
        with pytest.raises(ValidationError):
            QuadratureSpec(breakpoints=[1.0, 0.5])
        spec = QuadratureSpec().with_breakpoints([2.0, 1.0, 2.0])
        assert spec.breakpoints == [1.0, 2.0]

    def test_suite_config(self):
        config = SuiteConfig(tolerance_overrides={"kubert.m2.x0.3": 1e-9}, jobs=4)
        assert config.jobs == 4
        with pytest.raises(ValidationError):
            SuiteConfig(tolerance_overrides={"kubert": -1.0})
        with pytest.raises(ValidationError):
            SuiteConfig(output_format="xml")

    def test_test_function(self):
        f = TestFunction(name="g", alpha=1.0, amplitude=2.0)
        assert f(0.0) == 2.0
        assert f(1.0) == pytest.approx(2.0 * math.exp(-1.0))


class TestSuiteRun:
    """Exit codes and status from a run."""

    def test_all_passed(self, make_report):
        run = SuiteRun(reports=[make_report("a"), make_report("b")])
        assert (run.total, run.passed, run.failed) == (2, 2, 0)
        assert run.exit_code == 0
        assert run.status == "all_passed"

    def test_failure(self, make_report):
        run = SuiteRun(reports=[make_report("a"), make_report("b", lhs=2.0)])
        assert run.exit_code == 1
        assert run.status == "failures"

    def test_engine_error_wins(self, make_report):
        run = SuiteRun(reports=[make_report("a", lhs=2.0)], errors={"b": "ConvergenceError: no"})
        assert run.total == 2
        assert run.exit_code == 2
        assert run.status == "engine_error"


class TestVerifyRequest:
    """API request validation."""

    def test_default_selects_all(self):
        assert VerifyRequest().selectors == ["all"]

    def test_selectors_stripped(self):
        assert VerifyRequest(selectors=[" kubert ", ""]).selectors == ["kubert"]

    def test_blank_selectors(self):
        with pytest.raises(ValidationError):
            VerifyRequest(selectors=["  "])


class TestSymbolicConstant:
    """Exact constants in the span of 1, log p and zeta(2)."""

    TEXT = "25/6 + log(2) - 2*log(3) - 3/2*zeta2"

    def test_parse_and_render(self):
        value = SymbolicConstant.parse(self.TEXT)
        assert value.rational == Fraction(25, 6)
        assert value.log_coeffs == {2: Fraction(1), 3: Fraction(-2)}
        assert value.zeta2_coeff == Fraction(-3, 2)
        assert str(value) == self.TEXT
        assert SymbolicConstant.parse(str(value)) == value

    def test_logs_are_prime_decomposed(self):
        assert SymbolicConstant.log(6) == SymbolicConstant.log(2) + SymbolicConstant.log(3)
        assert SymbolicConstant.log(8) == SymbolicConstant.log(2, 3)
        assert hash(SymbolicConstant.log(6)) == hash(SymbolicConstant.log(2) + SymbolicConstant.log(3))

    def test_arithmetic(self):
        a = SymbolicConstant.parse("1/2 + zeta2")
        assert a - a == SymbolicConstant()
        assert (a * 2) == SymbolicConstant.parse("1 + 2*zeta2")
        assert -a == SymbolicConstant.parse("-1/2 - zeta2")
        assert a + 1 == SymbolicConstant.parse("3/2 + zeta2")

    def test_evaluate(self):
        value = SymbolicConstant.parse("7/2 - 2*zeta2")
        assert value.evaluate() == pytest.approx(3.5 - math.pi ** 2 / 3, abs=1e-15)
        assert float(value) == value.evaluate()

    def test_zero_renders(self):
        assert str(SymbolicConstant()) == "0"

    def test_to_dict(self):
        assert SymbolicConstant.parse("1/3 - log(5)").to_dict() == {
            "rational": "1/3",
            "log_coeffs": {"5": "-1"},
            "zeta2_coeff": "0",
        }

    @pytest.mark.parametrize("text", ["", "pi", "2 +", "log(x)"])
    def test_parse_errors(self, text):
        with pytest.raises(DomainError):
            SymbolicConstant.parse(text)

    def test_log_domain(self):
        with pytest.raises(DomainError):
            SymbolicConstant.log(0)

    def test_franel_piece(self):
        with pytest.raises(DomainError):
            FranelPiece(lo=Fraction(1, 2), hi=Fraction(1, 2), j=1, k=1)
