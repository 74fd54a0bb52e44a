#!/usr/bin/env python3
"""
Unit tests for formatting helpers, selectors, settings and logging setup.
"""

import json
import logging

import numpy as np
import pytest
from pydantic import ValidationError

from hlzeta.core.config import SIEVE_CAPACITY, Settings
from hlzeta.core.exceptions import ConfigError, UnknownIdentityError
from hlzeta.utils.helpers import (
    csv_text,
    format_number,
    generate_file_stamp,
    generate_timestamp,
    json_line,
    jsonable,
    log_grid,
    parse_complex,
    parse_int_range,
    parse_tolerance_overrides,
    read_config_file,
    select_identities,
)
from hlzeta.utils.logger import setup_logger

KNOWN = [
    "kubert.m1.x0.3",
    "kubert.m2.x0.3",
    "divisor_sum.x60",
    "franel2.n1.m2",
    "franel2.n2.m1",
]


class TestFormatting:
    """Number formatting for report streams."""

    def test_fifteen_significant_digits(self):
        assert format_number(1 / 3) == "0.333333333333333"
        assert format_number(1e-20) == "1e-20"
        assert format_number(2.5) == "2.5"

    def test_integers_and_bools(self):
        assert format_number(5) == "5"
        assert format_number(np.int64(7)) == "7"
        assert format_number(True) == "true"
        assert format_number(np.bool_(False)) == "false"

    def test_complex(self):
        assert format_number(1 + 2j) == "1+2j"
        assert format_number(0.5 - 0.25j) == "0.5-0.25j"
        assert format_number(3 + 0j) == "3"

    def test_jsonable(self):
        data = {"z": 1 - 1j, "bad": float("inf"), "n": np.int32(4), 5: [np.float64(0.5), None]}
        assert jsonable(data) == {"z": {"re": 1.0, "im": -1.0}, "bad": "inf", "n": 4, "5": [0.5, None]}

    def test_csv_uses_lf(self):
        text = csv_text(["x", "value", "ok"], [[1, 0.5, True], [2, "n/a", False], [3, None, None]])
        assert text == "x,value,ok\n1,0.5,true\n2,n/a,false\n3,,\n"

    def test_json_line(self):
        line = json_line({"identity_id": "a", "pass": True, "lhs": 1 + 1j})
        assert line.endswith("\n")
        assert json.loads(line) == {"identity_id": "a", "pass": True, "lhs": {"re": 1.0, "im": 1.0}}

    def test_timestamp_shape(self):
        stamp = generate_timestamp()
        assert len(stamp) == 20
        assert stamp.endswith("Z")

    def test_file_stamp_has_microseconds(self):
        stamp = generate_file_stamp()
        date, time, micro = stamp.split("_")
        assert (len(date), len(time), len(micro)) == (8, 6, 6)
        assert stamp.replace("_", "").isdigit()


class TestTolerances:
    """ID=VALUE overrides and key=value config files."""

    def test_overrides(self):
        assert parse_tolerance_overrides(["kubert.m2.x0.3=1e-9", " franel2 =0.5"]) == {
            "kubert.m2.x0.3": 1e-9,
            "franel2": 0.5,
        }
        assert parse_tolerance_overrides(None) == {}

    @pytest.mark.parametrize("item", ["kubert", "kubert=abc", "kubert=0", "kubert=-1", "kubert=inf"])
    def test_bad_overrides(self, item):
        with pytest.raises(ConfigError):
            parse_tolerance_overrides([item])

    def test_config_file(self, tmp_path):
        path = tmp_path / "suite.conf"
        path.write_text("# suite settings\n\nsieve_bound = 5000\njobs=2\n", encoding="utf-8")
        assert read_config_file(path) == {"sieve_bound": "5000", "jobs": "2"}

    def test_config_file_errors(self, tmp_path):
        with pytest.raises(ConfigError):
            read_config_file(tmp_path / "missing.conf")
        path = tmp_path / "broken.conf"
        path.write_text("jobs 2\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            read_config_file(path)


class TestSelectors:
    """Identity selection keeps canonical order."""

    def test_all(self):
        assert select_identities(["all"], KNOWN) == KNOWN
        assert select_identities([], KNOWN) == KNOWN

    def test_dotted_prefix(self):
        assert select_identities(["kubert"], KNOWN) == ["kubert.m1.x0.3", "kubert.m2.x0.3"]

    def test_pattern_and_exact(self):
        assert select_identities(["franel2.*.m1", "divisor_sum.x60"], KNOWN) == [
            "divisor_sum.x60",
            "franel2.n2.m1",
        ]

    def test_canonical_order_and_dedup(self):
        chosen = select_identities(["franel2", "kubert.m1.*", "franel2.n1.m2"], KNOWN)
        assert chosen == ["kubert.m1.x0.3", "franel2.n1.m2", "franel2.n2.m1"]

    def test_prefix_needs_dot_boundary(self):
        with pytest.raises(UnknownIdentityError) as excinfo:
            select_identities(["kuber"], KNOWN)
        assert excinfo.value.selector == "kuber"


class TestParsers:
    """Small CLI parsers."""

    def test_int_range(self):
        assert parse_int_range("1:6") == (1, 6)
        assert parse_int_range("3:3") == (3, 3)

    @pytest.mark.parametrize("text", ["6:1", "a:b", "7"])
    def test_bad_int_range(self, text):
        with pytest.raises(ConfigError):
            parse_int_range(text)

    def test_log_grid(self):
        assert log_grid(1.0, 100.0, 3) == pytest.approx([1.0, 10.0, 100.0])
        with pytest.raises(ConfigError):
            log_grid(0.0, 1.0, 3)

    def test_complex(self):
        assert parse_complex("1+2i") == 1 + 2j
        assert parse_complex("1, -2") == 1 - 2j
        assert parse_complex("0.5") == 0.5 + 0j
        with pytest.raises(ConfigError):
            parse_complex("one")


class TestSettings:
    """Environment-driven settings."""

    def test_defaults(self):
        config = Settings(_env_file=None)
        assert config.output_format in ("csv", "jsonl")
        assert 10 <= config.sieve_bound <= SIEVE_CAPACITY
        assert set(config.dirichlet_characters) >= {"3:1", "4:1", "5:1"}

    def test_env_prefix(self, monkeypatch):
        monkeypatch.setenv("HLZETA_SIEVE_BOUND", "5000")
        monkeypatch.setenv("HLZETA_TAIL_MODE", "bound")
        config = Settings(_env_file=None)
        assert config.sieve_bound == 5000
        assert config.tail_mode == "bound"

    @pytest.mark.parametrize(
        "field, value",
        [("sieve_bound", 5), ("sieve_bound", SIEVE_CAPACITY + 1), ("tail_mode", "aitken"), ("output_format", "xml")],
    )
    def test_validation(self, field, value):
        with pytest.raises(ValidationError):
            Settings(_env_file=None, **{field: value})


class TestLogger:
    """structlog wiring."""

    def test_json_file_output(self, tmp_path):
        log_path = tmp_path / "hlzeta.log"
        log = setup_logger("hlzeta.test", level="INFO", log_file=str(log_path), json_output=True)
        log.info("sieve built", bound=1000)
        log.debug("not shown")

        std_logger = logging.getLogger("hlzeta.test")
        for handler in std_logger.handlers:
            handler.flush()
        lines = log_path.read_text(encoding="utf-8").splitlines()
        std_logger.handlers.clear()

        assert len(lines) == 1
        event = json.loads(lines[0])
        assert event["event"] == "sieve built"
        assert event["bound"] == 1000
        assert event["level"] == "info"
