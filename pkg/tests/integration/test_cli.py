#!/usr/bin/env python3
"""
Integration tests for the command-line front end.
"""

import csv
import json

import pytest

import hlzeta.cli as cli
from hlzeta.core.exceptions import ConvergenceError
from hlzeta.models.schemas import IdentityReport
from hlzeta.services.suite import IdentityCheck, IdentitySuite


def fake_suite(*outcomes):
    """Suite of checks named fake.<i>; an outcome is a diff or an exception."""
    checks = []
    for i, outcome in enumerate(outcomes):
        def runner(tol, outcome=outcome, identity_id=f"fake.c{i}"):
            if isinstance(outcome, Exception):
                raise outcome
            return IdentityReport.build(identity_id, 0.5, 0.5 + outcome, tol, "fake")
        checks.append(IdentityCheck(identity_id=f"fake.c{i}", anchor="fake", tolerance=1e-10, runner=runner))
    return IdentitySuite(checks)


class TestVerify:
    """verify writes one record per identity and maps verdicts to exit codes."""

    def test_csv_report(self, tmp_path):
        out = tmp_path / "kubert.csv"
        assert cli.main(["verify", "kubert", "--format", "csv", "--out", str(out)]) == 0
        lines = out.read_text(encoding="utf-8").split("\n")
        assert lines[0] == ",".join(cli.REPORT_COLUMNS)
        assert lines[-1] == ""
        rows = [line.split(",") for line in lines[1:-1]]
        assert len(rows) == 12
        assert all(row[5] == "true" for row in rows)

    def test_jsonl_report(self, tmp_path):
        out = tmp_path / "one.jsonl"
        assert cli.main(["verify", "kubert.m2.x0.3", "--format", "jsonl", "--out", str(out)]) == 0
        records = [json.loads(line) for line in out.read_text(encoding="utf-8").splitlines()]
        assert len(records) == 1
        assert records[0]["identity_id"] == "kubert.m2.x0.3"
        assert records[0]["pass"] is True
        assert records[0]["lhs"] == pytest.approx(0.1, abs=1e-15)

    def test_output_is_deterministic(self, tmp_path):
        first, second = tmp_path / "a.csv", tmp_path / "b.csv"
        args = ["verify", "kubert", "divisor_sum.x60", "--format", "csv", "--jobs", "3"]
        assert cli.main(args + ["--out", str(first)]) == 0
        assert cli.main(args + ["--out", str(second)]) == 0
        assert first.read_bytes() == second.read_bytes()

    def test_list(self, tmp_path):
        out = tmp_path / "ids.txt"
        assert cli.main(["verify", "kubert.m1.*", "--list", "--out", str(out)]) == 0
        lines = out.read_text(encoding="utf-8").splitlines()
        assert [line.split("\t")[0] for line in lines] == ["kubert.m1.x0.3", "kubert.m1.x2", "kubert.m1.x-1.45"]

    def test_config_file(self, tmp_path):
        conf = tmp_path / "suite.conf"
        conf.write_text("# local run\nformat = csv\njobs = 2\ntol.kubert.m2.x0.3 = 1e-9\n", encoding="utf-8")
        out = tmp_path / "run.csv"
        assert cli.main(["verify", "kubert.m2.x0.3", "--config", str(conf), "--out", str(out)]) == 0
        row = out.read_text(encoding="utf-8").splitlines()[1].split(",")
        assert row[4] == "1e-09"

    def test_failure_exit_code(self, tmp_path, monkeypatch):
        monkeypatch.setattr(cli, "identity_suite", fake_suite(0.0, 1e-3))
        out = tmp_path / "run.jsonl"
        assert cli.main(["verify", "--format", "jsonl", "--out", str(out)]) == 1
        records = [json.loads(line) for line in out.read_text(encoding="utf-8").splitlines()]
        assert [r["pass"] for r in records] == [True, False]

    def test_engine_error_exit_code(self, tmp_path, monkeypatch):
        monkeypatch.setattr(cli, "identity_suite", fake_suite(1e-3, ConvergenceError("stalled"), 0.0))
        out = tmp_path / "run.jsonl"
        assert cli.main(["verify", "--format", "jsonl", "--out", str(out)]) == 2
        records = [json.loads(line) for line in out.read_text(encoding="utf-8").splitlines()]
        assert records[1] == {"identity_id": "fake.c1", "error": "ConvergenceError: stalled"}
        assert records[2]["pass"] is True

    def test_engine_error_row_in_csv(self, tmp_path, monkeypatch):
        monkeypatch.setattr(cli, "identity_suite", fake_suite(ConvergenceError("stalled")))
        out = tmp_path / "run.csv"
        assert cli.main(["verify", "--format", "csv", "--out", str(out)]) == 2
        assert out.read_text(encoding="utf-8").splitlines()[1].split(",")[5] == "error"

    @pytest.mark.parametrize(
        "argv",
        [
            ["verify", "no_such_identity"],
            ["verify", "kubert", "--tol", "kubert.m1.x0.3=abc"],
            ["verify", "kubert", "--jobs", "0"],
        ],
    )
    def test_configuration_errors(self, argv, capsys):
        assert cli.main(argv) == 2
        assert "error:" in capsys.readouterr().err

    def test_unknown_config_key(self, tmp_path):
        conf = tmp_path / "bad.conf"
        conf.write_text("colour = blue\n", encoding="utf-8")
        assert cli.main(["verify", "kubert", "--config", str(conf)]) == 2


class TestTablesAndScans:
    """CSV tables and trend scans."""

    def test_franel2_table(self, tmp_path):
        out = tmp_path / "franel2.csv"
        assert cli.main(["table", "franel2", "--n", "1:2", "--m", "1:2", "--out", str(out)]) == 0
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "n,m,closed_form,value,oracle,abs_diff"
        assert len(lines) == 5
        row = lines[2].split(",")
        assert row[:3] == ["1", "2", "7/2 - 2*zeta2"]
        assert float(row[5]) < 1e-10

    def test_franel2_capacity(self):
        assert cli.main(["table", "franel2", "--n", "1:13", "--m", "1:1"]) == 2

    def test_franel1_table(self, tmp_path):
        out = tmp_path / "franel1.csv"
        assert cli.main(["table", "franel1", "--points", "5", "--out", str(out)]) == 0
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "beta,value,error_bound"
        rows = [[float(cell) for cell in line.split(",")] for line in lines[1:]]
        assert [row[0] for row in rows] == [0.0, 0.25, 0.5, 0.75, 1.0]
        assert all(row[2] <= 1e-10 for row in rows)
        assert rows[-1][1] == pytest.approx(0.260661401507812, abs=1e-9)

    def test_an_coeffs_table(self, tmp_path):
        out = tmp_path / "an.csv"
        assert cli.main(["table", "an_coeffs", "--n", "1:3", "--theta", "0.5", "--out", str(out)]) == 0
        lines = out.read_text(encoding="utf-8").splitlines()
        assert len(lines) == 4
        assert all(float(line.split(",")[4]) < 1e-8 for line in lines[1:])

    def test_bod_scan(self, tmp_path):
        out = tmp_path / "bod.csv"
        argv = ["scan", "bod", "--theta", "0.5", "--x", "0.25", "--n-grid", "64", "--out", str(out)]
        assert cli.main(argv) == 0
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0] == "N,partial_sum,target"
        assert [line.split(",")[0] for line in lines[1:]] == ["1", "2", "4", "8", "16", "32", "64"]

    def test_divisor_scan(self, tmp_path):
        out = tmp_path / "divisor.csv"
        argv = ["scan", "divisor", "--x-min", "10", "--x-max", "1000", "--points", "3", "--out", str(out)]
        assert cli.main(argv) == 0
        assert len(out.read_text(encoding="utf-8").splitlines()) == 4


class TestEval:
    """eval prints one value with its bound."""

    def test_jsonl(self, tmp_path):
        out = tmp_path / "f.jsonl"
        assert cli.main(["eval", "f_hl", "1.0", "--format", "jsonl", "--out", str(out)]) == 0
        record = json.loads(out.read_text(encoding="utf-8"))
        assert record["kind"] == "f_hl"
        assert isinstance(record["value"], float)
        assert record["error_bound"] < 1e-9

    def test_complex_csv(self, tmp_path):
        out = tmp_path / "exp.csv"
        assert cli.main(["eval", "exp_form", "0.5,0.5", "--format", "csv", "--out", str(out)]) == 0
        with open(out, newline="", encoding="utf-8") as stream:
            header, row = list(csv.reader(stream))
        assert header == ["kind", "z", "value", "error_bound", "terms"]
        assert row[1] == "0.5,0.5"
        assert row[2].endswith("j")

    def test_unknown_kind(self):
        assert cli.main(["eval", "f_unknown", "1.0"]) == 2
