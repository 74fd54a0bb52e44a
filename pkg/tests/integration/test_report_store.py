#!/usr/bin/env python3
"""
Integration tests for local persistence of verify runs.
"""

import pytest

from hlzeta.core.exceptions import ReportStoreError
from hlzeta.models.schemas import SuiteRun
from hlzeta.services import report_store
from hlzeta.services.report_store import ReportStore


@pytest.fixture
def suite_run(make_report):
    return SuiteRun(
        reports=[make_report("kubert.m2.x0.3", lhs=0.1, rhs=0.1), make_report("franel2.n1.m2", lhs=2.0)],
        errors={"voronoi.gauss_pi": "ConvergenceError: stalled"},
    )


class TestReportStore:
    """save_run, load_run and list_runs against a temporary directory."""

    @pytest.mark.asyncio
    async def test_round_trip(self, tmp_path, suite_run):
        store = ReportStore(tmp_path / "reports")
        url = await store.save_run(suite_run, ["kubert", "franel2.n1.m2"])
        assert url.startswith("file://")

        records = await store.load_run(url)
        header, *body = records
        assert header["record"] == "run"
        assert header["status"] == "engine_error"
        assert (header["total"], header["passed"], header["failed"]) == (3, 1, 1)
        assert header["selectors"] == ["kubert", "franel2.n1.m2"]
        assert [r["record"] for r in body] == ["report", "report", "error"]
        assert body[0]["identity_id"] == "kubert.m2.x0.3"
        assert body[1]["pass"] is False
        assert body[2] == {"record": "error", "identity_id": "voronoi.gauss_pi", "error": "ConvergenceError: stalled"}

    @pytest.mark.asyncio
    async def test_list_runs(self, tmp_path, suite_run):
        store = ReportStore(tmp_path / "reports")
        assert await store.list_runs() == []
        url = await store.save_run(suite_run, ["all"])
        runs = await store.list_runs()
        assert len(runs) == 1
        assert runs[0]["name"].startswith("verify_")
        assert runs[0]["url"] == url
        assert runs[0]["size"] > 0

    @pytest.mark.asyncio
    async def test_load_missing(self, tmp_path):
        store = ReportStore(tmp_path)
        with pytest.raises(ReportStoreError):
            await store.load_run(str(tmp_path / "verify_missing.jsonl"))

    @pytest.mark.asyncio
    async def test_unwritable_directory(self, tmp_path, suite_run):
        blocker = tmp_path / "not_a_dir"
        blocker.write_text("x", encoding="utf-8")
        store = ReportStore(blocker / "reports")
        with pytest.raises(ReportStoreError) as excinfo:
            await store.save_run(suite_run, ["all"])
        assert excinfo.value.base_path == str(blocker / "reports")

    @pytest.mark.asyncio
    async def test_back_to_back_runs_keep_separate_files(self, tmp_path, suite_run):
        store = ReportStore(tmp_path / "reports")
        first = await store.save_run(suite_run, ["kubert"])
        second = await store.save_run(suite_run, ["franel2"])
        assert first != second
        runs = await store.list_runs()
        assert len(runs) == 2
        selectors = [(await store.load_run(run["url"]))[0]["selectors"] for run in runs]
        assert sorted(selectors) == [["franel2"], ["kubert"]]

    @pytest.mark.asyncio
    async def test_same_stamp_gets_counter_suffix(self, tmp_path, suite_run, monkeypatch):
        monkeypatch.setattr(report_store, "generate_file_stamp", lambda: "20240101_120000_000000")
        store = ReportStore(tmp_path)
        first = await store.save_run(suite_run, ["kubert"])
        second = await store.save_run(suite_run, ["franel2"])
        assert first.endswith("verify_20240101_120000_000000.jsonl")
        assert second.endswith("verify_20240101_120000_000000_1.jsonl")
        assert (await store.load_run(first))[0]["selectors"] == ["kubert"]
        assert (await store.load_run(second))[0]["selectors"] == ["franel2"]
