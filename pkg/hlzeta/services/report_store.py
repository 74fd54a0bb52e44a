"""
Local persistence of verify runs as JSON-lines files.
"""
import json
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import aiofiles

from hlzeta.core.config import settings
from hlzeta.core.exceptions import ReportStoreError
from hlzeta.models.schemas import SuiteRun
from hlzeta.utils.helpers import generate_file_stamp, generate_timestamp, json_line
from hlzeta.utils.logger import logger


class ReportStore:
    """Writes and reads verify runs under the reports directory."""

    def __init__(self, base_path: Optional[Union[str, Path]] = None):
        """Initialize the store; the directory is created on first write."""
        self.base_path = Path(base_path or settings.reports_dir)

    @staticmethod
    def _claim(path: Path) -> Path:
        """Create path, or the first free path with a counter suffix, exclusively."""
        candidate, suffix = path, 1
        while True:
            try:
                candidate.touch(exist_ok=False)
                return candidate
            except FileExistsError:
                candidate = path.with_name(f"{path.stem}_{suffix}{path.suffix}")
                suffix += 1

    async def save_run(self, run: SuiteRun, selectors: Sequence[str]) -> str:
        """
        Persist a suite run.

        The first line is a header record, followed by the identity reports
        in canonical order and then the engine errors.

        Args:
            run: Suite outcome
            selectors: Selectors the run was started with

        Returns:
            file:// URL of the written file
        """
        file_path = self.base_path / f"verify_{generate_file_stamp()}.jsonl"
        try:
            self.base_path.mkdir(parents=True, exist_ok=True)
            file_path = self._claim(file_path)
            header = {
                "record": "run",
                "timestamp": generate_timestamp(),
                "selectors": list(selectors),
                "status": run.status,
                "total": run.total,
                "passed": run.passed,
                "failed": run.failed,
            }
            async with aiofiles.open(file_path, "w", encoding="utf-8", newline="\n") as f:
                await f.write(json_line(header))
                for report in run.reports:
                    await f.write(json_line({"record": "report", **report.to_record()}))
                for identity_id, error in run.errors.items():
                    await f.write(json_line({"record": "error", "identity_id": identity_id, "error": error}))

            file_url = f"file://{file_path.absolute()}"
            logger.info("verify run saved", url=file_url, reports=len(run.reports), errors=len(run.errors))
            return file_url

        except Exception as e:
            error_msg = f"Failed to save verify run: {e}"
            logger.error(error_msg)
            raise ReportStoreError(error_msg, str(self.base_path), str(file_path))

    async def load_run(self, file_path: str) -> List[Dict[str, Any]]:
        """
        Read a persisted run back as a list of records.

        Args:
            file_path: Path or file:// URL

        Returns:
            Parsed records, header first
        """
        if file_path.startswith("file://"):
            file_path = file_path[7:]
        path = Path(file_path)
        try:
            async with aiofiles.open(path, "r", encoding="utf-8") as f:
                content = await f.read()
            return [json.loads(line) for line in content.splitlines() if line.strip()]
        except Exception as e:
            error_msg = f"Failed to read verify run {file_path}: {e}"
            logger.error(error_msg)
            raise ReportStoreError(error_msg, str(self.base_path), file_path)

    async def list_runs(self) -> List[Dict[str, Any]]:
        """List persisted runs, newest first."""
        if not self.base_path.exists():
            return []
        runs = []
        for path in self.base_path.glob("verify_*.jsonl"):
            try:
                stat = path.stat()
                runs.append({
                    "name": path.name,
                    "size": stat.st_size,
                    "last_modified": datetime.fromtimestamp(stat.st_mtime).isoformat(),
                    "url": f"file://{path.absolute()}",
                })
            except OSError as e:
                logger.warning(f"Could not get file info for {path}: {e}")
        return sorted(runs, key=lambda r: r["name"], reverse=True)


# Global report store instance
report_store = ReportStore()
