"""
Utility functions for the HLZeta workbench.
"""
import csv
import fnmatch
import io
import json
import math
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, TextIO, Tuple, Union

import numpy as np

from hlzeta.core.exceptions import ConfigError, UnknownIdentityError
from hlzeta.utils.logger import logger

Number = Union[int, float, complex]


def generate_timestamp() -> str:
    """Generate ISO format timestamp."""
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def generate_file_stamp() -> str:
    """Generate a compact timestamp for file naming, down to microseconds."""
    return datetime.now(timezone.utc).strftime("%Y%m%d_%H%M%S_%f")


def format_number(value: Number) -> str:
    """
    Format a number with 15 significant digits.

    Python's general format switches to scientific notation for very large
    or very small magnitudes, which keeps table diffs reproducible.

    Args:
        value: Real or complex number

    Returns:
        Formatted string
    """
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, complex) and value.imag != 0.0:
        return f"{value.real:.15g}{value.imag:+.15g}j"
    if isinstance(value, complex):
        value = value.real
    return f"{float(value):.15g}"


def jsonable(value: Any) -> Any:
    """Convert numbers and containers into JSON-friendly values."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else str(value)
    return value if value is None or isinstance(value, str) else str(value)


def write_csv(
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    stream: TextIO,
) -> int:
    """
    Write rows as CSV with LF line endings and formatted numbers.

    Args:
        header: Column names
        rows: Row values
        stream: Target text stream

    Returns:
        Number of data rows written
    """
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    count = 0
    for row in rows:
        writer.writerow([
            cell if isinstance(cell, str) else "" if cell is None else format_number(cell) for cell in row
        ])
        count += 1
    return count


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """Render rows to a CSV string."""
    buffer = io.StringIO()
    write_csv(header, rows, buffer)
    return buffer.getvalue()


def json_line(record: Dict[str, Any]) -> str:
    """Serialize one record as a JSON line with stable key order."""
    return json.dumps(jsonable(record), ensure_ascii=False) + "\n"


def parse_tolerance_overrides(items: Optional[Sequence[str]]) -> Dict[str, float]:
    """
    Parse repeated ``ID=VALUE`` tolerance overrides.

    Args:
        items: Raw ``ID=VALUE`` strings

    Returns:
        Mapping identity_id -> tolerance
    """
    overrides: Dict[str, float] = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigError(f"Tolerance override must look like ID=VALUE, got {item!r}", key=item)
        key, raw = item.split("=", 1)
        key = key.strip()
        try:
            value = float(raw)
        except ValueError:
            raise ConfigError(f"Tolerance for {key} is not a number: {raw!r}", key=key)
        if not (value > 0 and math.isfinite(value)):
            raise ConfigError(f"Tolerance for {key} must be positive", key=key)
        overrides[key] = value
    return overrides


def read_config_file(path: Union[str, Path]) -> Dict[str, str]:
    """
    Read a flat ``key=value`` configuration file.

    Blank lines and lines starting with ``#`` are ignored.

    Args:
        path: Config file path

    Returns:
        Raw key/value mapping
    """
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"Config file not found: {path}", key=str(path))

    values: Dict[str, str] = {}
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value", key=line)
        key, value = line.split("=", 1)
        values[key.strip()] = value.strip()
    logger.debug("config file read", path=str(path), keys=len(values))
    return values


def select_identities(patterns: Sequence[str], known: Sequence[str]) -> List[str]:
    """
    Resolve selectors against the registered identity ids.

    A selector is "all", an exact id, a dotted prefix ("kubert" selects every
    kubert.* id) or a shell-style pattern.

    Args:
        patterns: Selectors such as ``kubert.*`` or ``all``
        known: Registered ids in canonical order

    Returns:
        Matching ids in canonical order
    """
    if not patterns or any(p in ("all", "*") for p in patterns):
        return list(known)

    chosen = set()
    for pattern in patterns:
        matches = [
            name for name in known
            if name == pattern or name.startswith(pattern + ".") or fnmatch.fnmatchcase(name, pattern)
        ]
        if not matches:
            raise UnknownIdentityError(f"No identity matches {pattern!r}", selector=pattern)
        chosen.update(matches)
    return [name for name in known if name in chosen]


def parse_int_range(text: str) -> Tuple[int, int]:
    """Parse ``a:b`` (inclusive) into a pair of integers."""
    try:
        lo, hi = (int(part) for part in text.split(":", 1))
    except ValueError:
        raise ConfigError(f"Range must look like LO:HI, got {text!r}", key=text)
    if lo > hi:
        raise ConfigError(f"Empty range {text!r}", key=text)
    return lo, hi


def log_grid(x_min: float, x_max: float, points: int) -> np.ndarray:
    """Logarithmically spaced grid including both ends."""
    if x_min <= 0 or x_max < x_min or points < 1:
        raise ConfigError("Log grid needs 0 < x_min <= x_max and at least one point")
    return np.geomspace(x_min, x_max, points)


def parse_complex(text: str) -> complex:
    """Parse ``a``, ``a+bj`` or ``a,b`` into a complex number."""
    text = text.strip().replace(" ", "")
    try:
        if "," in text:
            re_part, im_part = text.split(",", 1)
            return complex(float(re_part), float(im_part))
        return complex(text.replace("i", "j"))
    except ValueError:
        raise ConfigError(f"Cannot parse a complex number from {text!r}", key=text)
