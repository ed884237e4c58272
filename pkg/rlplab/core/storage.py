"""
Report storage configuration
Handles the output directory and deterministic report file writers
"""

import json
import logging
import math
import os
from typing import Any, Iterable, Optional, Sequence

import numpy as np

from .config import settings
from .exceptions import ReportIOException

logger = logging.getLogger(__name__)


def init_output_dir(path: Optional[str] = None) -> str:
    """
    Create the report directory if needed

    Args:
        path: Directory to use, defaults to settings.OUTPUT_DIR

    Returns:
        str: Absolute directory path
    """
    target = os.path.abspath(path or settings.REPORT_DIR_OVERRIDE or settings.OUTPUT_DIR)
    try:
        os.makedirs(target, exist_ok=True)
    except OSError as e:
        logger.error(f"Failed to create output directory {target}: {str(e)}")
        raise ReportIOException(f"Cannot create output directory {target}: {str(e)}")
    return target


def format_value(value: Any) -> str:
    """Render a scalar with a stable textual form"""
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    return str(value)


def _jsonable(value: Any) -> Any:
    """Replace numpy scalars and non-finite floats so the JSON stays standard"""
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not math.isfinite(value):
        return format_value(value)
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _write_text(path: str, text: str) -> str:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as handle:
            handle.write(text)
    except OSError as e:
        logger.error(f"Failed to write {path}: {str(e)}")
        raise ReportIOException(f"Cannot write {path}: {str(e)}")
    logger.debug(f"Wrote {path}")
    return path


def write_json(path: str, data: dict) -> str:
    """Write a JSON document with sorted keys"""
    text = json.dumps(_jsonable(data), sort_keys=True, indent=2, allow_nan=False)
    return _write_text(path, text + "\n")


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """Write a comma-separated table"""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    return _write_text(path, "\n".join(lines) + "\n")


def write_plot(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """Write a two-column whitespace series with a commented header"""
    lines = ["# " + " ".join(header)]
    for row in rows:
        lines.append(" ".join(format_value(v) for v in row))
    return _write_text(path, "\n".join(lines) + "\n")


def read_json(path: str) -> dict:
    """Read a report back"""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except (OSError, ValueError) as e:
        logger.error(f"Failed to read {path}: {str(e)}")
        raise ReportIOException(f"Cannot read {path}: {str(e)}")
