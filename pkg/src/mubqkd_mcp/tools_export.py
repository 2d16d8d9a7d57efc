"""
Export tools for tables, reports and round records.

CSV output is byte-reproducible: header row, numbers with 12 significant
digits, UNIX line endings. JSON and YAML carry the same rows; round records
are streamed as newline-delimited JSON.
"""

import csv
import io
import json
import logging
import os
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Sequence

from .errors import ErrorCode, FileError

logger = logging.getLogger(__name__)

FORMATS = ("csv", "json", "yaml")


def format_number(value: Any) -> str:
    """Render one CSV cell."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".12g")
    if isinstance(value, Enum):
        return str(value.value)
    return str(value)


def _plain(value: Any) -> Any:
    """Convert enums and numpy scalars for JSON/YAML."""
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if hasattr(value, "item") and callable(value.item):
        return value.item()
    return value


def rows_to_csv(rows: Sequence[Dict[str, Any]], columns: Optional[Sequence[str]] = None) -> str:
    """
    Render rows as CSV text.

    Args:
        rows: Flat dictionaries, one per row
        columns: Column order (default: keys of the first row)

    Returns:
        CSV text with a header row and "\\n" line endings
    """
    if columns is None:
        columns = list(rows[0].keys()) if rows else []
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_number(row.get(col)) for col in columns])
    return buffer.getvalue()


def render(data: Any, format: str = "csv", columns: Optional[Sequence[str]] = None) -> str:
    """
    Render rows (or a single mapping) in csv, json or yaml.

    A single mapping is written as a one-row CSV.
    """
    if format not in FORMATS:
        raise FileError(
            f"Unsupported output format: {format}",
            code=ErrorCode.FILE_FORMAT_UNSUPPORTED,
            context={"format": format, "supported": list(FORMATS)},
        )
    if format == "csv":
        rows = [data] if isinstance(data, dict) else list(data)
        return rows_to_csv(rows, columns)
    if format == "json":
        return json.dumps(_plain(data), indent=2) + "\n"
    try:
        import yaml
    except ImportError:
        raise FileError(
            "YAML support requires 'pyyaml' package",
            code=ErrorCode.MISSING_DEPENDENCY,
        )
    return yaml.safe_dump(_plain(data), default_flow_style=False, sort_keys=False)


def _check_output_dir(output_path: str) -> str:
    output_path = os.path.abspath(output_path)
    output_dir = os.path.dirname(output_path)
    if not os.path.exists(output_dir):
        raise FileError(
            f"Output directory does not exist: {output_dir}",
            code=ErrorCode.FILE_NOT_FOUND,
            context={"path": output_path},
        )
    return output_path


def write_text(text: str, output_path: str) -> str:
    """Write text with UNIX line endings; returns the absolute path."""
    output_path = _check_output_dir(output_path)
    with open(output_path, "w", newline="\n") as f:
        f.write(text)
    logger.info("Wrote %d bytes to %s", len(text), output_path)
    return output_path


def write_ndjson(rows: Iterable[Dict[str, Any]], output_path: str) -> int:
    """Stream rows as newline-delimited JSON; returns the number of lines."""
    output_path = _check_output_dir(output_path)
    count = 0
    with open(output_path, "w", newline="\n") as f:
        for row in rows:
            f.write(json.dumps(_plain(row), separators=(",", ":")))
            f.write("\n")
            count += 1
    logger.info("Wrote %d records to %s", count, output_path)
    return count


async def export_rows(
    rows: List[Dict[str, Any]],
    output_path: str,
    format: str = "csv",
    columns: Optional[List[str]] = None,
) -> Dict[str, Any]:
    """
    Export result rows to a file.

    Args:
        rows: Rows to write
        output_path: Destination file
        format: "csv", "json" or "yaml" (default: csv)
        columns: Optional CSV column order

    Returns:
        Dictionary with output_file, rows_written and format
    """
    text = render(rows, format, columns)
    path = write_text(text, output_path)
    return {
        "output_file": path,
        "rows_written": len(rows),
        "format": format,
        "size_bytes": os.path.getsize(path),
    }
