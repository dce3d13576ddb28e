"""Plain-text result tables: CSV preceded by ``# key: value`` header lines."""

from __future__ import annotations

import csv
import io
from pathlib import Path


def format_value(value) -> str:
    if hasattr(value, "item"):  # numpy scalar
        value = value.item()
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    return str(value)


def render_table(header: dict, columns: list[str], rows) -> str:
    buf = io.StringIO()
    for key, value in header.items():
        buf.write(f"# {key}: {format_value(value)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def write_table(path: str | Path, header: dict, columns: list[str], rows) -> Path:
    path = Path(path)
    path.write_text(render_table(header, columns, rows))
    return path


def _parse_cell(text: str):
    if text in ("true", "false"):
        return text == "true"
    if text == "":
        return None
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def read_table(path: str | Path) -> tuple[dict, list[str], list[list]]:
    """Inverse of :func:`write_table`; header values stay strings, cells are typed."""
    header, body = {}, []
    for line in Path(path).read_text().splitlines():
        if line.startswith("# "):
            key, _, value = line[2:].partition(": ")
            header[key] = value
        else:
            body.append(line)
    reader = csv.reader(body)
    columns = next(reader)
    rows = [[_parse_cell(c) for c in row] for row in reader]
    for row in rows:
        if len(row) != len(columns):
            raise ValueError(f"{path}: row has {len(row)} cells, expected {len(columns)}")
    return header, columns, rows
