"""Atomic JSON / CSV / text artifact writers."""

from __future__ import annotations

import csv
import io
import json
import math
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any


def format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _json_safe(value: Any) -> Any:
    """Non-finite floats become null so every document is strict JSON."""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    return value


def write_text(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    tmp.replace(path)
    return path


def write_json(path: Path, data: dict[str, Any]) -> Path:
    return write_text(path, json.dumps(_json_safe(data), indent=2, ensure_ascii=False) + "\n")


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(v) for v in row])
    return write_text(path, buf.getvalue())


def read_vertex_weights(path: Path, n: int) -> list[float]:
    """Vertex-weight CSV: either ``vertex,weight`` rows or one weight per line."""
    weights = [0.0] * n
    text = path.read_text(encoding="utf-8")
    rows = [r for r in csv.reader(io.StringIO(text)) if r and not r[0].lstrip().startswith("#")]
    if rows and len(rows[0]) == 2 and not _is_number(rows[0][0]):
        rows = rows[1:]
    if rows and all(len(r) == 1 for r in rows):
        if len(rows) != n:
            raise ValueError(f"{path}: expected {n} weights, got {len(rows)}")
        return [float(r[0]) for r in rows]
    for line_no, row in enumerate(rows, start=1):
        if len(row) != 2:
            raise ValueError(f"{path}: row {line_no} should be 'vertex,weight', got {row}")
        v = int(row[0])
        if not 0 <= v < n:
            raise ValueError(f"{path}: vertex {v} outside 0..{n - 1}")
        weights[v] += float(row[1])
    return weights


def read_permutation(path: Path) -> list[int]:
    """Whitespace- or comma-separated positions; '#' starts a comment."""
    tokens: list[int] = []
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].replace(",", " ")
        tokens.extend(int(tok) for tok in line.split())
    return tokens


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True
