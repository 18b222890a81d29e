"""Deterministic CSV and manifest writers."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Iterable, Sequence

FLOAT_FORMAT = ".17g"


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format(v, FLOAT_FORMAT)
    return str(v)


def _sort_key(row: Sequence) -> tuple:
    key = []
    for v in row:
        if v is None:
            key.append((0, 0.0, ""))
        elif isinstance(v, (int, float)) and not isinstance(v, bool):
            # NaN sorts last among numbers so the order is total
            key.append((1, math.inf if math.isnan(v) else float(v), "nan" if math.isnan(v) else ""))
        else:
            key.append((2, 0.0, format_value(v)))
    return tuple(key)


def write_rows(path, columns: Sequence[str], rows: Iterable[Sequence]) -> Path:
    """Write ``rows`` under a header, sorted lexicographically by column values."""
    path = Path(path)
    rows = sorted((tuple(r) for r in rows), key=_sort_key)
    with path.open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            if len(r) != len(columns):
                raise ValueError(f"row has {len(r)} fields, header has {len(columns)}")
            w.writerow([format_value(v) for v in r])
    return path


def emit_csv(result, path) -> Path:
    """Write a :class:`~chirplab.experiments.GridResult` as CSV."""
    return write_rows(path, result.columns, result.rows())


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    with Path(path).open(encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def _json_default(o):
    if hasattr(o, "item"):
        return o.item()
    if hasattr(o, "tolist"):
        return o.tolist()
    if hasattr(o, "value"):
        return o.value
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")


def write_manifest(path, manifest: dict) -> Path:
    path = Path(path)
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True, default=_json_default)
                    + "\n", encoding="utf-8")
    return path
