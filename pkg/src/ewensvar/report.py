"""Text renderings shared by the CLI: JSON lines, CSV tables and plain text.

Rationals are always written as ``"p/q"`` strings (lowest terms, q > 0, and
just ``"p"`` for integers) so that reports re-parse exactly.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction

import numpy as np

from .scalar import render


def jsonable(x):
    if isinstance(x, Fraction):
        return render(x)
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, dict):
        return {k: jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [jsonable(v) for v in x]
    return x


def json_line(record: dict) -> str:
    return json.dumps(jsonable(record), sort_keys=False, allow_nan=True)


def parse_value(v):
    """Inverse of the rendering: ``"p/q"`` strings back to Fraction."""
    if isinstance(v, str):
        try:
            return Fraction(v)
        except ValueError:
            return v
    if isinstance(v, list):
        return [parse_value(x) for x in v]
    if isinstance(v, dict):
        return {k: parse_value(x) for k, x in v.items()}
    return v


def cell(x) -> str:
    if isinstance(x, np.integer):
        x = int(x)
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (Fraction, int)) and not isinstance(x, bool):
        return render(x)
    return str(x)


def matrix_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for row in rows:
        w.writerow([cell(x) for x in row])
    return buf.getvalue()


def records_csv(records: list) -> str:
    if not records:
        return ""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    keys = list(records[0])
    w.writerow(keys)
    for r in records:
        w.writerow([cell(r.get(k)) if not isinstance(r.get(k), (list, tuple, dict))
                    else json.dumps(jsonable(r.get(k))) for k in keys])
    return buf.getvalue()


def records_plain(records: list) -> str:
    lines = []
    for r in records:
        lines.append("  ".join(f"{k}={cell(v) if not isinstance(v, (list, tuple, dict)) else jsonable(v)}"
                               for k, v in r.items()))
    return "\n".join(lines) + ("\n" if lines else "")


def records_json(records: list) -> str:
    return "".join(json_line(r) + "\n" for r in records)


def render_records(records: list, fmt: str) -> str:
    if fmt == "json":
        return records_json(records)
    if fmt == "csv":
        return records_csv(records)
    if fmt == "plain":
        return records_plain(records)
    raise ValueError(f"unknown format {fmt!r}")
