"""Deterministic CSV and JSON export.

CSV files start with ``#``-prefixed lines carrying the header as compact
JSON, followed by an RFC-4180 table.  Reals are written with 17 significant
digits so that values round-trip exactly.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from pathlib import Path

import numpy as np

from trotterlab.errors import InvalidInputError
from trotterlab.semigroup_checks import BoundCheckReport
from trotterlab.trotter_engine import ErrorCurve, TheoremConstants, envelope

FORMATS = ("csv", "json")


def format_real(x: float) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def to_plain(obj):
    """Convert numpy scalars, enums, dataclass-like rows and non-finite floats to JSON types."""
    if isinstance(obj, dict):
        return {str(k): to_plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_plain(v) for v in obj.tolist()]
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else format_real(x)
    if obj is None or isinstance(obj, str):
        return obj
    raise InvalidInputError(f"cannot serialise {type(obj).__name__}")


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format_real(float(v))
    if isinstance(v, enum.Enum):
        return str(v.value)
    if isinstance(v, (dict, list, tuple)):
        return json.dumps(to_plain(v), sort_keys=True, separators=(",", ":"))
    return "" if v is None else str(v)


def columns_of(rows: list[dict]) -> list[str]:
    cols: list[str] = []
    for row in rows:
        for key in row:
            if key not in cols:
                cols.append(key)
    return cols


def dumps_csv(rows: list[dict], header: dict | None = None) -> str:
    buf = io.StringIO(newline="")
    if header is not None:
        for line in json.dumps(to_plain(header), sort_keys=True, indent=1).splitlines():
            buf.write("# " + line + "\r\n")
    cols = columns_of(rows)
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(cols)
    for row in rows:
        writer.writerow([_cell(row.get(c)) for c in cols])
    return buf.getvalue()


def dumps_json(rows: list[dict], header: dict | None = None) -> str:
    doc = {"header": to_plain(header or {}), "rows": to_plain(rows)}
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_table(path, rows: list[dict], header: dict | None = None, fmt: str = "csv") -> Path:
    if fmt not in FORMATS:
        raise InvalidInputError(f"unknown format {fmt!r}")
    text = dumps_csv(rows, header) if fmt == "csv" else dumps_json(rows, header)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


def read_csv(path) -> tuple[dict, list[dict]]:
    """Inverse of :func:`dumps_csv`; values come back as strings."""
    header_lines, body = [], []
    with open(path, encoding="utf-8", newline="") as fh:
        for line in fh:
            (header_lines if line.startswith("# ") else body).append(line)
    header = json.loads("".join(l[2:] for l in header_lines)) if header_lines else {}
    return header, list(csv.DictReader(body))


def report_rows(reports: list[BoundCheckReport]) -> list[dict]:
    return [r.as_row() for r in reports]


def curve_rows(curve: ErrorCurve, constants: TheoremConstants | None = None) -> list[dict]:
    """``n, error, envelope, margin`` rows; the last two are blank without a ledger."""
    rows = []
    for n, err in curve.points:
        env = float(envelope(n, constants, curve.t)) if constants is not None else None
        rows.append({"n": n, "error": err, "envelope": env, "margin": None if env is None else env - err})
    return rows


def curve_header(curve: ErrorCurve, constants: TheoremConstants | None = None) -> dict:
    head = {"t": curve.t, "ordering": curve.ordering, "norm": curve.norm.label}
    if constants is not None:
        head["constants"] = constants.as_dict()
    return head
