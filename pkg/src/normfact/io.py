"""CSV matrix input and deterministic JSON / CSV report output."""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .errors import ParseError

__all__ = ["dumps_json", "format_number", "read_matrix", "write_long_csv"]


def read_matrix(path) -> np.ndarray:
    """Read comma-separated numeric rows; blank lines and ``#`` lines are skipped."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    rows = []
    width = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = next(csv.reader([stripped]))
        try:
            row = [float(f) for f in fields]
        except ValueError as exc:
            raise ParseError(f"{path}:{lineno}: non-numeric field ({exc})") from exc
        if not all(math.isfinite(x) for x in row):
            raise ParseError(f"{path}:{lineno}: non-finite value")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ParseError(f"{path}:{lineno}: expected {width} fields, found {len(row)}")
        rows.append(row)
    if not rows:
        raise ParseError(f"{path}: no data rows")
    return np.array(rows, dtype=float)


def format_number(x) -> str:
    """17 significant digits: enough for every double to round-trip."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot emit non-finite number {x!r} as JSON")
    if x == 0.0:
        return "0.0"
    s = f"{x:.17g}"
    if "e" not in s and "." not in s:
        s += ".0"
    return s


def _emit(obj, indent, level, out):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        out.append("null")
    elif isinstance(obj, (bool, np.bool_, int, float, np.integer, np.floating)):
        out.append(format_number(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, (k, v) in enumerate(obj.items()):
            out.append(f'{pad}"{k}": ')
            _emit(v, indent, level + 1, out)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        items = list(obj)
        if not items:
            out.append("[]")
            return
        if all(isinstance(x, (int, float, np.integer, np.floating)) for x in items):
            out.append("[" + ", ".join(format_number(x) for x in items) + "]")
            return
        out.append("[\n")
        for i, v in enumerate(items):
            out.append(pad)
            _emit(v, indent, level + 1, out)
            out.append(",\n" if i < len(items) - 1 else "\n")
        out.append(end + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_json(obj, indent: int = 2) -> str:
    out = []
    _emit(obj, indent, 0, out)
    return "".join(out) + "\n"


def write_long_csv(records) -> str:
    """Render ``(step, field, index, value)`` tuples as CSV with a header."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["step", "field", "index", "value"])
    for step, name, index, value in records:
        w.writerow(["" if step is None else step, name, "" if index is None else index, format_number(value)])
    return buf.getvalue()
