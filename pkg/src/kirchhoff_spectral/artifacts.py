"""Deterministic CSV/JSON artifact writers.

Floats go to CSV with 17 significant digits (lossless for doubles) and to
JSON through the shortest round-trip repr; keys are sorted and the byte
stream carries no timestamps, so identical inputs reproduce identical
artifact bytes.
"""

from __future__ import annotations

import hashlib
import json
import math
from pathlib import Path


def format_float(x: float) -> str:
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    return f"{x:.17g}"


def write_csv(path, header, columns) -> None:
    """Write named columns of equal length."""
    cols = [list(c) for c in columns]
    n = len(cols[0]) if cols else 0
    for c in cols:
        if len(c) != n:
            raise ValueError("csv columns must have equal length")
    lines = [",".join(header)]
    for i in range(n):
        lines.append(",".join(format_float(float(c[i])) for c in cols))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "tolist"):
        return _jsonable(obj.tolist())
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    return obj


def dump_json(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dump_json(obj), encoding="utf-8")


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def sha256_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
