"""Deterministic JSON and CSV writers for reports.

Keys keep the insertion order the ``to_dict`` methods build, floats are
written with 17 significant digits and non-finite values are rejected, so
identical inputs give byte-identical files. Nothing in this module is part of
the public API.
"""

from __future__ import annotations

import csv
import io
import json
import math
from collections.abc import Iterable, Sequence
from typing import Any

import numpy as np

_INDENT = "  "


def format_float(x: float) -> str:
    value = float(x)
    if not math.isfinite(value):
        raise ValueError(f"cannot serialize non-finite float {value!r}")
    return format(value, ".17g")


def _is_scalar(obj: Any) -> bool:
    return obj is None or isinstance(obj, (bool, int, float, str, np.floating, np.integer))


def _encode(obj: Any, level: int) -> str:
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    pad = _INDENT * (level + 1)
    close = _INDENT * level
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = []
        for key, value in obj.items():
            if not isinstance(key, str):
                raise TypeError(f"JSON object keys must be strings, got {key!r}")
            items.append(f"{pad}{json.dumps(key)}: {_encode(value, level + 1)}")
        return "{\n" + ",\n".join(items) + "\n" + close + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(_is_scalar(item) for item in seq):
            return "[" + ", ".join(_encode(item, level + 1) for item in seq) + "]"
        return (
            "[\n"
            + ",\n".join(f"{pad}{_encode(item, level + 1)}" for item in seq)
            + "\n"
            + close
            + "]"
        )
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any) -> str:
    """Render ``obj`` as indented JSON with a trailing newline."""
    return _encode(obj, 0) + "\n"


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(
            [
                format_float(cell)
                if isinstance(cell, (float, np.floating)) and not isinstance(cell, bool)
                else ("" if cell is None else cell)
                for cell in row
            ]
        )
    return buffer.getvalue()
