"""Matrix JSON interchange and deterministic report serialisation.

Matrix format::

    {"rows": 2, "cols": 2, "data": [[re, im], [re, im], ...]}

row-major; plain numbers are accepted in ``data`` for real entries.
Floats are written with 17 significant digits so every emitted matrix
re-parses to the identical doubles.
"""
from __future__ import annotations

import json
import math
from numbers import Real
from pathlib import Path
from typing import Any, Union

import numpy as np

from .errors import ParseError

__all__ = [
    "matrix_from_obj",
    "matrix_to_obj",
    "load_matrix",
    "dumps",
    "format_float",
]


def _entry(value: Any, where: str) -> complex:
    if isinstance(value, bool):
        raise ParseError(f"{where}: booleans are not matrix entries")
    if isinstance(value, Real):
        return complex(float(value), 0.0)
    if isinstance(value, (list, tuple)) and len(value) == 2 and all(
        isinstance(v, Real) and not isinstance(v, bool) for v in value
    ):
        return complex(float(value[0]), float(value[1]))
    raise ParseError(f"{where}: expected a number or [re, im] pair, got {value!r}")


def matrix_from_obj(obj: Any) -> np.ndarray:
    if not isinstance(obj, dict):
        raise ParseError("matrix must be a JSON object")
    try:
        rows, cols, data = obj["rows"], obj["cols"], obj["data"]
    except KeyError as exc:
        raise ParseError(f"matrix object missing key {exc}") from None
    if not all(isinstance(v, int) and not isinstance(v, bool) and v >= 0 for v in (rows, cols)):
        raise ParseError("rows and cols must be nonnegative integers")
    if not isinstance(data, list) or len(data) != rows * cols:
        raise ParseError(f"data must be a list of rows*cols = {rows * cols} entries")
    vals = [_entry(v, f"data[{i}]") for i, v in enumerate(data)]
    m = np.array(vals, dtype=np.complex128).reshape(rows, cols)
    if not np.all(np.isfinite(m)):
        raise ParseError("matrix has non-finite entries")
    return m


def matrix_to_obj(m: np.ndarray) -> dict:
    m = np.asarray(m, dtype=np.complex128)
    rows, cols = m.shape
    data = [[float(z.real), float(z.imag)] for z in m.reshape(-1)]
    return {"rows": rows, "cols": cols, "data": data}


def load_matrix(path: Union[str, Path]) -> np.ndarray:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON: {exc}") from exc
    return matrix_from_obj(obj)


def format_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    if x == 0.0:
        return "0.0" if math.copysign(1.0, x) > 0 else "-0.0"
    s = f"{x:.17g}"
    if "e" not in s and "." not in s:
        s += ".0"
    return s


def _encode(obj: Any, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1)) if indent else ""
    end = "\n" + " " * (indent * level) if indent else ""
    sep = "," if indent else ", "
    if obj is None or isinstance(obj, (bool, str)):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj))
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{" + sep.join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        # Leaf lists (numbers only) stay on one line.
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_encode(v, 0, 0) for v in obj) + "]"
        items = [f"{pad}{_encode(v, indent, level + 1)}" for v in obj]
        return "[" + sep.join(items) + end + "]"
    if isinstance(obj, (complex, np.complexfloating)):
        return _encode([float(obj.real), float(obj.imag)], indent, level)
    if isinstance(obj, np.ndarray):
        if obj.ndim == 2:
            return _encode(matrix_to_obj(obj), indent, level)
        return _encode(obj.tolist(), indent, level)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj: Any, indent: int = 2) -> str:
    """JSON text with fixed 17-significant-digit floats; ``inf``/``nan``
    become the strings ``"inf"``/``"nan"``."""
    return _encode(obj, indent, 0) + "\n"
