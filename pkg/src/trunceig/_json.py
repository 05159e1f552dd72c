"""Deterministic JSON rendering with a fixed number of significant digits.

The stdlib encoder renders floats with repr(), whose digit count varies by
value.  File outputs here must be byte-stable across runs and carry enough
digits to round-trip doubles exactly, so floats are always rendered with
"%.17g".
"""

from __future__ import annotations

import math

import numpy as np


def format_float(x: float, digits: int = 17) -> str:
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        raise ValueError("non-finite value cannot be serialized")
    return f"{x:.{digits}g}"


def _render(obj, digits: int, indent: int, level: int) -> str:
    pad = " " * (indent * level)
    pad_in = " " * (indent * (level + 1))
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = []
        for key, val in obj.items():
            if not isinstance(key, str):
                raise TypeError("JSON object keys must be strings")
            items.append(f'{pad_in}"{key}": {_render(val, digits, indent, level + 1)}')
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{pad_in}{_render(v, digits, indent, level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, bool) or isinstance(obj, np.bool_):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(obj, digits)
    if isinstance(obj, str):
        out = obj.replace("\\", "\\\\").replace('"', '\\"')
        out = out.replace("\n", "\\n").replace("\r", "\\r").replace("\t", "\\t")
        return f'"{out}"'
    raise TypeError(f"cannot serialize object of type {type(obj).__name__}")


def dumps(obj, digits: int = 17, indent: int = 2) -> str:
    """Render obj (dicts, sequences, scalars) to a deterministic JSON string."""
    return _render(obj, digits, indent, 0) + "\n"
