"""Pencil JSON and trajectory CSV formats.

Pencil files look like ``{"n": 2, "m0": [[1, 0], [0, 0]], "m1": ...}`` where
each entry is either a real number or a ``[re, im]`` pair.
"""

import io
import json

import numpy as np

from .errors import ParseError
from .pencil import Pencil

__all__ = [
    "parse_pencil",
    "load_pencil",
    "pencil_to_json",
    "complex_list",
    "trajectory_csv",
    "json_dumps",
]


def _entry(x, where):
    if isinstance(x, bool):
        raise ParseError(f"{where}: booleans are not matrix entries")
    if isinstance(x, (int, float)):
        return complex(float(x), 0.0)
    if isinstance(x, list) and len(x) == 2 and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in x):
        return complex(float(x[0]), float(x[1]))
    raise ParseError(f"{where}: expected a number or a [re, im] pair, got {x!r}")


def _matrix(obj, field, n):
    if field not in obj:
        raise ParseError(f"missing field {field!r}")
    rows = obj[field]
    if not isinstance(rows, list) or len(rows) != n:
        got = len(rows) if isinstance(rows, list) else type(rows).__name__
        raise ParseError(f"field {field!r}: expected {n} rows, got {got}")
    out = np.empty((n, n), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            got = len(row) if isinstance(row, list) else type(row).__name__
            raise ParseError(f"field {field!r}, row {i}: expected {n} entries, got {got}")
        for j, x in enumerate(row):
            out[i, j] = _entry(x, f"field {field!r}, entry [{i}][{j}]")
    if not np.all(np.isfinite(out)):
        raise ParseError(f"field {field!r}: non-finite entries")
    return out


def parse_pencil(text):
    """Parse pencil JSON text; errors carry the line or field at fault."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(obj, dict):
        raise ParseError("top level must be an object with fields n, m0, m1")
    n = obj.get("n")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ParseError(f"field 'n': expected a positive integer, got {n!r}")
    return Pencil(_matrix(obj, "m0", n), _matrix(obj, "m1", n))


def load_pencil(path):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    return parse_pencil(text)


def complex_list(a):
    """Nested ``[re, im]`` lists for a complex array of any shape."""
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return [float(a.real), float(a.imag)]
    return [complex_list(x) for x in a]


def pencil_to_json(p):
    return json_dumps({"n": p.n, "m0": complex_list(p.m0), "m1": complex_list(p.m1)})


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj) + 0.0  # drops the sign of -0.0
        # JSON has no infinities or NaN
        return v if np.isfinite(v) else None
    if isinstance(obj, complex):
        return [_clean(obj.real), _clean(obj.imag)]
    return obj


def json_dumps(obj):
    """Deterministic JSON: sorted keys, non-finite floats become null."""
    return json.dumps(_clean(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def trajectory_csv(traj):
    """CSV with header ``t,re(u_1),im(u_1),...`` and 17 significant digits."""
    n = traj.n
    header = ["t"] + [f"{part}(u_{k + 1})" for k in range(n) for part in ("re", "im")]
    table = np.empty((len(traj.times), 1 + 2 * n))
    table[:, 0] = traj.times
    table[:, 1::2] = traj.states.real
    table[:, 2::2] = traj.states.imag
    table += 0.0
    buf = io.StringIO()
    np.savetxt(buf, table, fmt="%.17g", delimiter=",", header=",".join(header), comments="")
    return buf.getvalue()
