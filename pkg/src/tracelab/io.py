"""JSON wire formats.

Matrices are ``{"dim": n, "entries": [[re, im], ...]}`` in row-major order,
with every real written as a decimal string (``repr`` of the double) so that
parse(serialize(M)) reproduces ``M`` bit for bit.
"""
import json

import numpy as np


class SchemaError(ValueError):
    """A JSON document does not follow the expected schema."""


def _num(x):
    x = float(x)
    if not np.isfinite(x):
        raise SchemaError("non-finite value cannot be serialized")
    return repr(x)


def _parse_num(v):
    if isinstance(v, bool) or not isinstance(v, (str, int, float)):
        raise SchemaError(f"expected a decimal string, got {v!r}")
    try:
        x = float(v)
    except ValueError as exc:
        raise SchemaError(f"bad number {v!r}") from exc
    if not np.isfinite(x):
        raise SchemaError(f"non-finite number {v!r}")
    return x


def matrix_to_json(M):
    M = np.asarray(M, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise SchemaError("only square matrices are serialized")
    return {
        "dim": int(M.shape[0]),
        "entries": [[_num(z.real), _num(z.imag)] for z in M.ravel()],
    }


def matrix_from_json(obj):
    if not isinstance(obj, dict) or set(obj) != {"dim", "entries"}:
        raise SchemaError("matrix must be an object with exactly 'dim' and 'entries'")
    n = obj["dim"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise SchemaError("'dim' must be a positive integer")
    entries = obj["entries"]
    if not isinstance(entries, list) or len(entries) != n * n:
        raise SchemaError(f"'entries' must hold {n * n} [re, im] pairs")
    out = np.empty(n * n, dtype=np.complex128)
    for k, pair in enumerate(entries):
        if not isinstance(pair, list) or len(pair) != 2:
            raise SchemaError("each entry must be a [re, im] pair")
        out[k] = complex(_parse_num(pair[0]), _parse_num(pair[1]))
    return out.reshape(n, n)


def measure_from_json(obj):
    from .metrics.functions import AtomicMeasure

    try:
        return AtomicMeasure(float(obj["c"]), [(float(t), float(w)) for t, w in obj["atoms"]])
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad measure: {exc}") from exc


def measure_to_json(mu):
    return {"c": mu.c, "atoms": [[t, w] for t, w in mu.atoms]}


def to_jsonable(obj):
    """Recursively convert numpy scalars/arrays so ``json.dumps`` accepts them."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        if obj.ndim == 2 and obj.shape[0] == obj.shape[1]:
            return matrix_to_json(obj)
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return [float(obj.real), float(obj.imag)]
    return obj


def dumps(obj):
    """Canonical JSON text: sorted keys, fixed separators, trailing newline."""
    return json.dumps(to_jsonable(obj), sort_keys=True, indent=2, allow_nan=True) + "\n"
