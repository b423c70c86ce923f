"""JSON and CSV formats.

Bracket:  {"dim": n, "entries": [[i, j, k, value], ...], "tol": optional}
          1-based indices, mu(e_i, e_j) has ``value`` as e_k component;
          the (j, i) entry is filled in antisymmetrically.
Matrix:   {"n": n, "A": [[...], ...]} with n = rows + 1 (ambient dimension),
          or a bare nested list.
Family:   {"family": "c_t", "t": 0.5}
Flow:     {"step": .., "max_iter": .., "grad_tol": .., "seed": .., "normalization": ..}
"""

from __future__ import annotations

import json
import math

import numpy as np

from .almost_abelian import FAMILIES, AAData
from .errors import MalformedInputError
from .lie_core import DEFAULT_TOL, MetricLieAlgebra
from .soliton_search import FlowConfig


def load_json_arg(arg: str):
    """Parse inline JSON (leading '[' or '{') or read a JSON file."""
    text = arg.lstrip()
    try:
        if text.startswith(("[", "{")):
            return json.loads(text)
        with open(arg, encoding="utf-8") as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise MalformedInputError(f"invalid JSON: {exc}") from None
    except OSError as exc:
        raise MalformedInputError(f"cannot read {arg!r}: {exc.strerror}") from None


def _real(x, what):
    if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
        raise MalformedInputError(f"{what} must be a finite number, got {x!r}")
    return float(x)


def _index(x, dim, what):
    if isinstance(x, bool) or not isinstance(x, int) or not 1 <= x <= dim:
        raise MalformedInputError(f"{what} must be an integer in 1..{dim}, got {x!r}")
    return x - 1


def parse_bracket(obj, tol: float | None = None) -> MetricLieAlgebra:
    if not isinstance(obj, dict) or "dim" not in obj or "entries" not in obj:
        raise MalformedInputError('bracket JSON needs "dim" and "entries"')
    extra = set(obj) - {"dim", "entries", "tol"}
    if extra:
        raise MalformedInputError(f"unknown bracket keys: {sorted(extra)}")
    dim = obj["dim"]
    if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
        raise MalformedInputError(f'"dim" must be a positive integer, got {dim!r}')
    if "tol" in obj:
        tol = _real(obj["tol"], '"tol"')
    tol = DEFAULT_TOL if tol is None else tol
    if not tol > 0:
        raise MalformedInputError('"tol" must be positive')
    if not isinstance(obj["entries"], list):
        raise MalformedInputError('"entries" must be a list')
    entries = []
    for e in obj["entries"]:
        if not isinstance(e, list) or len(e) != 4:
            raise MalformedInputError(f"entry must be [i, j, k, value], got {e!r}")
        i, j, k = (_index(x, dim, "index") for x in e[:3])
        entries.append((i, j, k, _real(e[3], "value")))
    return MetricLieAlgebra.from_entries(dim, entries, tol)


def bracket_to_json(mu: MetricLieAlgebra) -> dict:
    n = mu.dim
    entries = [
        [i + 1, j + 1, k + 1, float(mu.c[i, j, k])]
        for i in range(n)
        for j in range(i + 1, n)
        for k in range(n)
        if mu.c[i, j, k] != 0.0
    ]
    return {"dim": n, "entries": entries, "tol": mu.tol}


def parse_matrix(obj, tol: float = DEFAULT_TOL) -> AAData:
    if isinstance(obj, dict):
        extra = set(obj) - {"n", "A"}
        if "A" not in obj or extra:
            raise MalformedInputError('matrix JSON needs "A" (and optionally "n") only')
        rows = obj["A"]
    else:
        rows = obj
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise MalformedInputError("matrix must be a non-empty list of rows")
    m = len(rows)
    if any(len(r) != m for r in rows):
        raise MalformedInputError("matrix must be square")
    A = np.array([[_real(x, "matrix entry") for x in r] for r in rows])
    if isinstance(obj, dict) and "n" in obj and obj["n"] != m + 1:
        raise MalformedInputError(f'"n" = {obj["n"]!r} must equal rows + 1 = {m + 1}')
    return AAData(A, tol)


def matrix_to_json(A) -> dict:
    A = np.asarray(A, dtype=float)
    return {"n": A.shape[0] + 1, "A": A.tolist()}


def parse_family_request(obj):
    if not isinstance(obj, dict) or set(obj) != {"family", "t"}:
        raise MalformedInputError('family request must be {"family": name, "t": value}')
    if obj["family"] not in FAMILIES:
        raise MalformedInputError(f"unknown family {obj['family']!r}")
    return obj["family"], _real(obj["t"], '"t"')


_FLOW_KEYS = {"step", "max_iter", "grad_tol", "seed", "normalization"}


def parse_flow_config(obj, **overrides) -> FlowConfig:
    if not isinstance(obj, dict):
        raise MalformedInputError("flow config must be a JSON object")
    extra = set(obj) - _FLOW_KEYS
    if extra:
        raise MalformedInputError(f"unknown flow config keys: {sorted(extra)}")
    kw = dict(obj)
    kw.update({k: v for k, v in overrides.items() if v is not None})
    for key in ("max_iter", "seed"):
        if key in kw and (isinstance(kw[key], bool) or not isinstance(kw[key], int)):
            raise MalformedInputError(f"{key} must be an integer")
    for key in ("step", "grad_tol"):
        if key in kw:
            kw[key] = _real(kw[key], key)
    return FlowConfig(**kw)


def fmt_csv(x) -> str:
    """17 significant digits: enough to round-trip any double."""
    return format(float(x), ".17g")


def fmt_table(x) -> str:
    return format(float(x), ".6g")
