"""Hot structure-constant kernels, compiled when available.

The Cython build (``_ckernels``) is picked at import time.  Setting
``SOLVPINCH_PURE_PYTHON=1`` forces the numpy fallback, which is also used
automatically when the extension was not built.
"""

import importlib
import os

import numpy as np

from . import _pykernels

_ckernels = None
if os.environ.get("SOLVPINCH_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        _ckernels = importlib.import_module(f"{__name__}._ckernels")
    except ImportError:  # extension not built
        _ckernels = None

_impl = _ckernels if _ckernels is not None else _pykernels
BACKEND = "cython" if _ckernels is not None else "python"


def _prep(c):
    return np.ascontiguousarray(c, dtype=np.float64)


def ricci_operator(c):
    return _impl.ricci_operator(_prep(c))


def act(h, hinv, c):
    return _impl.act(_prep(h), _prep(hinv), _prep(c))


# the compiled triple loop loses to numpy's BLAS contractions above this size
JACOBI_CYTHON_MAX_DIM = 6


def jacobi_residual(c):
    if c.shape[0] == 0:
        return 0.0
    impl = _impl if c.shape[0] <= JACOBI_CYTHON_MAX_DIM else _pykernels
    return float(impl.jacobi_residual(_prep(c)))


def scal_and_norm(c):
    return _impl.scal_and_norm(_prep(c))


def backends():
    """Mapping of available backend name -> kernel module (for tests/benchmarks)."""
    out = {"python": _pykernels}
    if _ckernels is not None:
        out["cython"] = _ckernels
    return out
