"""Kernel backend selection.

The hot numeric primitives (dense matmul variants, softmax, SGD updates)
exist twice: a Cython extension (``_core``) built at install time and a
pure-Python twin (``pure``).  The compiled backend is picked when
importable; set ``MAILCAT_KERNELS=pure`` or ``MAILCAT_KERNELS=compiled``
to force one.  Both produce bit-identical results, so the choice only
affects speed.
"""

from __future__ import annotations

import os

from . import pure as _pure

try:
    from . import _core as _compiled  # type: ignore[attr-defined]
except ImportError:
    _compiled = None

_BACKENDS = {"pure": _pure}
if _compiled is not None:
    _BACKENDS["compiled"] = _compiled


def _initial():
    forced = os.environ.get("MAILCAT_KERNELS")
    if forced:
        if forced not in ("pure", "compiled"):
            raise ValueError(f"MAILCAT_KERNELS must be 'pure' or 'compiled', got {forced!r}")
        if forced == "compiled" and _compiled is None:
            raise ImportError(
                "MAILCAT_KERNELS=compiled but the extension is not built; "
                "run 'pip install -e .' or 'python setup.py build_ext --inplace'"
            )
        return _BACKENDS[forced]
    return _compiled if _compiled is not None else _pure


_active = _initial()


def backend() -> str:
    """Name of the active backend: 'pure' or 'compiled'."""
    return _active.NAME


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def select(name: str) -> str:
    """Switch backends at runtime (used by tests and benchmarks)."""
    global _active
    if name not in _BACKENDS:
        raise ValueError(f"unknown or unavailable kernel backend {name!r}; have {available_backends()}")
    _active = _BACKENDS[name]
    return _active.NAME


def matmul_into(a, b, out, m, k, n):
    _active.matmul_into(a, b, out, m, k, n)


def matmul_tn_into(a, b, out, r, m, n):
    _active.matmul_tn_into(a, b, out, r, m, n)


def matmul_nt_into(a, b, out, m, k, n):
    _active.matmul_nt_into(a, b, out, m, k, n)


def add_row_inplace(z, bias, m, n):
    _active.add_row_inplace(z, bias, m, n)


def relu_inplace(z, size):
    _active.relu_inplace(z, size)


def relu_backward_inplace(delta, activ, size):
    _active.relu_backward_inplace(delta, activ, size)


def softmax_rows_inplace(z, m, n):
    _active.softmax_rows_inplace(z, m, n)


def col_sums_into(a, out, m, n):
    _active.col_sums_into(a, out, m, n)


def axpy_inplace(y, alpha, x, size):
    _active.axpy_inplace(y, alpha, x, size)


def gather_rows_into(src, idx, out, nidx, ncols):
    _active.gather_rows_into(src, idx, out, nidx, ncols)
