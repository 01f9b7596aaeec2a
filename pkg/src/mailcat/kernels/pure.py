"""Pure-Python kernel backend.

Each function here has a compiled twin in ``_core.pyx``.  The two backends
must stay bit-identical: for every output element the floating-point
operations run in the same order (ascending reduction index, starting from
0.0), so either backend can check the other.  Keep loop orders in sync with
the .pyx file when touching anything below.

Buffers are flat row-major ``array('d')`` objects; shapes are passed
explicitly.
"""

from __future__ import annotations

import math
from array import array

NAME = "pure"


def matmul_into(a: array, b: array, out: array, m: int, k: int, n: int) -> None:
    """out[m,n] = a[m,k] . b[k,n]"""
    for i in range(m):
        arow = i * k
        for j in range(n):
            s = 0.0
            for p in range(k):
                s += a[arow + p] * b[p * n + j]
            out[i * n + j] = s


def matmul_tn_into(a: array, b: array, out: array, r: int, m: int, n: int) -> None:
    """out[m,n] = a^T . b where a is r x m and b is r x n."""
    for i in range(m):
        for j in range(n):
            s = 0.0
            for p in range(r):
                s += a[p * m + i] * b[p * n + j]
            out[i * n + j] = s


def matmul_nt_into(a: array, b: array, out: array, m: int, k: int, n: int) -> None:
    """out[m,n] = a . b^T where a is m x k and b is n x k."""
    for i in range(m):
        arow = i * k
        for j in range(n):
            brow = j * k
            s = 0.0
            for p in range(k):
                s += a[arow + p] * b[brow + p]
            out[i * n + j] = s


def add_row_inplace(z: array, bias: array, m: int, n: int) -> None:
    for i in range(m):
        base = i * n
        for j in range(n):
            z[base + j] += bias[j]


def relu_inplace(z: array, size: int) -> None:
    for i in range(size):
        if z[i] < 0.0:
            z[i] = 0.0


def relu_backward_inplace(delta: array, activ: array, size: int) -> None:
    # Subgradient at 0 is 0: activation 0 masks the delta.
    for i in range(size):
        if activ[i] <= 0.0:
            delta[i] = 0.0


def softmax_rows_inplace(z: array, m: int, n: int) -> None:
    exp = math.exp
    for i in range(m):
        base = i * n
        hi = z[base]
        for j in range(1, n):
            v = z[base + j]
            if v > hi:
                hi = v
        total = 0.0
        for j in range(n):
            e = exp(z[base + j] - hi)
            z[base + j] = e
            total += e
        for j in range(n):
            z[base + j] /= total


def col_sums_into(a: array, out: array, m: int, n: int) -> None:
    for j in range(n):
        out[j] = 0.0
    for j in range(n):
        s = 0.0
        for i in range(m):
            s += a[i * n + j]
        out[j] = s


def axpy_inplace(y: array, alpha: float, x: array, size: int) -> None:
    """y += alpha * x, elementwise."""
    for i in range(size):
        y[i] += alpha * x[i]


def gather_rows_into(src: array, idx: array, out: array, nidx: int, ncols: int) -> None:
    for i in range(nidx):
        srow = idx[i] * ncols
        orow = i * ncols
        for j in range(ncols):
            out[orow + j] = src[srow + j]
