# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend.

Mirror of ``pure.py``: identical signatures, identical per-element
floating-point accumulation order (ascending reduction index from 0.0),
so results are bit-identical to the pure backend.  Loop nests differ only
where reordering does not change any single element's operation sequence
(e.g. i-k-j matmul still adds terms to out[i,j] in ascending k).

Compile with -ffp-contract=off; FMA contraction would change rounding.
"""

from libc.math cimport exp

NAME = "compiled"


def matmul_into(double[::1] a, double[::1] b, double[::1] out,
                Py_ssize_t m, Py_ssize_t k, Py_ssize_t n):
    """out[m,n] = a[m,k] . b[k,n]"""
    cdef Py_ssize_t i, j, p
    cdef double aval
    for i in range(m):
        for j in range(n):
            out[i * n + j] = 0.0
        for p in range(k):
            aval = a[i * k + p]
            for j in range(n):
                out[i * n + j] += aval * b[p * n + j]


def matmul_tn_into(double[::1] a, double[::1] b, double[::1] out,
                   Py_ssize_t r, Py_ssize_t m, Py_ssize_t n):
    """out[m,n] = a^T . b where a is r x m and b is r x n."""
    cdef Py_ssize_t i, j, p
    cdef double aval
    for i in range(m * n):
        out[i] = 0.0
    for p in range(r):
        for i in range(m):
            aval = a[p * m + i]
            for j in range(n):
                out[i * n + j] += aval * b[p * n + j]


def matmul_nt_into(double[::1] a, double[::1] b, double[::1] out,
                   Py_ssize_t m, Py_ssize_t k, Py_ssize_t n):
    """out[m,n] = a . b^T where a is m x k and b is n x k."""
    cdef Py_ssize_t i, j, p
    cdef double s
    for i in range(m):
        for j in range(n):
            s = 0.0
            for p in range(k):
                s += a[i * k + p] * b[j * k + p]
            out[i * n + j] = s


def add_row_inplace(double[::1] z, double[::1] bias, Py_ssize_t m, Py_ssize_t n):
    cdef Py_ssize_t i, j
    for i in range(m):
        for j in range(n):
            z[i * n + j] += bias[j]


def relu_inplace(double[::1] z, Py_ssize_t size):
    cdef Py_ssize_t i
    for i in range(size):
        if z[i] < 0.0:
            z[i] = 0.0


def relu_backward_inplace(double[::1] delta, double[::1] activ, Py_ssize_t size):
    cdef Py_ssize_t i
    for i in range(size):
        if activ[i] <= 0.0:
            delta[i] = 0.0


def softmax_rows_inplace(double[::1] z, Py_ssize_t m, Py_ssize_t n):
    cdef Py_ssize_t i, j, base
    cdef double hi, total, e
    for i in range(m):
        base = i * n
        hi = z[base]
        for j in range(1, n):
            if z[base + j] > hi:
                hi = z[base + j]
        total = 0.0
        for j in range(n):
            e = exp(z[base + j] - hi)
            z[base + j] = e
            total += e
        for j in range(n):
            z[base + j] /= total


def col_sums_into(double[::1] a, double[::1] out, Py_ssize_t m, Py_ssize_t n):
    cdef Py_ssize_t i, j
    for j in range(n):
        out[j] = 0.0
    for i in range(m):
        for j in range(n):
            out[j] += a[i * n + j]


def axpy_inplace(double[::1] y, double alpha, double[::1] x, Py_ssize_t size):
    cdef Py_ssize_t i
    for i in range(size):
        y[i] += alpha * x[i]


def gather_rows_into(double[::1] src, long long[::1] idx, double[::1] out,
                     Py_ssize_t nidx, Py_ssize_t ncols):
    cdef Py_ssize_t i, j, srow, orow
    for i in range(nidx):
        srow = <Py_ssize_t> idx[i] * ncols
        orow = i * ncols
        for j in range(ncols):
            out[orow + j] = src[srow + j]
