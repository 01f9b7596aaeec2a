"""Small dense row-major matrix on a flat array('d') buffer.

This is the data carrier for the neural network; all heavy arithmetic is
delegated to the active kernel backend (see :mod:`mailcat.kernels`).
"""

from __future__ import annotations

import math
from array import array
from typing import Iterable, Sequence

from . import kernels
from .errors import ShapeError


class Matrix:
    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: array | None = None):
        if rows < 0 or cols < 0:
            raise ShapeError(f"negative dimensions ({rows}, {cols})")
        if data is None:
            data = array("d", bytes(8 * rows * cols))
        elif len(data) != rows * cols:
            raise ShapeError(f"buffer of {len(data)} values cannot be {rows}x{cols}")
        self.rows = rows
        self.cols = cols
        self.data = data

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[float]]) -> "Matrix":
        n_rows = len(rows)
        n_cols = len(rows[0]) if n_rows else 0
        buf = array("d")
        for row in rows:
            if len(row) != n_cols:
                raise ShapeError("ragged rows")
            buf.extend(row)
        return cls(n_rows, n_cols, buf)

    def to_rows(self) -> list[list[float]]:
        n = self.cols
        return [list(self.data[i * n : (i + 1) * n]) for i in range(self.rows)]

    def copy(self) -> "Matrix":
        return Matrix(self.rows, self.cols, array("d", self.data))

    def get(self, i: int, j: int) -> float:
        return self.data[i * self.cols + j]

    def set(self, i: int, j: int, value: float) -> None:
        self.data[i * self.cols + j] = value

    def row(self, i: int) -> list[float]:
        n = self.cols
        return list(self.data[i * n : (i + 1) * n])

    def all_finite(self) -> bool:
        isfinite = math.isfinite
        return all(isfinite(v) for v in self.data)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Matrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.data == other.data
        )

    def __repr__(self) -> str:
        return f"Matrix({self.rows}x{self.cols})"


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if a.cols != b.rows:
        raise ShapeError(f"matmul shape mismatch: {a.cols} vs {b.rows}")
    out = Matrix(a.rows, b.cols)
    kernels.matmul_into(a.data, b.data, out.data, a.rows, a.cols, b.cols)
    return out


def matmul_tn(a: Matrix, b: Matrix) -> Matrix:
    """a^T . b for a: r x m, b: r x n."""
    if a.rows != b.rows:
        raise ShapeError(f"matmul_tn shape mismatch: {a.rows} vs {b.rows}")
    out = Matrix(a.cols, b.cols)
    kernels.matmul_tn_into(a.data, b.data, out.data, a.rows, a.cols, b.cols)
    return out


def matmul_nt(a: Matrix, b: Matrix) -> Matrix:
    """a . b^T for a: m x k, b: n x k."""
    if a.cols != b.cols:
        raise ShapeError(f"matmul_nt shape mismatch: {a.cols} vs {b.cols}")
    out = Matrix(a.rows, b.rows)
    kernels.matmul_nt_into(a.data, b.data, out.data, a.rows, a.cols, b.rows)
    return out


def add_row_inplace(m: Matrix, bias: array) -> None:
    if len(bias) != m.cols:
        raise ShapeError(f"bias of {len(bias)} vs {m.cols} columns")
    kernels.add_row_inplace(m.data, bias, m.rows, m.cols)


def relu_inplace(m: Matrix) -> None:
    kernels.relu_inplace(m.data, m.rows * m.cols)


def relu_backward_inplace(delta: Matrix, activ: Matrix) -> None:
    if (delta.rows, delta.cols) != (activ.rows, activ.cols):
        raise ShapeError("relu backward shape mismatch")
    kernels.relu_backward_inplace(delta.data, activ.data, delta.rows * delta.cols)


def softmax_rows_inplace(m: Matrix) -> None:
    kernels.softmax_rows_inplace(m.data, m.rows, m.cols)


def col_sums(m: Matrix) -> array:
    out = array("d", bytes(8 * m.cols))
    kernels.col_sums_into(m.data, out, m.rows, m.cols)
    return out


def axpy_inplace(y: array, alpha: float, x: array) -> None:
    if len(y) != len(x):
        raise ShapeError("axpy length mismatch")
    kernels.axpy_inplace(y, alpha, x, len(y))


def gather_rows(src: Matrix, indices: Iterable[int]) -> Matrix:
    idx = array("q", indices)
    out = Matrix(len(idx), src.cols)
    kernels.gather_rows_into(src.data, idx, out.data, len(idx), src.cols)
    return out
