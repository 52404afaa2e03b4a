"""Minimal CSR matrix container shared by the graph and kernel code.

Index arrays are int32 (node counts here stay far below 2**31) and the
optional value array is float32 or float64. ``data is None`` means an
implicit all-ones (binary) matrix, which is how plain adjacencies are
stored.
"""

from __future__ import annotations

import numpy as np

from .errors import ShapeMismatch

INDEX_DTYPE = np.int32


class CSRMatrix:
    """Immutable compressed-sparse-row matrix.

    Attributes
    ----------
    shape : (int, int)
    indptr : int32 array, length rows+1
    indices : int32 array, column index per stored entry, sorted per row
    data : float array per stored entry, or None for a binary matrix
    """

    __slots__ = ("shape", "indptr", "indices", "data", "_transpose")

    def __init__(self, shape, indptr, indices, data=None):
        self.shape = (int(shape[0]), int(shape[1]))
        self.indptr = np.ascontiguousarray(indptr, dtype=INDEX_DTYPE)
        self.indices = np.ascontiguousarray(indices, dtype=INDEX_DTYPE)
        self.data = None if data is None else np.ascontiguousarray(data)
        self._transpose = None
        if self.indptr.shape != (self.shape[0] + 1,):
            raise ShapeMismatch("indptr length does not match row count")
        if self.data is not None and self.data.shape != self.indices.shape:
            raise ShapeMismatch("data and indices lengths differ")

    @property
    def nnz(self) -> int:
        return int(self.indices.shape[0])

    def row(self, i: int) -> np.ndarray:
        """Column indices of row i."""
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    def row_degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def coo(self) -> tuple[np.ndarray, np.ndarray]:
        """(row, col) arrays of all stored entries, row-major order."""
        rows = np.repeat(
            np.arange(self.shape[0], dtype=INDEX_DTYPE), self.row_degrees()
        )
        return rows, self.indices.copy()

    def values(self, dtype=np.float64) -> np.ndarray:
        if self.data is None:
            return np.ones(self.nnz, dtype=dtype)
        return self.data.astype(dtype, copy=False)

    def astype(self, dtype) -> "CSRMatrix":
        if self.data is None:
            return self
        return CSRMatrix(self.shape, self.indptr, self.indices, self.data.astype(dtype))

    def transpose(self) -> "CSRMatrix":
        """Transposed copy (cached); rows of the result are sorted."""
        if self._transpose is None:
            rows, cols = self.coo()
            order = np.lexsort((rows, cols))
            t_indptr = np.zeros(self.shape[1] + 1, dtype=np.int64)
            counts = np.bincount(cols, minlength=self.shape[1])
            t_indptr[1:] = np.cumsum(counts)
            data = None if self.data is None else self.data[order]
            self._transpose = CSRMatrix(
                (self.shape[1], self.shape[0]), t_indptr, rows[order], data
            )
        return self._transpose

    def to_dense(self, dtype=np.float64) -> np.ndarray:
        out = np.zeros(self.shape, dtype=dtype)
        rows, cols = self.coo()
        out[rows, cols] = self.values(dtype)
        return out

    def is_symmetric(self) -> bool:
        if self.shape[0] != self.shape[1]:
            return False
        t = self.transpose()
        if not (
            np.array_equal(t.indptr, self.indptr)
            and np.array_equal(t.indices, self.indices)
        ):
            return False
        if self.data is None:
            return True
        return bool(np.array_equal(t.data, self.data))


def csr_from_coo(shape, rows, cols, data=None) -> CSRMatrix:
    """Build a CSR matrix from unsorted coordinate arrays (no duplicates)."""
    rows = np.asarray(rows, dtype=np.int64)
    cols = np.asarray(cols, dtype=np.int64)
    order = np.lexsort((cols, rows))
    rows = rows[order]
    cols = cols[order]
    indptr = np.zeros(shape[0] + 1, dtype=np.int64)
    indptr[1:] = np.cumsum(np.bincount(rows, minlength=shape[0]))
    return CSRMatrix(shape, indptr, cols, None if data is None else np.asarray(data)[order])


def csr_from_dense(x: np.ndarray) -> CSRMatrix:
    """CSR copy of a dense matrix, dropping exact zeros."""
    rows, cols = np.nonzero(x)
    return csr_from_coo(x.shape, rows, cols, x[rows, cols])


def mask_csr_columns(x: CSRMatrix, kept: np.ndarray) -> CSRMatrix:
    """Drop all entries whose column is masked out (kept[col] is False)."""
    keep = kept[x.indices]
    rows, _ = x.coo()
    rows = rows[keep]
    indptr = np.zeros(x.shape[0] + 1, dtype=np.int64)
    indptr[1:] = np.cumsum(np.bincount(rows, minlength=x.shape[0]))
    data = None if x.data is None else x.data[keep]
    return CSRMatrix(x.shape, indptr, x.indices[keep], data)
