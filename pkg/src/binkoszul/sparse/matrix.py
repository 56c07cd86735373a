from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np
import scipy.sparse as sp


@dataclass(frozen=True, eq=False)
class SparseMatrix:
    """Immutable triplet matrix, strictly sorted by (row, col), no stored zeros.

    ``prime`` is the modulus the values are reduced by, or None for exact
    integer/rational entries (object dtype).
    """

    nrows: int
    ncols: int
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray
    prime: Optional[int] = None

    @classmethod
    def from_triplets(cls, nrows, ncols, rows, cols, vals, prime=None) -> "SparseMatrix":
        """Canonicalize arbitrary triplets: reduce, sum duplicates, drop zeros, sort."""
        rows = np.asarray(rows, dtype=np.int64).ravel()
        cols = np.asarray(cols, dtype=np.int64).ravel()
        if prime is None:
            vals = np.asarray(vals, dtype=object).ravel()
        else:
            vals = np.asarray(vals, dtype=object if prime >= (1 << 62) else np.int64).ravel()
        if not (len(rows) == len(cols) == len(vals)):
            raise ValueError("triplet arrays differ in length")
        if len(rows):
            if rows.min() < 0 or rows.max() >= nrows or cols.min() < 0 or cols.max() >= ncols:
                raise IndexError("triplet index out of range")
        order = np.lexsort((cols, rows))
        rows, cols, vals = rows[order], cols[order], vals[order]
        if len(rows) > 1:
            dup = (rows[1:] == rows[:-1]) & (cols[1:] == cols[:-1])
            if dup.any():
                starts = np.flatnonzero(np.concatenate(([True], ~dup)))
                if vals.dtype == object:
                    vals = np.array([sum(vals[s:e]) for s, e in zip(starts, list(starts[1:]) + [len(vals)])],
                                    dtype=object)
                else:
                    vals = np.add.reduceat(vals % prime if prime else vals, starts)
                rows, cols = rows[starts], cols[starts]
        if prime is not None:
            vals = vals % prime
        keep = vals != 0
        if vals.dtype == object:
            keep = np.array([v != 0 for v in vals], dtype=bool)
        return cls(int(nrows), int(ncols), rows[keep], cols[keep], vals[keep], prime)

    @classmethod
    def from_dense(cls, arr, prime=None) -> "SparseMatrix":
        arr = np.asarray(arr, dtype=object)
        r, c = np.nonzero(arr != 0) if arr.size else (np.array([], int), np.array([], int))
        return cls.from_triplets(arr.shape[0], arr.shape[1], r, c, arr[r, c], prime)

    @classmethod
    def identity(cls, n, prime=None) -> "SparseMatrix":
        idx = np.arange(n)
        return cls.from_triplets(n, n, idx, idx, np.ones(n, dtype=np.int64), prime)

    @classmethod
    def zeros(cls, nrows, ncols, prime=None) -> "SparseMatrix":
        e = np.array([], dtype=np.int64)
        return cls.from_triplets(nrows, ncols, e, e, e, prime)

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    @property
    def nnz(self) -> int:
        return len(self.vals)

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (self.shape == other.shape and np.array_equal(self.rows, other.rows)
                and np.array_equal(self.cols, other.cols)
                and all(int(a) == int(b) if not isinstance(a, Fraction) else a == b
                        for a, b in zip(self.vals, other.vals)))

    def __repr__(self):
        return f"SparseMatrix({self.nrows}x{self.ncols}, nnz={self.nnz}, prime={self.prime})"

    def triplets(self):
        return zip(self.rows.tolist(), self.cols.tolist(), self.vals.tolist())

    def reduce(self, prime: int) -> "SparseMatrix":
        """Reduce an exact integer/rational matrix modulo ``prime``."""
        from ..algebra import GF
        F = GF(prime)
        vals = np.array([F(v) for v in self.vals], dtype=np.int64)
        return SparseMatrix.from_triplets(self.nrows, self.ncols, self.rows, self.cols, vals, prime)

    def to_csr(self, dtype=np.float64) -> sp.csr_matrix:
        if self.vals.dtype == object:
            raise TypeError("exact matrices have no scipy form")
        return sp.csr_matrix((self.vals.astype(dtype), (self.rows, self.cols)), shape=self.shape)

    def to_dense(self) -> np.ndarray:
        dtype = object if self.vals.dtype == object else np.int64
        out = np.zeros(self.shape, dtype=dtype)
        if dtype is object:
            out[:] = 0
        out[self.rows, self.cols] = self.vals
        return out

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix.from_triplets(self.ncols, self.nrows, self.cols, self.rows, self.vals, self.prime)

    def select_columns(self, cols) -> "SparseMatrix":
        """Submatrix on the given columns (renumbered in the given order)."""
        cols = np.asarray(cols, dtype=np.int64)
        pos = np.full(self.ncols, -1, dtype=np.int64)
        pos[cols] = np.arange(len(cols))
        new = pos[self.cols]
        keep = new >= 0
        return SparseMatrix.from_triplets(self.nrows, len(cols), self.rows[keep], new[keep],
                                          self.vals[keep], self.prime)

    def select_rows(self, rows) -> "SparseMatrix":
        rows = np.asarray(rows, dtype=np.int64)
        pos = np.full(self.nrows, -1, dtype=np.int64)
        pos[rows] = np.arange(len(rows))
        new = pos[self.rows]
        keep = new >= 0
        return SparseMatrix.from_triplets(len(rows), self.ncols, new[keep], self.cols[keep],
                                          self.vals[keep], self.prime)

    def column_nnz(self) -> np.ndarray:
        return np.bincount(self.cols, minlength=self.ncols)

    def row_nnz(self) -> np.ndarray:
        return np.bincount(self.rows, minlength=self.nrows)
