"""Exact products modulo p on top of float64 BLAS / scipy.

Operands hold residues in [0, p).  A float64 dot product of length k is
exact while k * (p-1)**2 < 2**53, so the inner dimension is chunked to
that length.  Primes up to 2**32 are handled by splitting both operands
into 16-bit limbs; anything larger falls back to Python integers.
"""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp

_EXACT = float(1 << 53)
_LIMB = 1 << 16


def safe_inner(p: int) -> int:
    """Largest inner dimension for which a float64 dot product of residues is exact."""
    return int((_EXACT - p) // ((p - 1) ** 2))


def _dense_mod(X, Y, p):
    k = X.shape[1]
    step = safe_inner(p)
    if step >= k:
        return np.fmod(X @ Y, p)
    acc = np.zeros((X.shape[0], Y.shape[1]))
    for s in range(0, k, step):
        acc += np.fmod(X[:, s:s + step] @ Y[s:s + step], p)
        np.fmod(acc, p, out=acc)
    return acc


def _split(X):
    hi = np.floor(X / _LIMB)
    return hi, X - hi * _LIMB


def _limb_combine(hh, hl, lh, ll, p):
    # value = hh*2^32 + (hl+lh)*2^16 + ll, each partial already reduced mod p
    # with p < 2^32 every intermediate stays below 2^53
    sh = float(_LIMB % p)
    mid = np.fmod(hh * sh, p)
    mid = np.fmod(mid + hl + lh, p)
    mid = np.fmod(mid * sh, p)
    return np.fmod(mid + ll, p)


def _limb_dense(X, Y, p):
    k = X.shape[1]
    # limbs < 2^16: products < 2^32, so 2^21 terms are safe
    step = 1 << 20
    Xh, Xl = _split(X)
    Yh, Yl = _split(Y)
    parts = []
    for A, B in ((Xh, Yh), (Xh, Yl), (Xl, Yh), (Xl, Yl)):
        acc = np.zeros((X.shape[0], Y.shape[1]))
        for s in range(0, k, step):
            acc += np.fmod(A[:, s:s + step] @ B[s:s + step], p)
        parts.append(np.fmod(acc, p))
    return _limb_combine(*parts, p)


def matmul_mod(X: np.ndarray, Y: np.ndarray, p: int) -> np.ndarray:
    """(X @ Y) mod p for dense residue arrays; returns float64 (or object for huge p)."""
    if X.shape[1] == 0:
        return np.zeros((X.shape[0], Y.shape[1]))
    if p < (1 << 26):
        return _dense_mod(np.asarray(X, dtype=np.float64), np.asarray(Y, dtype=np.float64), p)
    if p < (1 << 32):
        return _limb_dense(np.asarray(X, dtype=np.float64), np.asarray(Y, dtype=np.float64), p)
    Xo = np.asarray(X, dtype=object)
    Yo = np.asarray(Y, dtype=object)
    return (Xo @ Yo) % p


def _row_nnz_max(A) -> int:
    A = A.tocsr()
    return int(np.diff(A.indptr).max()) if A.shape[0] else 0


class ModOperator:
    """Sparse residue matrix with exact ``A @ x mod p`` and ``A.T @ x mod p``."""

    def __init__(self, csr: sp.csr_matrix, p: int):
        self.p = p
        self.shape = csr.shape
        self.A = csr.astype(np.float64).tocsr()
        self.AT = self.A.T.tocsr()
        widest = max(_row_nnz_max(self.A), _row_nnz_max(self.AT), 1)
        if p >= (1 << 32):
            self.mode = "object"
            self._Ao = csr.tocoo()
        elif widest * (p - 1) ** 2 < _EXACT:
            self.mode = "float"
        else:
            self.mode = "limb"
            self.Ah, self.Al = self._split_sparse(self.A)
            self.ATh, self.ATl = self.Ah.T.tocsr(), self.Al.T.tocsr()

    @staticmethod
    def _split_sparse(A):
        hi = A.copy()
        hi.data = np.floor(A.data / _LIMB)
        lo = A.copy()
        lo.data = A.data - hi.data * _LIMB
        return hi, lo

    def _apply(self, M, Mh, Ml, x, transpose):
        p = self.p
        if self.mode == "float":
            return np.fmod(M @ x, p)
        if self.mode == "limb":
            xh, xl = _split(x)
            return _limb_combine(np.fmod(Mh @ xh, p), np.fmod(Mh @ xl, p),
                                 np.fmod(Ml @ xh, p), np.fmod(Ml @ xl, p), p)
        coo = self._Ao
        rows, cols = (coo.col, coo.row) if transpose else (coo.row, coo.col)
        out = [0] * (self.shape[1] if transpose else self.shape[0])
        for r, c, v in zip(rows.tolist(), cols.tolist(), coo.data.tolist()):
            out[r] += int(v) * int(x[c])
        return np.array([o % p for o in out], dtype=object)

    def matvec(self, x):
        return self._apply(self.A, getattr(self, "Ah", None), getattr(self, "Al", None), x, False)

    def rmatvec(self, x):
        return self._apply(self.AT, getattr(self, "ATh", None), getattr(self, "ATl", None), x, True)


def spmatmul_mod(A: sp.spmatrix, B: sp.spmatrix, p: int) -> sp.csr_matrix:
    """Exact sparse product mod p (int64 path for small p, Python dict otherwise)."""
    A = A.tocsr()
    B = B.tocsr()
    k = A.shape[1]
    if k * (p - 1) ** 2 < (1 << 62):
        C = (A.astype(np.int64) @ B.astype(np.int64)).tocsr()
        C.data %= p
        C.eliminate_zeros()
        return C
    acc: dict = {}
    Bc = B.tocsr()
    Ac = A.tocoo()
    for i, j, v in zip(Ac.row.tolist(), Ac.col.tolist(), Ac.data.tolist()):
        lo, hi = Bc.indptr[j], Bc.indptr[j + 1]
        for c, w in zip(Bc.indices[lo:hi].tolist(), Bc.data[lo:hi].tolist()):
            acc[(i, c)] = (acc.get((i, c), 0) + int(v) * int(w)) % p
    keys = [key for key, v in acc.items() if v]
    if not keys:
        return sp.csr_matrix((A.shape[0], B.shape[1]), dtype=np.int64)
    r, c = zip(*keys)
    return sp.csr_matrix((np.array([acc[key] for key in keys], dtype=np.int64), (r, c)),
                         shape=(A.shape[0], B.shape[1]))
