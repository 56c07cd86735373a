"""Plain dense Gaussian elimination; the oracle the fast rank engines are checked against."""
from __future__ import annotations

import numpy as np

from ..algebra import GF, QQ
from ..errors import TooLarge
from .matrix import SparseMatrix

MAX_KERNEL_COLS = 2000


def _rref_exact(rows: list, ncols: int, field):
    """RREF of a list-of-lists matrix over ``field``; returns (rows, pivot columns)."""
    A = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(A)) if not field.is_zero(A[i][c])), None)
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        inv = field.inv(A[r][c])
        A[r] = [field.mul(inv, x) for x in A[r]]
        for i in range(len(A)):
            if i != r and not field.is_zero(A[i][c]):
                f = A[i][c]
                A[i] = [field.sub(x, field.mul(f, y)) for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    return A[:r], pivots


def _rref_int64(A: np.ndarray, p: int):
    A = A.astype(np.int64) % p
    m, n = A.shape
    pivots = []
    r = 0
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(A[r:, c])
        if len(nz) == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            A[[r, piv]] = A[[piv, r]]
        A[r] = A[r] * pow(int(A[r, c]), -1, p) % p
        f = A[:, c].copy()
        f[r] = 0
        hit = np.flatnonzero(f)
        if len(hit):
            A[hit] = (A[hit] - np.outer(f[hit], A[r])) % p
        pivots.append(c)
        r += 1
    return A[:r], pivots


def _field_of(M: SparseMatrix, field):
    if field is not None:
        return field
    return QQ if M.prime is None else GF(M.prime)


def rref_dense(M: SparseMatrix, field=None):
    F = _field_of(M, field)
    if isinstance(F, GF) and F.p < (1 << 31):
        R, piv = _rref_int64(M.to_dense().astype(np.int64) if M.prime is not None
                             else M.reduce(F.p).to_dense(), F.p)
        return [list(map(int, row)) for row in R], piv
    dense = M.to_dense()
    rows = [[F(x) for x in row] for row in dense.tolist()]
    return _rref_exact(rows, M.ncols, F)


def dense_rank(M: SparseMatrix, field=None) -> int:
    """Rank over GF(M.prime), or over QQ for exact matrices."""
    return len(rref_dense(M, field)[1])


def kernel_basis_dense(M: SparseMatrix, field=None) -> list:
    """Right kernel basis, one vector per non-pivot column.

    The vector for free column f has a 1 in slot f, zeros in the other free
    slots, and minus the RREF entries in the pivot slots.
    """
    if M.ncols > MAX_KERNEL_COLS:
        raise TooLarge(f"{M.ncols} columns exceed the dense kernel limit {MAX_KERNEL_COLS}")
    F = _field_of(M, field)
    R, piv = rref_dense(M, F)
    pivset = set(piv)
    basis = []
    for f in range(M.ncols):
        if f in pivset:
            continue
        v = [F.zero] * M.ncols
        v[f] = F.one
        for row, c in zip(R, piv):
            v[c] = F.neg(F(row[f]))
        basis.append(v)
    return basis


def apply_dense(M: SparseMatrix, v, field=None) -> list:
    """M @ v over the field, for residual checks."""
    F = _field_of(M, field)
    out = [F.zero] * M.nrows
    for r, c, x in M.triplets():
        out[r] = F.add(out[r], F.mul(F(x), F(v[c])))
    return out
