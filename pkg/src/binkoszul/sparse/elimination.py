"""Deterministic exact rank over GF(p) by Gaussian elimination.

Two phases.  A sparse phase pivots by minimal Markowitz cost
(r_i - 1)(c_j - 1), ties going to the smallest (row, col), for as long as
that cost stays below ``markowitz_cap``.  Whatever remains is streamed,
in a fixed shuffled row order, through a dense reduced-echelon basis whose
updates are float64 BLAS products reduced mod p (see ``modmat``).  Both
phases are deterministic.
"""
from __future__ import annotations

import time
from collections import defaultdict

import numpy as np

from ..algebra import GF
from .matrix import SparseMatrix
from .modmat import matmul_mod
from .report import ELIMINATION, RankReport

DEFAULT_MARKOWITZ_CAP = 16
DEFAULT_BATCH = 128
# fixed seed: the dense phase visits rows in a reproducible shuffled order,
# which reaches full rank long before the structured natural order does
ROW_ORDER_SEED = 20130415


def _rref_block(B: np.ndarray, p: int):
    """In-place style RREF of a small block; returns (pivot rows, pivot column positions)."""
    big = p >= (1 << 31)
    A = B.astype(np.int64)
    if big:
        A = A.astype(object)
    pivrows, pivcols = [], []
    for i in range(A.shape[0]):
        row = A[i]
        nz = np.flatnonzero(row != 0) if not big else [j for j, x in enumerate(row) if x % p]
        if len(nz) == 0:
            continue
        c = int(nz[0])
        inv = pow(int(row[c]), -1, p)
        A[i] = row * inv % p
        f = A[:, c].copy()
        f[i] = 0
        hit = np.flatnonzero(f != 0) if not big else [j for j, x in enumerate(f) if x % p]
        if len(hit):
            hit = np.asarray(hit)
            A[hit] = (A[hit] - np.outer(f[hit], A[i])) % p
        pivrows.append(i)
        pivcols.append(c)
    R = A[pivrows]
    return R, pivcols


class DenseEchelon:
    """Reduced row-echelon basis of a growing row space, stored on its free columns.

    The basis rows have an identity pattern on the pivot columns, so only
    the block on the still-free columns (``E``) is kept.
    """

    def __init__(self, ncols: int, p: int):
        self.p = p
        self.ncols = ncols
        self.free = np.arange(ncols)
        self.pivots: list = []
        if p >= (1 << 32):
            raise ValueError("dense echelon needs p < 2^32")
        self.E = np.zeros((0, ncols))

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def absorb(self, B: np.ndarray) -> int:
        """Add the rows of ``B`` (residues, all ``ncols`` columns); returns the rank gained."""
        p = self.p
        Bf = B[:, self.free]
        if self.pivots:
            prod = matmul_mod(B[:, self.pivots], self.E, p)
            Bf = Bf - prod
            Bf = Bf % p
        R, local = _rref_block(Bf, p)
        k = len(local)
        if not k:
            return 0
        keep = np.ones(len(self.free), dtype=bool)
        keep[local] = False
        R = R.astype(self.E.dtype)
        Rk = R[:, keep]
        if self.pivots:
            upd = matmul_mod(self.E[:, local], Rk, p)
            Eo = (self.E[:, keep] - upd) % p
            self.E = np.vstack([Eo, Rk])
        else:
            self.E = Rk
        self.pivots.extend(int(self.free[j]) for j in local)
        self.free = self.free[keep]
        return k


class _Markowitz:
    """Sparse elimination state: rows as dicts, columns as row sets, count buckets."""

    def __init__(self, M: SparseMatrix, p: int):
        self.p = p
        self.rows: dict = defaultdict(dict)
        self.cols: dict = defaultdict(set)
        for r, c, v in M.triplets():
            self.rows[r][c] = v % p
            self.cols[c].add(r)
        self.rows = dict(self.rows)
        self.cols = dict(self.cols)
        self.cbucket: dict = defaultdict(set)
        self.rbucket: dict = defaultdict(set)
        for c, s in self.cols.items():
            self.cbucket[len(s)].add(c)
        for r, d in self.rows.items():
            self.rbucket[len(d)].add(r)
        self.fill = 0

    def _move(self, bucket, key, old, new):
        bucket[old].discard(key)
        if not bucket[old]:
            del bucket[old]
        if new:
            bucket[new].add(key)

    def find_pivot(self, cap):
        """Exact minimal-cost pivot (cost, row, col), or None if every cost exceeds ``cap``."""
        if not self.rbucket:
            return None
        minrc = min(self.rbucket)
        best = None
        for cc in sorted(self.cbucket):
            lb = (cc - 1) * (minrc - 1)
            if lb > cap or (best is not None and lb > best[0]):
                break
            for c in self.cbucket[cc]:
                for r in self.cols[c]:
                    cand = ((len(self.rows[r]) - 1) * (cc - 1), r, c)
                    if best is None or cand < best:
                        best = cand
        if best is None or best[0] > cap:
            return None
        return best

    def eliminate(self, r0, c0):
        p = self.p
        rows, cols = self.rows, self.cols
        prow = rows.pop(r0)
        self._move(self.rbucket, r0, len(prow), 0)
        for c in prow:
            s = cols[c]
            self._move(self.cbucket, c, len(s), len(s) - 1)
            s.discard(r0)
        inv = pow(prow[c0], -1, p)
        # the pivot column's own bucket entry is dropped once, after the loop
        others = [(c, v) for c, v in prow.items() if c != c0]
        for r in list(cols[c0]):
            row = rows[r]
            before = len(row)
            f = row.pop(c0) * inv % p
            for c, v in others:
                old = row.get(c)
                if old is None:
                    row[c] = -f * v % p
                    s = cols[c]
                    self._move(self.cbucket, c, len(s), len(s) + 1)
                    s.add(r)
                    self.fill += 1
                else:
                    nv = (old - f * v) % p
                    if nv:
                        row[c] = nv
                    else:
                        del row[c]
                        s = cols[c]
                        self._move(self.cbucket, c, len(s), len(s) - 1)
                        s.discard(r)
            if row:
                self._move(self.rbucket, r, before, len(row))
            else:
                del rows[r]
                self._move(self.rbucket, r, before, 0)
        self._move(self.cbucket, c0, len(cols[c0]), 0)
        del cols[c0]


def _stream_rows(source, order, ncols, p, batch, stop_at):
    ech = DenseEchelon(ncols, p)
    for s in range(0, len(order), batch):
        ech.absorb(source(order[s:s + batch]))
        if ech.rank >= stop_at:
            break
    return ech


def rank_elimination(M: SparseMatrix, p: int = None, *, markowitz_cap: int = DEFAULT_MARKOWITZ_CAP,
                     batch: int = DEFAULT_BATCH) -> RankReport:
    """Exact rank of ``M`` over GF(p)."""
    t0 = time.perf_counter()
    p = p or M.prime
    GF(p)
    if M.prime != p:
        M = M.reduce(p)
    stats = {"sparse_pivots": 0, "fill": 0, "dense_rows": 0, "dense_cols": 0}
    if M.nnz == 0:
        return RankReport(0, M.nrows, M.ncols, ELIMINATION, p, time.perf_counter() - t0, stats=stats)

    rc = M.row_nnz()
    cc = M.column_nnz()
    cost0 = int(((rc[M.rows] - 1) * (cc[M.cols] - 1)).min())
    rank = 0
    if p >= (1 << 32):
        # float64 residues would be inexact; stay sparse all the way
        markowitz_cap = float("inf")
    if cost0 <= markowitz_cap:
        mk = _Markowitz(M, p)
        while True:
            piv = mk.find_pivot(markowitz_cap)
            if piv is None:
                break
            mk.eliminate(piv[1], piv[2])
            rank += 1
        stats["sparse_pivots"] = rank
        stats["fill"] = mk.fill
        live_cols = sorted(c for c, s in mk.cols.items() if s)
        live_rows = sorted(mk.rows)
        colpos = {c: i for i, c in enumerate(live_cols)}

        def source(rs):
            B = np.zeros((len(rs), len(live_cols)))
            for k, r in enumerate(rs):
                for c, v in mk.rows[r].items():
                    B[k, colpos[c]] = v
            return B
    else:
        live_cols = np.flatnonzero(cc)
        live_rows = np.flatnonzero(rc)
        csr = M.to_csr()[:, live_cols].tocsr()

        def source(rs):
            return csr[rs].toarray()

    stats["dense_rows"] = len(live_rows)
    stats["dense_cols"] = len(live_cols)
    if len(live_rows) and len(live_cols):
        order = np.random.default_rng(ROW_ORDER_SEED).permutation(np.asarray(live_rows))
        ech = _stream_rows(source, order.tolist(), len(live_cols), p, batch,
                           min(len(live_rows), len(live_cols)))
        rank += ech.rank
    return RankReport(rank, M.nrows, M.ncols, ELIMINATION, p, time.perf_counter() - t0, stats=stats)
