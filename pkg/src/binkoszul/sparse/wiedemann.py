"""Scalar Wiedemann rank with diagonal preconditioning.

For A (m x n) with n <= m the black box is B = D1 A^T D2 A D1 (otherwise
D1 A D2 A^T D1 on the smaller side), with D1, D2 random nonzero diagonals.
The minimal polynomial f of the projected Krylov sequence u^T B^i v is
found by Berlekamp-Massey, and deg f - [f(0) == 0] is returned.  That
number never exceeds rank(A) (the sequence polynomial divides the minimal
polynomial of B, whose degree is at most rank(B) + 1), so across trials
the maximum is kept as a certified lower bound.
"""
from __future__ import annotations

import time
import warnings

import numpy as np

from ..algebra import GF
from ..errors import NonConvergence, PrimeTooSmall
from .matrix import SparseMatrix
from .modmat import ModOperator
from .report import WIEDEMANN, RankReport

_FLOAT_P = 1 << 26


class BerlekampMassey:
    """Incremental shortest linear recurrence over GF(p).

    After pushing s_0..s_n, ``C[0..L]`` satisfies
    sum_i C[i] s_{k-i} = 0 for L <= k <= n, with C[0] = 1.
    """

    def __init__(self, p: int, capacity: int = 64):
        self.p = p
        self.fast = p < (1 << 31)
        self.seq: list = []
        self.L = 0
        self._m = 1
        self._b = 1
        if self.fast:
            self._seq = np.zeros(capacity, dtype=np.int64)
            self.C = np.zeros(capacity + 1, dtype=np.int64)
            self.B = np.zeros(capacity + 1, dtype=np.int64)
        else:
            self.C = [0] * (capacity + 1)
            self.B = [0] * (capacity + 1)
        self.C[0] = 1
        self.B[0] = 1

    def _grow(self, need):
        cap = len(self.C)
        if need < cap:
            return
        new = max(need + 1, 2 * cap)
        if self.fast:
            for name in ("C", "B"):
                arr = np.zeros(new, dtype=np.int64)
                arr[:cap] = getattr(self, name)
                setattr(self, name, arr)
            s = np.zeros(new, dtype=np.int64)
            s[:len(self._seq)] = self._seq
            self._seq = s
        else:
            self.C.extend([0] * (new - cap))
            self.B.extend([0] * (new - cap))

    def push(self, s: int) -> int:
        p = self.p
        n = len(self.seq)
        s = int(s) % p
        self.seq.append(s)
        self._grow(n + 2)
        L = self.L
        if self.fast:
            self._seq[n] = s
            if L:
                window = self._seq[n - L:n][::-1]
                d = int((s + int((self.C[1:L + 1] * window % p).sum())) % p)
            else:
                d = s
        else:
            d = (s + sum(self.C[i] * self.seq[n - i] for i in range(1, L + 1))) % p
        if d == 0:
            self._m += 1
            return self.L
        coef = d * pow(self._b, -1, p) % p
        m = self._m
        T = self.C.copy() if self.fast else list(self.C)
        top = len(self.C) - m
        if self.fast:
            self.C[m:] = (self.C[m:] - coef * self.B[:top]) % p
        else:
            for i in range(top):
                if self.B[i]:
                    self.C[i + m] = (self.C[i + m] - coef * self.B[i]) % p
        if 2 * L <= n:
            self.L = n + 1 - L
            self.B = T
            self._b = d
            self._m = 1
        else:
            self._m += 1
        return self.L

    def connection(self) -> list:
        return [int(x) for x in self.C[:self.L + 1]]

    def minpoly(self) -> list:
        """Monic minimal polynomial of the sequence, lowest degree first."""
        return self.connection()[::-1]


def berlekamp_massey(seq, p: int) -> list:
    """Connection polynomial [1, c_1, ..., c_L] of the shortest recurrence for ``seq``."""
    bm = BerlekampMassey(p, max(8, len(seq)))
    for s in seq:
        bm.push(s)
    return bm.connection()


class _Vec:
    """Elementwise residue arithmetic: float64 for small p, Python ints otherwise."""

    def __init__(self, p):
        self.p = p
        self.small = p < _FLOAT_P

    def rand(self, rng, n, lo=0):
        x = rng.integers(lo, self.p, n)
        return x.astype(np.float64) if self.small else np.array([int(v) for v in x], dtype=object)

    def mul(self, a, b):
        return np.fmod(a * b, self.p) if self.small else (a * b) % self.p

    def dot(self, a, b):
        if self.small:
            return int(np.fmod(a * b, self.p).sum()) % self.p
        return int((a * b).sum()) % self.p


def _black_box(A: ModOperator, d1, d2, vec: _Vec, tall: bool):
    if tall:
        return lambda x: vec.mul(d1, A.rmatvec(vec.mul(d2, A.matvec(vec.mul(d1, x)))))
    return lambda x: vec.mul(d1, A.matvec(vec.mul(d2, A.rmatvec(vec.mul(d1, x)))))


def wiedemann_trial(A: ModOperator, p: int, rng, *, early_stop=None, progress=None) -> tuple:
    """One preconditioned probe; returns (rank estimate, sequence length used).

    ``progress(step, total, L)`` is called every 1000 steps when given.
    """
    m, n = A.shape
    tall = n <= m
    N, other = (n, m) if tall else (m, n)
    vec = _Vec(p)
    d1 = vec.rand(rng, N, 1)
    d2 = vec.rand(rng, other, 1)
    apply = _black_box(A, d1, d2, vec, tall)
    u = vec.rand(rng, N)
    x = vec.rand(rng, N)
    bm = BerlekampMassey(p, 2 * N + 4)
    steady = 0
    length = 2 * N + 2
    for i in range(length):
        before = bm.L
        L = bm.push(vec.dot(u, x))
        steady = steady + 1 if L == before else 0
        if early_stop and i >= 2 * L and steady >= early_stop:
            length = i + 1
            break
        if progress is not None and i % 1000 == 0:
            progress(i, length, L)
        x = apply(x)
    C = bm.connection()
    L = bm.L
    if L > N + 1:
        raise NonConvergence(f"recurrence length {L} exceeds black box order {N} + 1")
    est = L - 1 if L and C[L] == 0 else L
    return min(est, N), length


def rank_wiedemann(M: SparseMatrix, p: int = None, trials: int = 3, *, seed: int = 0,
                   early_stop=None, progress=None) -> RankReport:
    """Monte Carlo rank: maximum over ``trials`` probes, never above the true rank."""
    t0 = time.perf_counter()
    p = p or M.prime
    GF(p)
    if M.prime != p:
        M = M.reduce(p)
    if trials < 1:
        raise ValueError("need at least one trial")
    stats = {"trials": [], "sequence_lengths": []}
    if M.nnz == 0:
        return RankReport(0, M.nrows, M.ncols, WIEDEMANN, p, time.perf_counter() - t0,
                          certificate="lower_bound", stats=stats)
    if p <= 2 * min(M.shape):
        warnings.warn(f"GF({p}) is small for a {M.nrows}x{M.ncols} Wiedemann probe; "
                      "estimates may fall short of the rank", PrimeTooSmall, stacklevel=2)
    csr = M.to_csr(np.float64 if p < _FLOAT_P else np.int64)
    op = ModOperator(csr, p) if p < _FLOAT_P else _ObjectOperator(M, p)
    rng = np.random.default_rng([seed, M.nrows, M.ncols])
    best = 0
    for _ in range(trials):
        est, length = wiedemann_trial(op, p, rng, early_stop=early_stop, progress=progress)
        stats["trials"].append(est)
        stats["sequence_lengths"].append(length)
        best = max(best, est)
    return RankReport(best, M.nrows, M.ncols, WIEDEMANN, p, time.perf_counter() - t0,
                      certificate="lower_bound", stats=stats)


class _ObjectOperator:
    """Exact black box in Python integers, for primes beyond the float64 range."""

    def __init__(self, M: SparseMatrix, p: int):
        self.p = p
        self.shape = M.shape
        self.trip = [(r, c, int(v)) for r, c, v in M.triplets()]

    def _apply(self, x, transpose):
        out = [0] * (self.shape[1] if transpose else self.shape[0])
        for r, c, v in self.trip:
            if transpose:
                out[c] += v * int(x[r])
            else:
                out[r] += v * int(x[c])
        return np.array([o % self.p for o in out], dtype=object)

    def matvec(self, x):
        return self._apply(x, False)

    def rmatvec(self, x):
        return self._apply(x, True)
