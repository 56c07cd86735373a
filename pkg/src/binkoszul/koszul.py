"""Exterior-algebra domain bases and sparse assembly of the Koszul map F_l.

F_l sends w_I (x) s_m to sum_h (-1)^h w_{I - i_h} (x) (w_{i_h} s_m), where
w is the wedge alphabet (t_i for Prym, s_i for canonical) and s the tensor
alphabet (always s_i).  A target element w_J (x) b is written out as the
coefficient vectors of b restricted to the two components, so row
(J, j, c) holds the coefficient of t**c on C_j, with 2g - 1 slots per
component.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Callable, Optional, Sequence

import numpy as np

from .curve import PRYM, CurveParams, canonical_H_basis, prym_T_basis
from .errors import BadDimensions, ModelMismatch, OutOfRange
from .sparse.matrix import SparseMatrix
from .sparse.modmat import spmatmul_mod

FULL, W, V, WCAN, YCUT = "full", "w", "v", "wcan", "ycut"
SUBSPACES = (FULL, W, V, WCAN, YCUT)


# -- multi-indices ----------------------------------------------------------

def rank_multi_index(I: Sequence[int], n: int) -> int:
    """Lexicographic position of the increasing tuple ``I`` (entries 1..n) among all C(n, len(I))."""
    l = len(I)
    r, prev = 0, 0
    for h, x in enumerate(I):
        if not prev < x <= n:
            raise OutOfRange(f"{tuple(I)} is not an increasing tuple in 1..{n}")
        for v in range(prev + 1, x):
            r += comb(n - v, l - h - 1)
        prev = x
    return r


def unrank_multi_index(r: int, n: int, l: int) -> tuple:
    if not 0 <= r < comb(n, l):
        raise OutOfRange(f"rank {r} outside [0, C({n},{l}))")
    out, v = [], 1
    for h in range(l):
        while True:
            c = comb(n - v, l - h - 1)
            if r < c:
                break
            r -= c
            v += 1
        out.append(v)
        v += 1
    return tuple(out)


def koszul_sign(I: Sequence[int], h: int) -> int:
    """Sign of the term that drops the h-th entry (1-based) of ``I``."""
    if not 1 <= h <= len(I):
        raise OutOfRange(f"position {h} outside 1..{len(I)}")
    return -1 if h % 2 else 1


# -- domain bases -----------------------------------------------------------

@dataclass(frozen=True)
class DomainBasis:
    subspace: str
    pairs: tuple
    n_T: int
    n_H: int
    l: int
    excluded: frozenset = frozenset()

    def __len__(self):
        return len(self.pairs)

    def index(self) -> dict:
        return {pair: i for i, pair in enumerate(self.pairs)}


def _accept(subspace, I, m):
    if subspace == FULL:
        return True
    if subspace in (W, YCUT):
        return m not in I
    if subspace == V:
        return m >= I[0]
    if subspace == WCAN:
        return m not in I and m > I[0]
    raise BadDimensions(f"unknown subspace {subspace!r}")


def enumerate_domain(n_T: int, n_H: int, l: int, subspace: str = FULL, excluded=()) -> DomainBasis:
    """Pairs (I, m) spanning the chosen subspace of Lambda^l T (x) H, in lex order.

    ``excluded`` drops every I meeting the given indices (the Y-type cuts).
    """
    if not (1 <= l <= n_T) or n_H < 1:
        raise BadDimensions(f"need 1 <= l <= n_T and n_H >= 1 (l={l}, n_T={n_T}, n_H={n_H})")
    if subspace not in SUBSPACES:
        raise BadDimensions(f"unknown subspace {subspace!r}")
    ex = frozenset(excluded)
    pairs = []
    for I in combinations(range(1, n_T + 1), l):
        if ex and ex.intersection(I):
            continue
        for m in range(1, n_H + 1):
            if _accept(subspace, I, m):
                pairs.append((I, m))
    return DomainBasis(subspace, tuple(pairs), n_T, n_H, l, ex)


def domain_size(n_T: int, n_H: int, l: int, subspace: str) -> int:
    """Closed-form count (the tensor alphabet must contain the wedge alphabet's indices)."""
    if subspace == FULL:
        return comb(n_T, l) * n_H
    if subspace == W:
        return comb(n_T, l) * (n_H - l)
    if subspace == V:
        return comb(n_T, l) * n_H - comb(n_T, l + 1)
    if subspace == WCAN:
        return comb(n_T, l) * (n_H - l) - comb(n_T, l + 1)
    raise BadDimensions(f"no closed form for {subspace!r}")


# -- products and assembly --------------------------------------------------

def alphabets(params: CurveParams):
    """(wedge basis, tensor basis) for the model."""
    H = canonical_H_basis(params)
    if params.model == PRYM:
        return prym_T_basis(params), H
    return H, H


def default_subspace(params: CurveParams) -> str:
    return W if params.model == PRYM else WCAN


def product_table(params: CurveParams, wedge=None, tensor=None) -> np.ndarray:
    """P[i-1, m-1, j-1, c] = coefficient of t**c in (w_i s_m)|C_j."""
    if wedge is None:
        wedge, tensor = alphabets(params)
    S = 2 * params.genus - 1
    exact = params.field.is_exact_rational
    P = np.zeros((len(wedge), len(tensor), 2, S), dtype=object if exact else np.int64)
    for i, w in enumerate(wedge.sections):
        for m, s in enumerate(tensor.sections):
            for j in range(2):
                P[i, m, j] = (w.components[j] * s.components[j]).padded(S)
    return P


@dataclass(frozen=True)
class KoszulMatrix:
    matrix: SparseMatrix
    domain: DomainBasis
    genus: int
    model: str

    @property
    def l(self) -> int:
        return self.domain.l

    @property
    def slots(self) -> int:
        return 2 * self.genus - 1

    @property
    def block_rows(self) -> int:
        return 2 * self.slots

    def row_index(self, J: Sequence[int], component: int, c: int) -> int:
        b = rank_multi_index(J, self.domain.n_T) if len(J) else 0
        return b * self.block_rows + (component - 1) * self.slots + c

    def decode_row(self, row: int) -> tuple:
        b, rest = divmod(row, self.block_rows)
        j, c = divmod(rest, self.slots)
        J = unrank_multi_index(b, self.domain.n_T, self.l - 1) if self.l > 1 else ()
        return J, j + 1, c


def _assemble_chunk(pairs, l, n_T, P, block_rows, sign, p, col0):
    Jpos = {J: b for b, J in enumerate(combinations(range(1, n_T + 1), l - 1))}
    E = len(pairs) * l
    cols = np.empty(E, dtype=np.int64)
    blocks = np.empty(E, dtype=np.int64)
    wi = np.empty(E, dtype=np.int64)
    tm = np.empty(E, dtype=np.int64)
    sg = np.empty(E, dtype=np.int64)
    e = 0
    for col, (I, m) in enumerate(pairs, start=col0):
        for h in range(1, l + 1):
            cols[e] = col
            blocks[e] = Jpos[I[:h - 1] + I[h:]]
            wi[e] = I[h - 1] - 1
            tm[e] = m - 1
            sg[e] = sign(I, h)
            e += 1
    vals = P[wi, tm].reshape(E, block_rows)
    if p is None:
        vals = vals * sg[:, None].astype(object)
    else:
        vals = np.where(sg[:, None] > 0, vals, (p - vals) % p)
    rows = blocks[:, None] * block_rows + np.arange(block_rows)
    cols = np.broadcast_to(cols[:, None], rows.shape)
    nz = vals != 0
    return rows[nz], cols[nz], vals[nz]


def assemble_pairs(params: CurveParams, l: int, pairs: Sequence, *, sign: Callable = koszul_sign,
                   products: Optional[np.ndarray] = None, threads: int = 1) -> SparseMatrix:
    """Matrix of F_l on an explicit ordered list of domain pairs (I, m)."""
    if products is None:
        products = product_table(params)
    n_T, n_H = products.shape[:2]
    if not 1 <= l <= n_T:
        raise BadDimensions(f"l={l} outside 1..{n_T}")
    S = 2 * params.genus - 1
    block_rows = 2 * S
    nrows = comb(n_T, l - 1) * block_rows
    p = params.prime
    pairs = list(pairs)
    if not pairs:
        return SparseMatrix.zeros(nrows, 0, p)
    threads = max(1, int(threads))
    chunk = -(-len(pairs) // threads)
    jobs = [(pairs[s:s + chunk], s) for s in range(0, len(pairs), chunk)]
    if threads == 1 or len(jobs) == 1:
        parts = [_assemble_chunk(ps, l, n_T, products, block_rows, sign, p, s) for ps, s in jobs]
    else:
        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(lambda job: _assemble_chunk(job[0], l, n_T, products, block_rows,
                                                            sign, p, job[1]), jobs))
    rows = np.concatenate([q[0] for q in parts])
    cols = np.concatenate([q[1] for q in parts])
    vals = np.concatenate([q[2] for q in parts])
    return SparseMatrix.from_triplets(nrows, len(pairs), rows, cols, vals, p)


def assemble(params: CurveParams, l: int, subspace: Optional[str] = None, *, excluded=(),
             sign: Callable = koszul_sign, threads: int = 1) -> KoszulMatrix:
    """Sparse matrix of F_l restricted to a domain subspace."""
    if subspace is None:
        subspace = default_subspace(params)
    if params.model == PRYM and subspace in (V, WCAN):
        raise ModelMismatch(f"subspace {subspace!r} is defined for the canonical model only")
    wedge, tensor = alphabets(params)
    dom = enumerate_domain(len(wedge), len(tensor), l, subspace, excluded)
    P = product_table(params, wedge, tensor)
    M = assemble_pairs(params, l, dom.pairs, sign=sign, products=P, threads=threads)
    return KoszulMatrix(M, dom, params.genus, params.model)


# -- d o d = 0 --------------------------------------------------------------

def _multiplier(w_coeffs, S_in, S_out, p):
    """Matrix of Q -> w*Q on coefficient vectors (S_out x S_in)."""
    rows, cols, vals = [], [], []
    for c_in in range(S_in):
        for d, x in enumerate(w_coeffs):
            if x:
                rows.append(c_in + d)
                cols.append(c_in)
                vals.append(x)
    return rows, cols, vals


def second_differential(params: CurveParams, l: int, *, sign: Callable = koszul_sign) -> SparseMatrix:
    """Matrix of Lambda^{l-1} T (x) B -> Lambda^{l-2} T (x) (T.B), coefficient rows on both sides."""
    import scipy.sparse as sp

    wedge, _ = alphabets(params)
    n_T = len(wedge)
    g = params.genus
    S_in, S_out = 2 * g - 1, 3 * g - 2
    p = params.prime
    src_blocks = list(combinations(range(1, n_T + 1), l - 1))
    dst_pos = {J: b for b, J in enumerate(combinations(range(1, n_T + 1), l - 2))}
    rows, cols, vals = [], [], []
    for b, J in enumerate(src_blocks):
        for h in range(1, l):
            target = dst_pos[J[:h - 1] + J[h:]]
            s = sign(J, h)
            w = wedge[J[h - 1]]
            for j in (1, 2):
                r, c, v = _multiplier(w[j].coeffs, S_in, S_out, p)
                off_in = b * 2 * S_in + (j - 1) * S_in
                off_out = target * 2 * S_out + (j - 1) * S_out
                rows.extend(off_out + x for x in r)
                cols.extend(off_in + x for x in c)
                vals.extend((x if s > 0 else -x) % p for x in v)
    D = sp.coo_matrix((np.array(vals, dtype=np.int64), (rows, cols)),
                      shape=(len(dst_pos) * 2 * S_out, len(src_blocks) * 2 * S_in))
    return SparseMatrix.from_triplets(D.shape[0], D.shape[1], D.row, D.col, D.data, p)


def compose_check_dd_zero(params: CurveParams, l: int, *, sign: Callable = koszul_sign) -> bool:
    """True iff the composite of two consecutive Koszul differentials vanishes (needs l >= 2)."""
    if l < 2:
        raise BadDimensions("d o d needs l >= 2")
    if params.prime is None:
        raise ModelMismatch("the composition check runs over GF(p)")
    F1 = assemble(params, l, FULL, sign=sign).matrix
    D2 = second_differential(params, l, sign=sign)
    C = spmatmul_mod(D2.to_csr(np.int64), F1.to_csr(np.int64), params.prime)
    return C.nnz == 0
