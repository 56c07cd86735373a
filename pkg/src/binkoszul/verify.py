"""Drivers for the syzygy vanishing statements and structural property checks.

The N_p test for the Prym model asks that F_l be injective with
l = g - 3 - p; for the canonical model l = g - 2 - p.  Rank is computed on
a kernel-containing subspace of the domain (W or Wcan), so ``kernel_dim``
is the dimension of the Koszul group in question for the sampled curve.
A single sampled curve with kernel_dim = 0 is a witness for general
parameters, since rank only drops on closed subsets.
"""
from __future__ import annotations

import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import combinations
from math import comb
from typing import Optional

import numpy as np
import scipy.sparse as sp

from .curve import (CANONICAL, MIN_GENUS, PRYM, admissible_nodes, check_node_incidence,
                    curve_digest, node_table, project_at_node, sample_params)
from .errors import BadDimensions, GenericityWarning, InvalidNode, TooLarge
from .koszul import (FULL, SUBSPACES, V, W, WCAN, YCUT, alphabets, assemble, assemble_pairs,
                     compose_check_dd_zero, default_subspace, enumerate_domain, koszul_sign,
                     product_table)
from .sparse.dense import MAX_KERNEL_COLS, dense_rank, kernel_basis_dense
from .sparse.matrix import SparseMatrix
from .sparse.elimination import rank_elimination
from .sparse.modmat import spmatmul_mod
from .sparse.multiprime import rank_by_method

DEFAULT_PRIME = 131
DEFAULT_RETRIES = 3


def ell_for(model: str, genus: int, p: int) -> int:
    """Exterior degree of the map whose injectivity is property N_p."""
    return genus - 3 - p if model == PRYM else genus - 2 - p


def np_for(model: str, genus: int, l: int) -> int:
    return genus - 3 - l if model == PRYM else genus - 2 - l


def prym_threshold(genus: int) -> int:
    """Largest p covered by the Prym-Green statement, floor(g/2 - 3)."""
    return genus // 2 - 3


@dataclass(frozen=True)
class NpQuery:
    model: str
    genus: int
    p: int
    subspace: Optional[str] = None
    prime: int = DEFAULT_PRIME
    seed: int = 0
    retries: int = DEFAULT_RETRIES
    method: str = "auto"

    def __post_init__(self):
        if self.model not in (PRYM, CANONICAL):
            raise BadDimensions(f"unknown model {self.model!r}")
        if self.subspace is None:
            object.__setattr__(self, "subspace", W if self.model == PRYM else WCAN)
        if self.subspace not in SUBSPACES or self.subspace == YCUT:
            raise BadDimensions(f"subspace {self.subspace!r} is not selectable")
        n_T = self.genus - 1 if self.model == PRYM else self.genus
        if self.p < 0 or not 1 <= self.l <= n_T:
            raise BadDimensions(f"p={self.p} gives l={self.l}, outside 1..{n_T} "
                                f"for {self.model} genus {self.genus}")
        if self.retries < 0:
            raise BadDimensions("retries must be >= 0")

    @property
    def l(self) -> int:
        return ell_for(self.model, self.genus, self.p)

    @classmethod
    def from_ell(cls, model: str, genus: int, l: int, **kw) -> "NpQuery":
        return cls(model, genus, np_for(model, genus, l), **kw)


def _interpretation(q: NpQuery) -> str:
    if q.model == PRYM:
        return f"kernel_dim = dim K_{{{q.p},2}}(C, K_C+A)"
    return f"kernel_dim = dim K_{{{q.l},1}}(C, K_C)"


@dataclass
class VerdictReport:
    query: NpQuery
    nrows: int
    ncols: int
    rank: int
    kernel_dim: int
    interpretation: str
    runs: list = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return self.kernel_dim == 0

    @property
    def kernel_dims(self) -> list:
        return [r["kernel_dim"] for r in self.runs]

    @property
    def stable(self) -> bool:
        return len(set(self.kernel_dims)) <= 1

    def verdict_line(self) -> str:
        if self.holds:
            return f"N_{self.query.p} HOLDS (generic witness)"
        return f"kernel_dim = {self.kernel_dim} across seeds/primes"

    def to_dict(self) -> dict:
        q = asdict(self.query)
        q["l"] = self.query.l
        return {
            "query": q,
            "nrows": self.nrows,
            "ncols": self.ncols,
            "rank": self.rank,
            "kernel_dim": self.kernel_dim,
            "holds": self.holds,
            "interpretation": self.interpretation,
            "verdict": self.verdict_line(),
            "runs": self.runs,
        }


def single_run(q: NpQuery, seed: int, prime: int, threads: int = 1) -> dict:
    """Sample one curve, assemble F_l on the query subspace and take its rank."""
    t0 = time.perf_counter()
    params = sample_params(q.model, q.genus, prime, seed)
    K = assemble(params, q.l, q.subspace, threads=threads)
    R = rank_by_method(K.matrix, prime, q.method)
    return {
        "seed": seed,
        "prime": prime,
        "digest": curve_digest(params),
        "nrows": K.matrix.nrows,
        "ncols": K.matrix.ncols,
        "nnz": K.matrix.nnz,
        "rank": R.rank,
        "kernel_dim": R.kernel_dim,
        "method": R.method,
        "certificate": R.certificate,
        "elapsed_ms": round(1000 * (time.perf_counter() - t0), 3),
    }


def combine_runs(q: NpQuery, runs: list) -> VerdictReport:
    """Consolidate runs of one query: the smallest kernel seen is the generic value."""
    dims = {(r["nrows"], r["ncols"]) for r in runs}
    if len(dims) != 1:
        raise BadDimensions(f"runs disagree on matrix shape: {sorted(dims)}")
    best = min(runs, key=lambda r: r["kernel_dim"])
    if len({r["kernel_dim"] for r in runs}) > 1:
        warnings.warn(f"kernel_dim varies across runs: {[r['kernel_dim'] for r in runs]}",
                      GenericityWarning, stacklevel=3)
    nrows, ncols = dims.pop()
    return VerdictReport(q, nrows, ncols, best["rank"], best["kernel_dim"], _interpretation(q), runs)


def np_test(q: NpQuery, threads: int = 1) -> VerdictReport:
    """Injectivity test of F_l; a nonzero kernel is retried with seeds seed+1..seed+retries."""
    runs = [single_run(q, q.seed, q.prime, threads)]
    s = q.seed
    while runs[-1]["kernel_dim"] > 0 and s < q.seed + q.retries:
        s += 1
        runs.append(single_run(q, s, q.prime, threads))
    return combine_runs(q, runs)


def np_survey(q: NpQuery, primes, seeds, workers: int = 1) -> VerdictReport:
    """Every (prime, seed) combination, with retries applied to each.

    Combinations run concurrently on ``workers`` threads; runs are reported
    in (prime, seed) order whatever the completion order.
    """
    subs = [NpQuery(q.model, q.genus, q.p, q.subspace, prime, seed, q.retries, q.method)
            for prime in primes for seed in seeds]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", GenericityWarning)
        if workers > 1 and len(subs) > 1:
            with ThreadPoolExecutor(workers) as ex:
                results = list(ex.map(np_test, subs))
        else:
            results = [np_test(sub) for sub in subs]
    return combine_runs(q, [run for res in results for run in res.runs])


def prym_green(genus: int, prime: int = DEFAULT_PRIME, seed: int = 0, **kw) -> VerdictReport:
    """N_p for the Prym model at the top of the conjectured range p = floor(g/2 - 3)."""
    if genus < 6:
        raise BadDimensions(f"the Prym statement is empty below genus 6 (got {genus})")
    return np_test(NpQuery(PRYM, genus, prym_threshold(genus), None, prime, seed, **kw))


def green(genus: int, prime: int = DEFAULT_PRIME, seed: int = 0, **kw) -> VerdictReport:
    """Vanishing of the canonical Koszul group at l = floor(g/2)."""
    if genus < MIN_GENUS[CANONICAL]:
        raise BadDimensions(f"canonical drivers need genus >= 3 (got {genus})")
    return np_test(NpQuery.from_ell(CANONICAL, genus, genus // 2, prime=prime, seed=seed, **kw))


def green_lazarsfeld_info(genus: int, prime: int = DEFAULT_PRIME, seed: int = 0) -> dict:
    """Kernel dimension one step below the Green range; informational, no verdict."""
    l = genus // 2 - 1
    if l < 1:
        raise BadDimensions(f"genus {genus} has no l = floor(g/2) - 1 >= 1")
    q = NpQuery.from_ell(CANONICAL, genus, l, prime=prime, seed=seed, retries=0)
    run = single_run(q, seed, prime)
    return {"genus": genus, "l": l, "kernel_dim": run["kernel_dim"], "ncols": run["ncols"]}


# -- kernel support --------------------------------------------------------

def _kernel(params, l, subspace):
    K = assemble(params, l, subspace)
    if K.matrix.ncols > MAX_KERNEL_COLS:
        raise TooLarge(f"{K.matrix.ncols} domain columns exceed {MAX_KERNEL_COLS}")
    return K, kernel_basis_dense(K.matrix)


def _supported(basis, pairs, allowed) -> bool:
    bad = [i for i, (I, m) in enumerate(pairs) if not allowed(I, m)]
    return all(v[i] == 0 for v in basis for i in bad)


def lemmaW_support_check(model: str, genus: int, l: int, prime: int = DEFAULT_PRIME,
                         seed: int = 0) -> bool:
    """Does every kernel vector of the full map vanish off the pairs with m not in I?

    For the canonical model the kernel of F_l restricted to V (m >= min I) is
    additionally required to lie in Wcan (m not in I, m > min I).
    """
    params = sample_params(model, genus, prime, seed)
    K, basis = _kernel(params, l, FULL)
    ok = _supported(basis, K.domain.pairs, lambda I, m: m not in I)
    if ok and model == CANONICAL:
        Kv, bv = _kernel(params, l, V)
        ok = _supported(bv, Kv.domain.pairs, lambda I, m: m not in I and m > I[0])
    return ok


# -- projection from a node ------------------------------------------------

def _shift(i: int, r: int) -> int:
    """Parent index of child index i after deleting r."""
    return i if i < r else i + 1


def _insert_sign(J: tuple, r: int) -> int:
    """Sign of t_J ^ t_r against the sorted wedge of J + {r}."""
    return -1 if sum(1 for x in J if x > r) % 2 else 1


def _embed_codomain(parent, child, l, r):
    """Sparse map from child F_{l-1} rows to parent F_l rows.

    Block K' goes to block sorted(K + {r}) with the wedge sign, and on
    component j the coefficient vector is multiplied by (t - a_{r,j})^2.
    """
    p = parent.prime
    F = parent.field
    n_T_child = len(alphabets(child)[0])
    S_c, S_p = 2 * child.genus - 1, 2 * parent.genus - 1
    parent_pos = {K: b for b, K in enumerate(combinations(range(1, n_T_child + 2), l - 1))}
    quad = []
    for j in (1, 2):
        a = parent.param(r, j)
        quad.append([F.mul(a, a), F.neg(F.add(a, a)), F.one])
    rows, cols, vals = [], [], []
    for b, Kc in enumerate(combinations(range(1, n_T_child + 1), l - 2)):
        K = tuple(_shift(x, r) for x in Kc)
        sg = _insert_sign(K, r)
        pb = parent_pos[tuple(sorted(K + (r,)))]
        for j in (1, 2):
            for c in range(S_c):
                src = b * 2 * S_c + (j - 1) * S_c + c
                for e, q in enumerate(quad[j - 1]):
                    rows.append(pb * 2 * S_p + (j - 1) * S_p + c + e)
                    cols.append(src)
                    vals.append(q if sg > 0 else (p - q) % p)
    nrows = len(parent_pos) * 2 * S_p
    ncols = comb(n_T_child, l - 2) * 2 * S_c
    return SparseMatrix.from_triplets(nrows, ncols, rows, cols, vals, p)


def _rows_with(r, n_T, l, block_rows):
    """Row indices of the parent codomain blocks whose wedge part contains r."""
    out = []
    for b, K in enumerate(combinations(range(1, n_T + 1), l - 1)):
        if r in K:
            out.extend(range(b * block_rows, (b + 1) * block_rows))
    return np.array(out, dtype=np.int64)


def diagram_check(model: str, genus: int, l: int, r: int, prime: int = DEFAULT_PRIME,
                  seed: int = 0, *, sign=koszul_sign) -> bool:
    """Projection from P_r intertwines F_l of the curve with F_{l-1} of its projection.

    For every child pair (J, m) the parent column of t_J ^ t_r (x) s_m,
    restricted to codomain blocks containing r, must equal the child
    column pushed forward by the codomain embedding.
    """
    parent = sample_params(model, genus, prime, seed)
    if r not in admissible_nodes(parent):
        raise InvalidNode(f"node {r} is not admissible for {model} genus {genus}")
    if l < 2:
        raise BadDimensions("the projection diagram needs l >= 2")
    child = project_at_node(parent, r, renormalize=False)
    p = parent.prime
    wedge_c, tensor_c = alphabets(child)
    if l - 1 > len(wedge_c):
        raise BadDimensions(f"l={l} too large for the projected curve")
    child_dom = enumerate_domain(len(wedge_c), len(tensor_c), l - 1, FULL)
    Fc = assemble_pairs(child, l - 1, child_dom.pairs, sign=sign)

    parent_pairs, signs = [], []
    for J, m in child_dom.pairs:
        Jp = tuple(_shift(x, r) for x in J)
        parent_pairs.append((tuple(sorted(Jp + (r,))), _shift(m, r)))
        signs.append(_insert_sign(Jp, r))
    Fp = assemble_pairs(parent, l, parent_pairs, sign=sign).to_csr(np.int64)
    n_T = len(alphabets(parent)[0])
    keep = np.zeros(Fp.shape[0], dtype=np.int64)
    keep[_rows_with(r, n_T, l, 2 * (2 * genus - 1))] = 1
    lhs = sp.diags(keep) @ Fp @ sp.diags(np.array(signs, dtype=np.int64))
    E = _embed_codomain(parent, child, l, r)
    rhs = spmatmul_mod(E.to_csr(np.int64), Fc.to_csr(np.int64), p)
    diff = (lhs.tocsr() - rhs).tocsr()
    diff.data %= p
    diff.eliminate_zeros()
    return diff.nnz == 0


# -- the induction chain ---------------------------------------------------

def projection_chain(model: str, genus: int, l: int) -> list:
    """Nodes projected from, in order, to empty the domain."""
    if model == CANONICAL:
        return list(range(genus, l - 1, -1))
    if genus % 2:
        return list(range(genus - 1, l - 1, -1))
    return list(range(1, genus - l + 1))


def _unshift(i: int, r: int) -> int:
    return i if i < r else i - 1


def induction_replay(model: str, genus: int, p: int, prime: int = DEFAULT_PRIME,
                     seed: int = 0) -> dict:
    """Replay the projection induction for F_l on W (Prym) or Wcan (canonical).

    The domain Y starts as the whole subspace.  Projecting from P_r splits
    Y into X (pairs with r in I) and the new Y (r not in I).  Since F maps
    Y into blocks free of r, injectivity on Y_old follows from injectivity
    of the projected map on X, which is the child map on a cut domain, and
    injectivity on the new Y.  Each step records both ranks.
    """
    l = ell_for(model, genus, p)
    parent = sample_params(model, genus, prime, seed)
    wedge, tensor = alphabets(parent)
    n_T, n_H = len(wedge), len(tensor)
    if n_H * comb(n_T, l) > MAX_KERNEL_COLS:
        raise TooLarge("induction replay is limited to small genus")
    sub = default_subspace(parent)
    P = product_table(parent, wedge, tensor)
    Y = list(enumerate_domain(n_T, n_H, l, sub).pairs)
    start = len(Y)
    done: list = []
    steps = []
    for r in projection_chain(model, genus, l):
        if r not in admissible_nodes(parent):
            raise InvalidNode(f"node {r} is not admissible for {model} genus {genus}")
        X = [(I, m) for I, m in Y if r in I]
        Y_new = [(I, m) for I, m in Y if r not in I]
        rank_proj = 0
        rank_child = 0
        if X:
            FX = assemble_pairs(parent, l, X, products=P)
            rows = _rows_with(r, n_T, l, 2 * (2 * genus - 1))
            rank_proj = rank_elimination(FX.select_rows(rows)).rank
            child = project_at_node(parent, r)
            child_sub = YCUT if model == PRYM else WCAN
            excl = [_unshift(x, r) for x in done]
            wc, tc = alphabets(child)
            dom = enumerate_domain(len(wc), len(tc), l - 1, child_sub, excl) if l > 1 else None
            mapped = sorted((tuple(_unshift(x, r) for x in I if x != r), _unshift(m, r)) for I, m in X)
            if dom is None or sorted(dom.pairs) != mapped:
                raise BadDimensions(f"step r={r}: X does not match the child cut domain")
            rank_child = rank_elimination(assemble_pairs(child, l - 1, dom.pairs)).rank
        steps.append({
            "r": r,
            "y_before": len(Y),
            "x_dim": len(X),
            "y_after": len(Y_new),
            "split_ok": len(X) + len(Y_new) == len(Y),
            "rank_projected": rank_proj,
            "rank_child": rank_child,
            "injective": rank_proj == len(X) and rank_child == len(X),
        })
        Y = Y_new
        done.append(r)
    direct = rank_elimination(assemble(parent, l, sub).matrix)
    ok = all(s["split_ok"] and s["injective"] for s in steps) and not Y
    return {
        "model": model, "genus": genus, "p": p, "l": l, "prime": prime, "seed": seed,
        "subspace": sub, "domain_dim": start, "steps": steps, "final_y": len(Y),
        "direct_kernel_dim": direct.kernel_dim, "ok": ok,
    }


# -- small sanity checks ---------------------------------------------------

def multiplication_span_dim(model: str, genus: int, prime: int = DEFAULT_PRIME, seed: int = 0) -> int:
    params = sample_params(model, genus, prime, seed)
    P = product_table(params)
    flat = P.reshape(P.shape[0] * P.shape[1], -1)
    return dense_rank(SparseMatrix.from_dense(flat, prime=prime))


def multiplication_rank_check(model: str, genus: int, prime: int = DEFAULT_PRIME, seed: int = 0) -> bool:
    """Products of the two alphabets span a space of dimension 3g - 3."""
    if genus > 12:
        raise TooLarge("multiplication span check is limited to genus <= 12")
    return multiplication_span_dim(model, genus, prime, seed) == 3 * genus - 3


def node_incidence_check(model: str, genus: int, prime: int = DEFAULT_PRIME, seed: int = 0) -> bool:
    params = sample_params(model, genus, prime, seed)
    wedge, tensor = alphabets(params)
    ok = bool(check_node_incidence(wedge, node_table(params, wedge.kind)))
    if model == PRYM:
        ok = ok and bool(check_node_incidence(tensor, node_table(params, tensor.kind)))
    return ok


def dd_zero_check(model: str, genus: int, l: int, prime: int = DEFAULT_PRIME, seed: int = 0,
                  *, sign=koszul_sign) -> bool:
    return compose_check_dd_zero(sample_params(model, genus, prime, seed), l, sign=sign)
