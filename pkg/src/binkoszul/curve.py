"""Canonical and Prym-canonical binary curves given by explicit parametrizations.

A binary curve of genus g is two copies of P^1 glued at g+1 nodes.  Both
models are dehomogenized at u = 1, so every global section is stored as a
pair of polynomials in t (its restrictions to the two components).

Canonical model (n = g parameters per component)::

    M_j = prod_{r=1..g} (t - a_{r,j}),   s_i|C_j = M_j / (t - a_{i,j})

Prym model (n = g-1 parameters per component, k = g // 2)::

    M_j = prod_{r=1..g-1} (t - a_{r,j}),   A_j = prod_r a_{r,j}
    t_i|C_j = t M_j / (t - a_{i,j})                       i <= k
    t_i|C_j = -d_j a_{i,j} M_j / (A_j (t - a_{i,j}))      i >  k
    d_1 A_2 = -d_2 A_1

The H^0(omega) basis of the Prym model is the canonical recipe moved to node
parameters {a_1, ..., a_{g-1}, 0, oo}: s_i = t M_j / (t - a_{i,j}) for
i < g and s_g = M_j.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .algebra import GF, QQ, DensePoly, Field, poly_eval, poly_from_roots
from .errors import FieldTooSmall, InvalidNode, KoszulError, ModelMismatch

CANONICAL = "canonical"
PRYM = "prym"
MODELS = (CANONICAL, PRYM)

MIN_GENUS = {CANONICAL: 3, PRYM: 5}
# rational oracle path is only meant for tiny genus
MAX_RATIONAL_GENUS = 7


class InvalidGenus(KoszulError, ValueError):
    pass


class _Infinity:
    def __repr__(self):
        return "oo"


INFINITY = _Infinity()


@dataclass(frozen=True)
class CurveParams:
    model: str
    genus: int
    field: Field
    a: tuple  # a[j][i] = a_{i+1, j+1}
    d: Optional[tuple] = None  # (d_1, d_2), Prym only
    seed: Optional[int] = None

    def __post_init__(self):
        if self.model not in MODELS:
            raise ModelMismatch(f"unknown model {self.model!r}")
        g = self.genus
        floor = 2 if self.model == CANONICAL else 3
        if g < floor:
            raise InvalidGenus(f"genus {g} too small for the {self.model} model")
        F = self.field
        a = tuple(tuple(F(x) for x in row) for row in self.a)
        object.__setattr__(self, "a", a)
        if len(a) != 2 or any(len(row) != self.n_params for row in a):
            raise ValueError(f"parameter table must be 2 x {self.n_params}")
        for row in a:
            if any(F.is_zero(x) for x in row):
                raise ValueError("curve parameters must be nonzero")
            if len(set(row)) != len(row):
                raise ValueError("curve parameters must be distinct within a component")
        if self.model == PRYM:
            if self.d is None:
                raise ValueError("Prym model needs (d_1, d_2)")
            d1, d2 = (F(x) for x in self.d)
            object.__setattr__(self, "d", (d1, d2))
            A1, A2 = self.A
            if F.is_zero(d2) or F.mul(d1, A2) != F.neg(F.mul(d2, A1)):
                raise ValueError("Prym constants violate d_1 A_2 = -d_2 A_1")
        elif self.d is not None:
            raise ModelMismatch("canonical model carries no d constants")

    @property
    def n_params(self) -> int:
        return self.genus if self.model == CANONICAL else self.genus - 1

    @property
    def k(self) -> int:
        return self.genus // 2

    @property
    def prime(self) -> Optional[int]:
        return getattr(self.field, "p", None)

    @property
    def A(self) -> tuple:
        F = self.field
        out = []
        for row in self.a:
            acc = F.one
            for x in row:
                acc = F.mul(acc, x)
            out.append(acc)
        return tuple(out)

    def M(self, j: int) -> DensePoly:
        """M_j(t, 1) for component j in {1, 2}."""
        return poly_from_roots(self.a[j - 1], self.field)

    def param(self, i: int, j: int):
        """a_{i,j} with 1-based indices, as in the formulas."""
        return self.a[j - 1][i - 1]

    def reduce(self, field: GF) -> "CurveParams":
        """Reduce a rational curve modulo a prime."""
        d = None if self.d is None else tuple(field(x) for x in self.d)
        return CurveParams(self.model, self.genus, field, self.a, d, self.seed)


@dataclass(frozen=True)
class SectionPair:
    f1: DensePoly
    f2: DensePoly

    @property
    def components(self) -> tuple:
        return (self.f1, self.f2)

    def __getitem__(self, j: int) -> DensePoly:
        return self.components[j - 1]

    def __mul__(self, other: "SectionPair") -> "SectionPair":
        return SectionPair(self.f1 * other.f1, self.f2 * other.f2)


PRYM_T = "prym_t"
CANONICAL_H = "canonical_h"


@dataclass(frozen=True)
class SectionBasis:
    kind: str
    sections: tuple
    curve: CurveParams

    def __len__(self):
        return len(self.sections)

    def __getitem__(self, i: int) -> SectionPair:
        """Section with 1-based index."""
        return self.sections[i - 1]


@dataclass(frozen=True)
class Node:
    index: int
    params: tuple  # per component: field element or INFINITY
    point: tuple


@dataclass(frozen=True)
class NodeTable:
    kind: str
    nodes: tuple


def _fail_validation(msg):
    raise InvalidGenus(msg)


def _rng_for(model, genus, prime, seed):
    lo, hi = (prime or 0) & 0xFFFFFFFF, (prime or 0) >> 32
    return np.random.default_rng([int(seed), int(genus), MODELS.index(model), lo, hi])


def sample_params(model: str, genus: int, prime: Optional[int] = 131, seed: int = 0) -> CurveParams:
    """Random generic parameters; deterministic in (model, genus, prime, seed).

    ``prime=None`` samples small nonzero integers as exact rationals (oracle
    mode, genus at most 7).
    """
    if model not in MODELS:
        raise ModelMismatch(f"unknown model {model!r}")
    if genus < MIN_GENUS[model]:
        _fail_validation(f"{model} model needs genus >= {MIN_GENUS[model]}, got {genus}")
    n = genus if model == CANONICAL else genus - 1
    rng = _rng_for(model, genus, prime, seed)
    if prime is None:
        if genus > MAX_RATIONAL_GENUS:
            _fail_validation(f"rational mode is limited to genus <= {MAX_RATIONAL_GENUS}")
        F = QQ
        lo, hi = -1000, 1001
    else:
        F = GF(prime)
        if prime - 1 < 4 * genus:
            raise FieldTooSmall(f"GF({prime}) has fewer than {4 * genus} nonzero elements")
        lo, hi = 1, prime
    rows = []
    for _ in range(2):
        seen: list = []
        while len(seen) < n:
            x = int(rng.integers(lo, hi))
            if x != 0 and x not in seen:
                seen.append(x)
        rows.append(tuple(F(x) for x in seen))
    d = None
    if model == PRYM:
        A1 = A2 = F.one
        for x in rows[0]:
            A1 = F.mul(A1, x)
        for x in rows[1]:
            A2 = F.mul(A2, x)
        d = (F.neg(F.div(A1, A2)), F.one)
    return CurveParams(model, genus, F, tuple(rows), d, seed)


def _without(roots, i):
    return [x for r, x in enumerate(roots, start=1) if r != i]


def prym_T_basis(params: CurveParams) -> SectionBasis:
    """Basis t_1..t_{g-1} of H^0(omega (x) A)."""
    if params.model != PRYM:
        raise ModelMismatch("T basis exists only for the Prym model")
    F, g, k = params.field, params.genus, params.k
    t = DensePoly.monomial(1, F)
    secs = []
    for i in range(1, g):
        comps = []
        for j in (1, 2):
            q = poly_from_roots(_without(params.a[j - 1], i), F)
            if i <= k:
                comps.append(t * q)
            else:
                dj, Aj, aij = params.d[j - 1], params.A[j - 1], params.param(i, j)
                comps.append(q.scale(F.neg(F.div(F.mul(dj, aij), Aj))))
        secs.append(SectionPair(*comps))
    return SectionBasis(PRYM_T, tuple(secs), params)


def canonical_H_basis(params: CurveParams) -> SectionBasis:
    """Basis s_1..s_g of H^0(omega) for either model."""
    F, g = params.field, params.genus
    secs = []
    if params.model == CANONICAL:
        for i in range(1, g + 1):
            secs.append(SectionPair(*(poly_from_roots(_without(params.a[j - 1], i), F) for j in (1, 2))))
    else:
        t = DensePoly.monomial(1, F)
        for i in range(1, g):
            secs.append(SectionPair(*(t * poly_from_roots(_without(params.a[j - 1], i), F) for j in (1, 2))))
        secs.append(SectionPair(params.M(1), params.M(2)))
    return SectionBasis(CANONICAL_H, tuple(secs), params)


def node_table(params: CurveParams, kind: Optional[str] = None) -> NodeTable:
    """Nodes with their parameters on each component and their images.

    ``kind`` selects the embedding: the T basis (default for Prym) or the H
    basis (default for canonical; also valid for a Prym curve).
    """
    F, g = params.field, params.genus
    if kind is None:
        kind = PRYM_T if params.model == PRYM else CANONICAL_H
    n = params.n_params
    dim = g - 1 if kind == PRYM_T else g

    def e(i):
        return tuple(F.one if r == i else F.zero for r in range(1, dim + 1))

    nodes = [Node(l, (params.param(l, 1), params.param(l, 2)), e(l)) for l in range(1, n + 1)]
    if params.model == CANONICAL:
        if kind == PRYM_T:
            raise ModelMismatch("canonical curve has no T embedding")
        nodes.append(Node(g + 1, (INFINITY, INFINITY), (F.one,) * g))
    elif kind == PRYM_T:
        k = params.k
        nodes.append(Node(g, (F.zero, F.zero), (F.zero,) * k + (F.one,) * (g - 1 - k)))
        nodes.append(Node(g + 1, (INFINITY, INFINITY), (F.one,) * k + (F.zero,) * (g - 1 - k)))
    else:
        nodes.append(Node(g, (F.zero, F.zero), e(g)))
        nodes.append(Node(g + 1, (INFINITY, INFINITY), (F.one,) * g))
    return NodeTable(kind, tuple(nodes))


def evaluate_section(f: DensePoly, x, genus: int):
    """Value at a node parameter; at oo the coefficient of t**(g-1)."""
    if x is INFINITY:
        return f.coeff(genus - 1)
    return poly_eval(f, x)


@dataclass
class IncidenceReport:
    ok: bool
    first_failure: Optional[str] = None

    def __bool__(self):
        return self.ok


def _proportional(v, P, F) -> bool:
    if all(F.is_zero(x) for x in v):
        return False
    piv = next(i for i, x in enumerate(P) if not F.is_zero(x))
    lam = F.div(v[piv], P[piv])
    return all(v[i] == F.mul(lam, P[i]) for i in range(len(P)))


def check_node_incidence(basis: SectionBasis, nodes: NodeTable) -> IncidenceReport:
    """Every node maps to a nonzero multiple of its declared point, on both components."""
    F, g = basis.curve.field, basis.curve.genus
    for node in nodes.nodes:
        for j in (1, 2):
            x = node.params[j - 1]
            v = [evaluate_section(s[j], x, g) for s in basis.sections]
            if len(v) != len(node.point) or not _proportional(v, node.point, F):
                return IncidenceReport(False, f"node P_{node.index} on C_{j}: values {v} vs point {node.point}")
    return IncidenceReport(True)


def admissible_nodes(params: CurveParams) -> list:
    """Node indices from which projection lands in the same model."""
    g, k = params.genus, params.k
    if params.model == CANONICAL:
        return list(range(1, g + 1))
    if g % 2 == 0:
        return list(range(1, k + 1))
    return list(range(k + 1, g))


def project_at_node(params: CurveParams, r: int, renormalize: bool = True) -> CurveParams:
    """Genus g-1 curve obtained by projecting from the node P_r.

    For the Prym model the child constants are d'_j = d_j / a_{r,j}; with
    ``renormalize`` they are rescaled back to the d_2 = 1 convention.
    """
    if r not in admissible_nodes(params):
        raise InvalidNode(f"node {r} is not admissible for {params.model} genus {params.genus} "
                          f"(allowed: {admissible_nodes(params)})")
    F = params.field
    a = tuple(tuple(_without(row, r)) for row in params.a)
    d = None
    if params.model == PRYM:
        d = tuple(F.div(params.d[j], params.a[j][r - 1]) for j in range(2))
        if renormalize:
            d = (F.div(d[0], d[1]), F.one)
    return CurveParams(params.model, params.genus - 1, F, a, d, params.seed)


# -- curve file -------------------------------------------------------------

def curve_to_dict(params: CurveParams) -> dict:
    F = params.field
    enc = F.to_json
    A1, A2 = params.A
    out = {
        "model": params.model,
        "genus": params.genus,
        "prime": params.prime,
        "seed": params.seed,
        "a": [[enc(x) for x in row] for row in params.a],
        "d2": None,
        "d1": None,
        "A1": enc(A1),
        "A2": enc(A2),
    }
    if params.model == PRYM:
        out["d1"], out["d2"] = enc(params.d[0]), enc(params.d[1])
    return out


def curve_to_json(params: CurveParams) -> str:
    return json.dumps(curve_to_dict(params), indent=2, sort_keys=True) + "\n"


def curve_from_dict(obj: dict) -> CurveParams:
    F = QQ if obj.get("prime") is None else GF(obj["prime"])
    dec = F.from_json
    d = None
    if obj["model"] == PRYM:
        d = (dec(obj["d1"]), dec(obj["d2"]))
    params = CurveParams(obj["model"], int(obj["genus"]), F,
                         tuple(tuple(dec(x) for x in row) for row in obj["a"]), d, obj.get("seed"))
    if "A1" in obj and (dec(obj["A1"]), dec(obj["A2"])) != params.A:
        raise ValueError("stored A1/A2 disagree with the parameter table")
    return params


def curve_from_json(text: str) -> CurveParams:
    return curve_from_dict(json.loads(text))


def curve_digest(params: CurveParams) -> str:
    return hashlib.sha256(curve_to_json(params).encode()).hexdigest()
