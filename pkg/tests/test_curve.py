import json

import pytest

from binkoszul.algebra import GF, DensePoly, poly_div_linear, poly_eval, poly_from_roots
from binkoszul.curve import (CANONICAL, INFINITY, PRYM, CurveParams, InvalidGenus, SectionBasis,
                             SectionPair, admissible_nodes, canonical_H_basis, check_node_incidence,
                             curve_digest, curve_from_json, curve_to_json, evaluate_section,
                             node_table, project_at_node, prym_T_basis, sample_params)
from binkoszul.errors import FieldTooSmall, InvalidNode, ModelMismatch

from oracles import horner, product_of_differences, rank_mod_p

p = 131
F = GF(p)


def test_sampling_is_deterministic_and_generic():
    a = sample_params(PRYM, 6, p, 3)
    assert a == sample_params(PRYM, 6, p, 3)
    assert a != sample_params(PRYM, 6, p, 4)
    assert len(a.a) == 2 and all(len(row) == 5 for row in a.a)
    for row in a.a:
        assert 0 not in row and len(set(row)) == 5
    A1, A2 = a.A
    assert a.d[1] == 1 and F.mul(a.d[0], A2) == F.neg(A1)
    c = sample_params(CANONICAL, 5, p, 3)
    assert c.d is None and all(len(row) == 5 for row in c.a)


def test_sampling_errors():
    with pytest.raises(FieldTooSmall):
        sample_params(PRYM, 6, 23, 0)
    with pytest.raises(InvalidGenus):
        sample_params(PRYM, 4, p, 0)
    with pytest.raises(InvalidGenus):
        sample_params(CANONICAL, 2, p, 0)
    with pytest.raises(InvalidGenus):
        sample_params(CANONICAL, 8, None, 0)


def test_params_validation():
    with pytest.raises(ValueError):
        CurveParams(CANONICAL, 3, F, ((1, 2, 2), (3, 4, 5)))
    with pytest.raises(ValueError):
        CurveParams(CANONICAL, 3, F, ((1, 2, 0), (3, 4, 5)))
    with pytest.raises(ValueError):
        CurveParams(PRYM, 5, F, ((1, 2, 3, 4), (5, 6, 7, 8)), (1, 1))
    with pytest.raises(ModelMismatch):
        prym_T_basis(sample_params(CANONICAL, 4, p, 0))


@pytest.mark.parametrize("g", [5, 6, 7, 8])
def test_prym_degrees_and_vanishing(g):
    c = sample_params(PRYM, g, p, 1)
    T = prym_T_basis(c)
    assert len(T) == g - 1
    for i in range(1, g):
        for j in (1, 2):
            assert T[i][j].degree == (g - 1 if i <= g // 2 else g - 2)
            for l in range(1, g):
                value = poly_eval(T[i][j], c.param(l, j))
                assert (value == 0) == (l != i)


def test_prym_basis_second_construction():
    # rebuild via division of M_j by (t - a_i), then scaling
    c = sample_params(PRYM, 6, p, 2)
    T = prym_T_basis(c)
    t = DensePoly.monomial(1, F)
    for i in range(1, 6):
        for j in (1, 2):
            q = poly_div_linear(c.M(j), c.param(i, j))
            if i <= c.k:
                want = t * q
            else:
                scale = F.neg(F.div(F.mul(c.d[j - 1], c.param(i, j)), c.A[j - 1]))
                want = q.scale(scale)
            assert T[i][j] == want


def test_canonical_basis_structure():
    c = sample_params(CANONICAL, 4, p, 0)
    H = canonical_H_basis(c)
    assert len(H) == 4
    for i in range(1, 5):
        for l in range(1, 5):
            assert (poly_eval(H[i][1], c.param(l, 1)) == 0) == (l != i)
        for j in (1, 2):
            assert H[i][j].leading == 1 and H[i][j].degree == 3


def _residue_sum_ok(c, H):
    """Residues of (f1 dt/D1, -f2 dt/D2) cancel at every node, D_j the node polynomial."""
    g = c.genus
    finite = [[c.param(l, j) for l in range(1, c.n_params + 1)] for j in (1, 2)]
    if c.model == PRYM:
        finite = [row + [0] for row in finite]
    for s in H.sections:
        f = [list(s[j].coeffs) for j in (1, 2)]
        for idx in range(len(finite[0])):
            res = []
            for j in range(2):
                x = finite[j][idx]
                others = [y for y in finite[j] if y != x]
                res.append(horner(f[j], x, p) * pow(product_of_differences(x, others, p), -1, p))
            if (res[0] - res[1]) % p:
                return False
        # at infinity only the t^(g-1) coefficients contribute
        lead = [s[j].coeff(g - 1) for j in (1, 2)]
        if (lead[0] - lead[1]) % p:
            return False
    return True


@pytest.mark.parametrize("model,g", [(PRYM, 6), (PRYM, 7), (CANONICAL, 4), (CANONICAL, 6)])
def test_H_basis_residues_cancel(model, g):
    c = sample_params(model, g, p, 5)
    assert _residue_sum_ok(c, canonical_H_basis(c))


def test_residue_oracle_detects_a_bad_section():
    c = sample_params(PRYM, 6, p, 5)
    H = canonical_H_basis(c)
    bad = SectionPair(H[1][1], H[1][2].scale(2))
    assert not _residue_sum_ok(c, SectionBasis(H.kind, (bad,) + H.sections[1:], c))


def test_node_points():
    T7 = node_table(sample_params(PRYM, 7, p, 0))
    P7 = {n.index: n.point for n in T7.nodes}
    assert P7[7] == (0, 0, 0, 1, 1, 1)
    T6 = node_table(sample_params(PRYM, 6, p, 0))
    assert {n.index: n.point for n in T6.nodes}[7] == (1, 1, 1, 0, 0)
    c5 = sample_params(CANONICAL, 5, p, 0)
    nodes = node_table(c5).nodes
    assert len(nodes) == 6
    assert [n.params[0] for n in nodes] == list(c5.a[0]) + [INFINITY]
    assert nodes[-1].point == (1,) * 5


@pytest.mark.parametrize("g", range(5, 11))
def test_prym_incidence(g):
    c = sample_params(PRYM, g, p, g)
    assert check_node_incidence(prym_T_basis(c), node_table(c))
    H = canonical_H_basis(c)
    assert check_node_incidence(H, node_table(c, H.kind))


@pytest.mark.parametrize("g", range(3, 9))
def test_canonical_incidence(g):
    c = sample_params(CANONICAL, g, p, g)
    assert check_node_incidence(canonical_H_basis(c), node_table(c))


def test_incidence_detects_perturbation():
    c = sample_params(PRYM, 6, p, 0)
    T = prym_T_basis(c)
    f = T[2][1]
    broken = SectionPair(f + DensePoly.constant(1, F), T[2][2])
    B = SectionBasis(T.kind, T.sections[:1] + (broken,) + T.sections[2:], c)
    rep = check_node_incidence(B, node_table(c))
    assert not rep and "P_" in rep.first_failure


def test_infinity_evaluation_reads_top_coefficient():
    f = DensePoly((1, 2, 3), F)
    assert evaluate_section(f, INFINITY, 3) == 3
    assert evaluate_section(f, INFINITY, 4) == 0


def test_projection_examples():
    c = sample_params(PRYM, 7, p, 0)
    child = project_at_node(c, 5)
    assert child.genus == 6
    assert child.a[0] == tuple(c.a[0][i] for i in (0, 1, 2, 3, 5))
    assert child.d[1] == 1
    with pytest.raises(InvalidNode):
        project_at_node(c, 3)
    assert admissible_nodes(c) == [4, 5, 6]
    assert admissible_nodes(sample_params(PRYM, 8, p, 0)) == [1, 2, 3, 4]
    assert admissible_nodes(sample_params(CANONICAL, 5, p, 0)) == [1, 2, 3, 4, 5]


def _shift(i, r):
    return i if i < r else i + 1


@pytest.mark.parametrize("model,g", [(PRYM, 6), (PRYM, 7), (PRYM, 8), (PRYM, 9),
                                     (CANONICAL, 4), (CANONICAL, 5)])
def test_projection_identities(model, g):
    c = sample_params(model, g, p, 3)
    for r in admissible_nodes(c):
        child = project_at_node(c, r, renormalize=False)
        bases = [(canonical_H_basis(c), canonical_H_basis(child))]
        if model == PRYM:
            bases.append((prym_T_basis(c), prym_T_basis(child)))
        lin = [DensePoly((F.neg(c.param(r, j)), 1), F) for j in (1, 2)]
        for parent_b, child_b in bases:
            for i in range(1, len(child_b) + 1):
                for j in (1, 2):
                    assert lin[j - 1] * child_b[i][j] == parent_b[_shift(i, r)][j]
        if model == PRYM:
            T, Tc = bases[1]
            H, Hc = bases[0]
            for i in range(1, len(Tc) + 1):
                for m in range(1, len(Hc) + 1):
                    prod_c = Tc[i] * Hc[m]
                    prod = T[_shift(i, r)] * H[_shift(m, r)]
                    for j in (1, 2):
                        assert lin[j - 1] * lin[j - 1] * prod_c[j] == prod[j]


def test_renormalized_child_is_valid():
    c = sample_params(PRYM, 9, p, 0)
    for r in admissible_nodes(c):
        raw = project_at_node(c, r, renormalize=False)
        norm = project_at_node(c, r)
        assert norm.d[1] == 1
        assert raw.d == tuple(F.div(c.d[j - 1], c.param(r, j)) for j in (1, 2))


@pytest.mark.parametrize("model,g", [(PRYM, 6), (PRYM, 9), (CANONICAL, 5)])
def test_gluing_ratios(model, g):
    c = sample_params(model, g, p, 7)
    H = canonical_H_basis(c)
    W = prym_T_basis(c) if model == PRYM else H
    nodes = [(c.param(l, 1), c.param(l, 2)) for l in range(1, c.n_params + 1)]
    if model == PRYM:
        nodes.append((0, 0))
    for x1, x2 in nodes:
        ratios = set()
        for w in W.sections:
            for s in H.sections:
                prod = w * s
                den = poly_eval(prod[2], x2)
                if den:
                    ratios.add(F.div(poly_eval(prod[1], x1), den))
        assert len(ratios) == 1


@pytest.mark.parametrize("model,g", [(PRYM, g) for g in range(5, 11)] + [(CANONICAL, g) for g in range(3, 11)])
def test_product_span_dimension(model, g):
    c = sample_params(model, g, p, 0)
    H = canonical_H_basis(c)
    W = prym_T_basis(c) if model == PRYM else H
    S = 2 * g - 1
    rows = [list((w * s)[1].padded(S)) + list((w * s)[2].padded(S))
            for w in W.sections for s in H.sections]
    assert rank_mod_p(rows, p) == 3 * g - 3


def test_curve_file_round_trip():
    for model, g in [(PRYM, 6), (CANONICAL, 5)]:
        c = sample_params(model, g, p, 9)
        text = curve_to_json(c)
        back = curve_from_json(text)
        assert back == c and curve_to_json(back) == text
        assert curve_digest(back) == curve_digest(c)
        obj = json.loads(text)
        assert {"model", "genus", "prime", "seed", "a", "d1", "d2", "A1", "A2"} <= set(obj)
    obj["A1"] = (obj["A1"] + 1) % p
    with pytest.raises(ValueError):
        curve_from_json(json.dumps(obj))


def test_rational_curves_reduce_consistently():
    c = sample_params(PRYM, 6, None, 0)
    reduced = c.reduce(F)
    T_q, T_p = prym_T_basis(c), prym_T_basis(reduced)
    for s_q, s_p in zip(T_q.sections, T_p.sections):
        for j in (1, 2):
            assert tuple(F(x) for x in s_q[j].coeffs) == s_p[j].coeffs
    assert curve_from_json(curve_to_json(c)) == c
    assert poly_from_roots(c.a[0], c.field) == c.M(1)
