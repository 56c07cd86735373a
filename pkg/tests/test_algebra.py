from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from binkoszul.algebra import (GF, QQ, DensePoly, ff_inv, is_prime, poly_div_linear,
                               poly_eval, poly_from_roots, poly_mul, random_prime)
from binkoszul.errors import FieldMismatch, InvalidPrime, NotARoot, ZeroInverse

F = GF(131)
residues = st.integers(0, 130)
coeff_lists = st.lists(residues, max_size=8)


def P(coeffs, field=F):
    return DensePoly(tuple(coeffs), field)


def naive_mul(f, g, p):
    out = [0] * (len(f) + len(g) - 1) if f and g else []
    for i, x in enumerate(f):
        for j, y in enumerate(g):
            out[i + j] = (out[i + j] + x * y) % p
    return out


def test_inverse_examples():
    assert ff_inv(1, F) == 1
    assert ff_inv(2, F) == 66
    assert ff_inv(130, F) == 130
    with pytest.raises(ZeroInverse):
        ff_inv(0, F)
    with pytest.raises(ZeroDivisionError):
        F.inv(131)


@pytest.mark.parametrize("p", [1, 2, 9, 91, 2 ** 61 + 1, 2 ** 62 + 135])
def test_rejects_bad_moduli(p):
    with pytest.raises(InvalidPrime):
        GF(p)


def test_primality_against_trial_division():
    def slow(n):
        return n > 1 and all(n % d for d in range(2, int(n ** 0.5) + 1))
    assert [n for n in range(2000) if is_prime(n)] == [n for n in range(2000) if slow(n)]
    assert is_prime(2 ** 61 - 1) and not is_prime(2 ** 61 + 1)
    # strong pseudoprime to bases 2, 3, 5, 7
    assert not is_prime(3215031751)


def test_random_prime_bits():
    import numpy as np
    p = random_prime(31, np.random.default_rng(5))
    assert is_prime(p) and p.bit_length() == 31


def test_poly_mul_examples():
    Q = GF(7)
    assert poly_mul(P([1, 1], Q), P([1, 6], Q)) == P([1, 0, 6], Q)
    assert poly_mul(P([]), P([4, 5])).is_zero
    with pytest.raises(FieldMismatch):
        poly_mul(P([1]), P([1], GF(7)))


def test_poly_mul_random_against_convolution():
    import numpy as np
    rng = np.random.default_rng(11)
    for _ in range(20):
        f = [int(x) for x in rng.integers(0, 131, 6)]
        g = [int(x) for x in rng.integers(0, 131, 6)]
        f[-1] = g[-1] = 1
        assert list(poly_mul(P(f), P(g)).coeffs) == naive_mul(f, g, 131)


def test_from_roots_examples():
    assert poly_from_roots([], F) == P([1])
    assert poly_from_roots([3, 5], F) == P([15, 123, 1])
    roots = [4, 9, 17, 33, 60, 101]
    f = poly_from_roots(roots, F)
    assert f.degree == 6 and f.leading == 1
    assert all(poly_eval(f, r) == 0 for r in roots)
    assert sum(poly_eval(f, x) == 0 for x in range(131)) == 6


def test_div_linear_examples():
    Q = GF(7)
    assert poly_div_linear(P([6, 0, 1], Q), 1) == P([1, 1], Q)
    assert poly_div_linear(P([]), 3).is_zero
    S = [2, 7, 11, 40]
    for a in S:
        assert poly_div_linear(poly_from_roots(S, F), a) == poly_from_roots([x for x in S if x != a], F)
    with pytest.raises(NotARoot):
        poly_div_linear(poly_from_roots(S, F), 3)


def test_eval_examples():
    assert poly_eval(P([1, 0, 1]), 0) == 1
    assert poly_eval(poly_from_roots([2, 7], F), 2) == 0


@given(coeff_lists, residues)
def test_eval_matches_power_sum(c, x):
    assert poly_eval(P(c), x) == sum(a * pow(x, i, 131) for i, a in enumerate(c)) % 131


@given(residues, residues, residues)
def test_field_axioms(a, b, c):
    assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
    assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    assert F.add(a, F.neg(a)) == 0
    if a:
        assert F.mul(a, ff_inv(a, F)) == 1


@given(coeff_lists, coeff_lists, coeff_lists)
def test_poly_ring_laws(a, b, c):
    f, g, h = P(a), P(b), P(c)
    assert f * g == g * f
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    if not f.is_zero and not g.is_zero:
        assert (f * g).degree == f.degree + g.degree


@given(coeff_lists, residues)
def test_div_linear_undoes_multiplication(c, a):
    f = P(c)
    lin = P([F.neg(a), 1])
    assert poly_div_linear(f * lin, a) == f


@given(st.lists(st.fractions(max_denominator=50), min_size=1, max_size=6),
       st.fractions(max_denominator=50))
def test_rational_reduction_agrees(c, x):
    # reducing mod p commutes with evaluation when no denominator vanishes mod p
    value = poly_eval(DensePoly(tuple(QQ(v) for v in c), QQ), QQ(x))
    reduced = poly_eval(DensePoly(tuple(F(v) for v in c), F), F(x))
    assert F(value) == reduced


def test_rationals_lowest_terms_and_json():
    x = QQ(Fraction(6, -4))
    assert x.denominator > 0 and x == Fraction(-3, 2)
    assert QQ.from_json(QQ.to_json(x)) == x
    with pytest.raises(ZeroInverse):
        F(Fraction(1, 131))
