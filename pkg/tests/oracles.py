"""Small independent reference routines used only by the tests."""
from itertools import combinations


def rank_mod_p(rows, p):
    """Row-reduction rank over GF(p) on plain Python lists."""
    A = [[x % p for x in r] for r in rows]
    rank, ncols = 0, len(A[0]) if A else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        inv = pow(A[rank][c], -1, p)
        A[rank] = [x * inv % p for x in A[rank]]
        for i in range(len(A)):
            if i != rank and A[i][c]:
                f = A[i][c]
                A[i] = [(x - f * y) % p for x, y in zip(A[i], A[rank])]
        rank += 1
    return rank


def rank_fraction(rows):
    """Rank over the rationals (entries int or Fraction)."""
    from fractions import Fraction
    A = [[Fraction(x) for x in r] for r in rows]
    rank, ncols = 0, len(A[0]) if A else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(A)) if A[i][c]), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        for i in range(len(A)):
            if i != rank and A[i][c]:
                f = A[i][c] / A[rank][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[rank])]
        rank += 1
    return rank


def horner(coeffs, x, p):
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % p
    return acc


def product_of_differences(x, others, p):
    acc = 1
    for s in others:
        acc = acc * (x - s) % p
    return acc


def lex_subsets(n, l):
    return list(combinations(range(1, n + 1), l))


def binom(n, k):
    if k < 0 or k > n:
        return 0
    out = 1
    for i in range(k):
        out = out * (n - i) // (i + 1)
    return out


def planted_rank(rng, m, n, r, p, density=1.0):
    """Dense m x n integer array of rank exactly r over GF(p), as U @ V mod p.

    Exactness is enforced by retrying until rank_mod_p agrees.
    """
    import numpy as np
    while True:
        U = rng.integers(0, p, (m, r))
        V = rng.integers(0, p, (r, n))
        if density < 1.0:
            U = U * (rng.random((m, r)) < density)
        A = np.zeros((m, n), dtype=object)
        for k in range(r):
            A = (A + np.outer(U[:, k].astype(object), V[k].astype(object))) % p
        if rank_mod_p(A.tolist(), p) == r:
            return A


def min_recurrence_exists(seq, length, p):
    """True when seq satisfies some recurrence s_k = sum_{i<=length} c_i s_{k-i} for k >= length."""
    eqs = [[seq[k - i] for i in range(1, length + 1)] for k in range(length, len(seq))]
    rhs = [seq[k] for k in range(length, len(seq))]
    if not eqs:
        return True
    if length == 0:
        return all(x % p == 0 for x in rhs)
    aug = [e + [b] for e, b in zip(eqs, rhs)]
    return rank_mod_p(eqs, p) == rank_mod_p(aug, p)
