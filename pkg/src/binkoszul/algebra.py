"""Exact scalar and dense univariate polynomial arithmetic.

Two fields are supported.  ``GF(p)`` stores elements as plain Python ints
in ``[0, p)``; ``QQ`` stores them as :class:`fractions.Fraction`.  Both
expose the same small method surface so curve and matrix code can be
written once and run in either mode.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import FieldMismatch, InvalidPrime, NotARoot, ZeroInverse

Scalar = Union[int, Fraction]

# deterministic for n < 3.3e24, which covers every admissible modulus
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
MAX_PRIME = 1 << 62


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin primality test."""
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def random_prime(bits: int, rng) -> int:
    """Uniformly sampled odd prime with exactly ``bits`` bits."""
    lo, hi = 1 << (bits - 1), 1 << bits
    while True:
        c = int(rng.integers(lo, hi)) | 1
        if is_prime(c):
            return c


class GF:
    """The prime field Z/pZ for an odd prime p < 2**62."""

    __slots__ = ("p",)
    is_exact_rational = False

    def __init__(self, p: int):
        p = int(p)
        if not (2 < p < MAX_PRIME) or not is_prime(p):
            raise InvalidPrime(f"modulus must be an odd prime below 2^62, got {p}")
        self.p = p

    def __repr__(self):
        return f"GF({self.p})"

    def __eq__(self, other):
        return isinstance(other, GF) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))

    @property
    def characteristic(self) -> int:
        return self.p

    zero = 0
    one = 1

    def __call__(self, x) -> int:
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ZeroInverse(f"denominator of {x} vanishes mod {self.p}")
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        return int(x) % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def neg(self, a):
        return -a % self.p

    def mul(self, a, b):
        return a * b % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroInverse(f"0 has no inverse mod {self.p}")
        return pow(a, -1, self.p)

    def div(self, a, b):
        return a * self.inv(b) % self.p

    def is_zero(self, a) -> bool:
        return a % self.p == 0

    def to_json(self, a):
        return int(a)

    def from_json(self, v):
        return self(int(v))


class Rationals:
    """The rational numbers, used only for tiny oracle computations."""

    is_exact_rational = True
    characteristic = 0
    zero = Fraction(0)
    one = Fraction(1)

    def __repr__(self):
        return "QQ"

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("QQ")

    def __call__(self, x) -> Fraction:
        return Fraction(x)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def inv(self, a):
        if a == 0:
            raise ZeroInverse("0 has no inverse in QQ")
        return 1 / Fraction(a)

    def div(self, a, b):
        return Fraction(a) * self.inv(b)

    def is_zero(self, a) -> bool:
        return a == 0

    def to_json(self, a):
        a = Fraction(a)
        return str(a.numerator) if a.denominator == 1 else f"{a.numerator}/{a.denominator}"

    def from_json(self, v):
        return Fraction(v)


QQ = Rationals()
Field = Union[GF, Rationals]


def ff_inv(a: Scalar, field: Field) -> Scalar:
    return field.inv(a)


@dataclass(frozen=True)
class DensePoly:
    """Univariate polynomial; ``coeffs[i]`` is the coefficient of t**i.

    Trailing zeros are trimmed on construction, so the zero polynomial has
    an empty coefficient tuple and degree -1.
    """

    coeffs: tuple
    field: Field

    def __post_init__(self):
        f = self.field
        cs = [f(c) for c in self.coeffs]
        while cs and f.is_zero(cs[-1]):
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def constant(cls, c, field) -> "DensePoly":
        return cls((c,), field)

    @classmethod
    def monomial(cls, deg: int, field, c=1) -> "DensePoly":
        return cls((0,) * deg + (c,), field)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self):
        return self.coeffs[-1] if self.coeffs else self.field.zero

    def coeff(self, i: int):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else self.field.zero

    def padded(self, n: int) -> list:
        """Coefficient list of length exactly ``n`` (zero padded)."""
        if len(self.coeffs) > n:
            raise ValueError(f"degree {self.degree} does not fit in {n} slots")
        return list(self.coeffs) + [self.field.zero] * (n - len(self.coeffs))

    def _check(self, other: "DensePoly"):
        if other.field != self.field:
            raise FieldMismatch(f"{self.field!r} vs {other.field!r}")

    def __add__(self, other: "DensePoly") -> "DensePoly":
        self._check(other)
        f = self.field
        n = max(len(self.coeffs), len(other.coeffs))
        return DensePoly(tuple(f.add(self.coeff(i), other.coeff(i)) for i in range(n)), f)

    def __neg__(self) -> "DensePoly":
        return DensePoly(tuple(self.field.neg(c) for c in self.coeffs), self.field)

    def __sub__(self, other: "DensePoly") -> "DensePoly":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, DensePoly):
            return poly_mul(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, c) -> "DensePoly":
        f = self.field
        c = f(c)
        return DensePoly(tuple(f.mul(c, a) for a in self.coeffs), f)

    def __call__(self, x):
        return poly_eval(self, x)


def poly_mul(f: DensePoly, g: DensePoly) -> DensePoly:
    f._check(g)
    F = f.field
    if f.is_zero() or g.is_zero():
        return DensePoly((), F)
    out = [0] * (len(f.coeffs) + len(g.coeffs) - 1)
    for i, a in enumerate(f.coeffs):
        for j, b in enumerate(g.coeffs):
            out[i + j] += a * b
    return DensePoly(tuple(out), F)


def poly_from_roots(roots: Iterable[Scalar], field: Field) -> DensePoly:
    """Monic polynomial prod (t - r) over the multiset ``roots``."""
    cs = [field.one]
    for r in roots:
        r = field(r)
        nxt = [field.zero] * (len(cs) + 1)
        for i, c in enumerate(cs):
            nxt[i + 1] = field.add(nxt[i + 1], c)
            nxt[i] = field.sub(nxt[i], field.mul(r, c))
        cs = nxt
    return DensePoly(tuple(cs), field)


def poly_div_linear(f: DensePoly, a: Scalar) -> DensePoly:
    """Exact quotient of ``f`` by (t - a) via synthetic division."""
    F = f.field
    a = F(a)
    if f.is_zero():
        return f
    n = len(f.coeffs)
    q = [F.zero] * (n - 1)
    acc = F.zero
    for i in range(n - 1, 0, -1):
        acc = F.add(F.mul(acc, a), f.coeffs[i])
        q[i - 1] = acc
    rem = F.add(F.mul(acc, a), f.coeffs[0])
    if not F.is_zero(rem):
        raise NotARoot(f"{a} is not a root (remainder {rem})")
    return DensePoly(tuple(q), F)


def poly_eval(f: DensePoly, x: Scalar) -> Scalar:
    """Horner evaluation."""
    F = f.field
    x = F(x)
    acc = F.zero
    for c in reversed(f.coeffs):
        acc = F.add(F.mul(acc, x), c)
    return acc


def poly_coeff_matrix(polys: Sequence[DensePoly], width: int) -> list:
    """Rows of zero padded coefficient lists, one per polynomial."""
    return [p.padded(width) for p in polys]
