"""Rank of one parameter family over several primes."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

from .dense import dense_rank
from .elimination import rank_elimination
from .matrix import SparseMatrix
from .report import DENSE_ORACLE, RankReport
from .wiedemann import rank_wiedemann

ENGINES = {
    "elim": rank_elimination,
    "elimination": rank_elimination,
    "wiedemann": rank_wiedemann,
    "dense": lambda M, p: RankReport(dense_rank(M), M.nrows, M.ncols, DENSE_ORACLE, p),
}
METHODS = ("elim", "wiedemann", "auto")
# "auto" switches to Wiedemann at this many nonzeros
AUTO_NNZ = 10 ** 7


def rank_by_method(M: SparseMatrix, p: int, method: str = "auto") -> RankReport:
    if method == "auto":
        method = "elim" if M.nnz < AUTO_NNZ else "wiedemann"
    if method not in ENGINES:
        raise ValueError(f"unknown rank method {method!r}")
    return ENGINES[method](M, p)


@dataclass
class MultiPrimeReport:
    per_prime: dict = field(default_factory=dict)

    @property
    def ranks(self) -> dict:
        return {p: r.rank for p, r in self.per_prime.items()}

    @property
    def rank(self) -> int:
        """Largest rank seen; a lower bound for the rank over the rationals."""
        return max(self.ranks.values())

    @property
    def agree(self) -> bool:
        return len(set(self.ranks.values())) == 1

    @property
    def ncols(self) -> int:
        return next(iter(self.per_prime.values())).ncols

    @property
    def kernel_dim(self) -> int:
        return self.ncols - self.rank

    def to_dict(self) -> dict:
        return {
            "ranks": {str(p): r for p, r in self.ranks.items()},
            "rank": self.rank,
            "kernel_dim": self.kernel_dim,
            "agree": self.agree,
            "reports": {str(p): r.to_dict() for p, r in self.per_prime.items()},
        }


def multi_prime_rank(generator: Callable[[int], SparseMatrix], primes: Iterable[int],
                     method: str = "elim") -> MultiPrimeReport:
    """Rank of ``generator(p)`` for every prime; disagreement is flagged, not raised."""
    primes = list(primes)
    if not primes:
        raise ValueError("need at least one prime")
    out = MultiPrimeReport()
    for p in primes:
        M = generator(p)
        if M.prime != p:
            M = M.reduce(p)
        out.per_prime[p] = rank_by_method(M, p, method)
    return out
