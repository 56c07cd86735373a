"""Sparse exact linear algebra over prime fields."""
from .dense import apply_dense, dense_rank, kernel_basis_dense, rref_dense
from .elimination import rank_elimination
from .matrix import SparseMatrix
from .multiprime import MultiPrimeReport, multi_prime_rank, rank_by_method
from .report import DENSE_ORACLE, ELIMINATION, WIEDEMANN, RankReport
from .sms import load_sms, read_sms, save_sms, sidecar, write_sms
from .wiedemann import berlekamp_massey, rank_wiedemann

__all__ = [
    "SparseMatrix", "RankReport", "MultiPrimeReport",
    "ELIMINATION", "WIEDEMANN", "DENSE_ORACLE",
    "rank_elimination", "rank_wiedemann", "berlekamp_massey", "multi_prime_rank", "rank_by_method",
    "dense_rank", "rref_dense", "kernel_basis_dense", "apply_dense",
    "read_sms", "write_sms", "save_sms", "load_sms", "sidecar",
]
