from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Optional

ELIMINATION = "elimination"
WIEDEMANN = "wiedemann"
DENSE_ORACLE = "dense_oracle"


@dataclass
class RankReport:
    rank: int
    nrows: int
    ncols: int
    method: str
    prime: Optional[int]
    elapsed: float = 0.0
    # "exact" for elimination/oracle; Wiedemann only certifies a lower bound
    certificate: str = "exact"
    stats: dict = field(default_factory=dict)

    def __post_init__(self):
        if not 0 <= self.rank <= min(self.nrows, self.ncols):
            raise ValueError(f"rank {self.rank} impossible for {self.nrows}x{self.ncols}")

    @property
    def kernel_dim(self) -> int:
        return self.ncols - self.rank

    def to_dict(self) -> dict:
        d = asdict(self)
        d["kernel_dim"] = self.kernel_dim
        return d
