"""Koszul cohomology of binary curves by exact linear algebra over prime fields."""

__version__ = "0.1.0"

from .algebra import GF, QQ, DensePoly, is_prime  # noqa: E402
from .curve import (CANONICAL, PRYM, CurveParams, curve_digest, project_at_node,  # noqa: E402
                    sample_params)
from .koszul import assemble  # noqa: E402
from .verify import NpQuery, VerdictReport, green, np_test, prym_green  # noqa: E402

__all__ = [
    "__version__", "GF", "QQ", "DensePoly", "is_prime",
    "CANONICAL", "PRYM", "CurveParams", "sample_params", "project_at_node", "curve_digest",
    "assemble", "NpQuery", "VerdictReport", "np_test", "prym_green", "green",
]
