"""Numerical and combinatorial laboratory for Hurwitz product traces.

The Hurwitz product ``S_{m,k}(A, B)`` is the sum of all words of length ``m``
in two matrices with exactly ``k`` letters ``B``; its traces are the
coefficients of ``tr (A + tB)^m``.
"""

__version__ = "0.1.0"

from hurwitzlab.config import Tolerances, get_tolerances, tolerances
from hurwitzlab.errors import (
    CapExceeded,
    DomainError,
    FileError,
    HurwitzError,
    MaxDepthExceeded,
    NonConvergence,
    NumericalError,
    PatternMismatch,
    PoleProximity,
    ProductZero,
    SplitInconsistent,
    ZeroMatrix,
)

__all__ = [
    "__version__",
    "Tolerances",
    "get_tolerances",
    "tolerances",
    "CapExceeded",
    "DomainError",
    "FileError",
    "HurwitzError",
    "MaxDepthExceeded",
    "NonConvergence",
    "NumericalError",
    "PatternMismatch",
    "PoleProximity",
    "ProductZero",
    "SplitInconsistent",
    "ZeroMatrix",
]
