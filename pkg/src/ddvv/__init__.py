"""Numerical tools for DDVV-type commutator norm inequalities."""

__version__ = "0.1.0"

from .matrix_core import (  # noqa: E402
    GroupElement,
    MatrixTuple,
    SymmetryClass,
    act,
    center,
    comm_norm_sum,
    commutator,
    frob_inner,
    norm_sum,
    random_orthogonal,
    random_tuple,
)
from .inequality import DefectReport, defect, is_equality, sharp_constant  # noqa: E402

__all__ = [
    "DefectReport",
    "GroupElement",
    "MatrixTuple",
    "SymmetryClass",
    "act",
    "center",
    "comm_norm_sum",
    "commutator",
    "defect",
    "frob_inner",
    "is_equality",
    "norm_sum",
    "random_orthogonal",
    "random_tuple",
    "sharp_constant",
]
