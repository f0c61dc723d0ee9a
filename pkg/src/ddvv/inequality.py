"""Commutator-norm inequality defects with the sharp constants."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .matrix_core import (
    MatrixTuple,
    SymmetryClass,
    _as_symmetry,
    comm_norm_sum_array,
    norm_sum_array,
)


@dataclass(frozen=True)
class DefectReport:
    lhs: float
    bound: float
    defect: float
    ratio: float
    constant_used: float
    traces: list[float] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "lhs": self.lhs,
            "bound": self.bound,
            "defect": self.defect,
            "ratio": self.ratio,
            "constant_used": self.constant_used,
            "traces": list(self.traces),
        }


def sharp_constant(n: int, symmetry=SymmetryClass.SYMMETRIC) -> float:
    """Best constant k in sum ||[B_r,B_s]||^2 <= k (sum ||B_r||^2)^2.

    Skew matrices of size n <= 2 commute (so(1), so(2) are abelian), so the
    constant there is 0.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if _as_symmetry(symmetry) is SymmetryClass.SYMMETRIC:
        return 1.0
    if n <= 2:
        return 0.0
    if n == 3:
        return 1.0 / 3.0
    return 2.0 / 3.0


def defect_arrays(mats: np.ndarray, constant: float):
    """Batched (lhs, bound) for an array of shape (..., m, n, n)."""
    lhs = comm_norm_sum_array(mats)
    ns = norm_sum_array(mats)
    return lhs, constant * ns * ns


def defect(t: MatrixTuple) -> DefectReport:
    k = sharp_constant(t.n, t.symmetry)
    lhs, bound = defect_arrays(t.mats, k)
    lhs, bound = float(lhs), float(bound)
    ratio = lhs / bound if bound > 0 else 0.0
    traces = [float(x) for x in np.trace(t.mats, axis1=1, axis2=2)]
    return DefectReport(lhs, bound, bound - lhs, ratio, k, traces)


def is_equality(t: MatrixTuple, tol: float = 1e-8) -> bool:
    """Threshold test |defect| <= tol * max(1, bound); no structural check."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    rep = defect(t)
    return abs(rep.defect) <= tol * max(1.0, rep.bound)
