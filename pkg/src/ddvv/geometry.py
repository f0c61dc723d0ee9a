"""Pointwise curvature invariants of a submanifold of a space form N^{n+m}(c).

The second fundamental form is given by its shape operators A_r in orthonormal
tangent and normal frames. The ambient space has constant curvature c, so its
curvature tensor contributes c to every sectional curvature and nothing to the
normal curvature.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .inequality import is_equality
from .matrix_core import (
    TOL_SYM,
    DimensionError,
    MatrixTuple,
    ValidationError,
    center,
    comm_norm_sum,
    norm_sum,
    pairwise_commutators,
)


class DomainError(ValueError):
    """Raised when a curvature quantity is undefined for the given dimension."""


@dataclass(frozen=True, eq=False)
class ShapeOperatorSet:
    ops: np.ndarray
    c: float = 0.0

    def __post_init__(self):
        ops = np.array(self.ops, dtype=float)
        if ops.ndim == 2:
            ops = ops[None]
        if ops.ndim != 3 or ops.shape[1] != ops.shape[2] or ops.shape[0] < 1:
            raise DimensionError(f"expected shape (m, n, n), got {ops.shape}")
        if not (np.all(np.isfinite(ops)) and math.isfinite(self.c)):
            raise ValidationError("shape operators and c must be finite")
        scale = max(1.0, float(np.abs(ops).max(initial=0.0)))
        if np.abs(ops - ops.transpose(0, 2, 1)).max(initial=0.0) > TOL_SYM * scale:
            raise ValidationError("shape operators must be symmetric")
        ops = 0.5 * (ops + ops.transpose(0, 2, 1))
        ops.setflags(write=False)
        object.__setattr__(self, "ops", ops)
        object.__setattr__(self, "c", float(self.c))

    @property
    def n(self) -> int:
        return self.ops.shape[1]

    @property
    def m(self) -> int:
        return self.ops.shape[0]

    def as_tuple(self) -> MatrixTuple:
        return MatrixTuple(self.ops)


@dataclass(frozen=True)
class CurvatureReport:
    rho: float
    rho_perp: float
    h_norm_sq: float
    wintgen_defect: float
    chen_defect: float
    scale: float

    def as_dict(self) -> dict:
        return {
            "rho": self.rho,
            "rho_perp": self.rho_perp,
            "h_norm_sq": self.h_norm_sq,
            "wintgen_defect": self.wintgen_defect,
            "chen_defect": self.chen_defect,
            "scale": self.scale,
        }


def _require_n2(s: ShapeOperatorSet):
    if s.n < 2:
        raise DomainError("curvature quantities need n >= 2")


def scale(s: ShapeOperatorSet) -> float:
    """Reference magnitude for relative tolerances: 1 + |H|^2 + |c| + sum ||A_r||^2."""
    h = mean_curvature(s)
    return 1.0 + float(h @ h) + abs(s.c) + float(np.sum(s.ops * s.ops))


def mean_curvature(s: ShapeOperatorSet) -> np.ndarray:
    """Components <H, xi_r> = trace(A_r) / n."""
    return np.trace(s.ops, axis1=1, axis2=2) / s.n


def rho_direct(s: ShapeOperatorSet) -> float:
    """Normalized scalar curvature from the Gauss equation, summed over coordinate planes."""
    _require_n2(s)
    n = s.n
    iu, ju = np.triu_indices(n, k=1)
    A = s.ops
    sectional = s.c + np.sum(A[:, iu, iu] * A[:, ju, ju] - A[:, iu, ju] ** 2, axis=0)
    return 2.0 / (n * (n - 1)) * float(np.sum(sectional))


def rho_via_translation(s: ShapeOperatorSet) -> float:
    """rho = |H|^2 + c - sum ||B_r||^2 / (n(n-1)) with B_r the traceless parts."""
    _require_n2(s)
    n = s.n
    h = mean_curvature(s)
    B = center(s.as_tuple())
    return float(h @ h) + s.c - norm_sum(B) / (n * (n - 1))


def rho_perp_direct(s: ShapeOperatorSet) -> float:
    """Normal scalar curvature from the Ricci equation <R(e_i,e_j)xi_r, xi_s> = <[A_r,A_s]e_i, e_j>."""
    _require_n2(s)
    n, m = s.n, s.m
    comms = pairwise_commutators(s.ops)
    iu, ju = np.triu_indices(n, k=1)
    ru, su = np.triu_indices(m, k=1)
    entries = comms[ru, su][:, ju, iu]
    return 2.0 / (n * (n - 1)) * math.sqrt(float(np.sum(entries**2)))


def rho_perp_via_translation(s: ShapeOperatorSet) -> float:
    _require_n2(s)
    n = s.n
    B = center(s.as_tuple())
    return math.sqrt(comm_norm_sum(B)) / (n * (n - 1))


def rho_perp(s: ShapeOperatorSet) -> float:
    return rho_perp_direct(s)


def curvature_report(s: ShapeOperatorSet) -> CurvatureReport:
    _require_n2(s)
    rho = rho_direct(s)
    rp = rho_perp_direct(s)
    h = mean_curvature(s)
    hsq = float(h @ h)
    return CurvatureReport(
        rho=rho,
        rho_perp=rp,
        h_norm_sq=hsq,
        wintgen_defect=hsq + s.c - rho - rp,
        chen_defect=hsq + s.c - rho,
        scale=scale(s),
    )


def ellipse_axes(s: ShapeOperatorSet):
    """For a surface, h(X,X) = H + cos(2t) u + sin(2t) v at X = (cos t, sin t)."""
    if s.n != 2:
        raise DomainError("the curvature ellipse is defined for surfaces (n = 2)")
    u = 0.5 * (s.ops[:, 0, 0] - s.ops[:, 1, 1])
    v = s.ops[:, 0, 1].copy()
    return u, v


def ellipse_circle_test(s: ShapeOperatorSet, tol: float = 1e-8) -> bool:
    u, v = ellipse_axes(s)
    uu, vv, uv = float(u @ u), float(v @ v), float(u @ v)
    ref = uu + vv
    return abs(uv) <= tol * ref and abs(uu - vv) <= tol * ref


def circle_agrees_with_equality(s: ShapeOperatorSet, tol: float = 1e-8) -> bool:
    """Cross-check of the circle criterion against the matrix equality test on the centered tuple."""
    return ellipse_circle_test(s, tol) == is_equality(center(s.as_tuple()), tol)


def equality_shape_ops(n: int, m: int, mu: float, lam1: float = 0.0, lam2: float = 0.0, lam3: float = 0.0, c: float = 0.0) -> ShapeOperatorSet:
    """Shape operators of a point attaining equality in rho + rho_perp <= |H|^2 + c.

    A_1 = diag(lam1+mu, lam1-mu, lam1, ...), A_2 = lam2 I + mu (E_12 + E_21),
    A_3 = lam3 I, all others zero.
    """
    if n < 2:
        raise DimensionError("n must be at least 2")
    if lam3 != 0 and m < 3:
        raise DimensionError("lam3 != 0 needs m >= 3")
    if (mu != 0 or lam2 != 0) and m < 2:
        raise DimensionError("mu or lam2 != 0 needs m >= 2")
    ops = np.zeros((m, n, n))
    ops[0] = lam1 * np.eye(n)
    ops[0, 0, 0] += mu
    ops[0, 1, 1] -= mu
    if m >= 2:
        ops[1] = lam2 * np.eye(n)
        ops[1, 0, 1] = ops[1, 1, 0] = mu
    if m >= 3:
        ops[2] = lam3 * np.eye(n)
    return ShapeOperatorSet(ops, c)
