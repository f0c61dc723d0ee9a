"""Canonical equality configurations and their detection under O(n) x O(m).

Symmetric equality:  (H_1, H_2, 0, ...) with H_1 = diag(mu, -mu, 0, ...),
                     H_2 = mu (E_12 + E_21).
Skew, n = 3:         (C_1, C_2, C_3, 0, ...), a scaled basis of so(3).
Skew, n >= 4:        (diag(D_i, 0))_{i=1..3}, an anticommuting quaternionic
                     triple on a 4-dimensional block.

The detectors return a representative (P, R) and measure the Frobenius
distance between act((P, R), t) and the canonical tuple; (P, R) is not
unique because the canonical tuples have nontrivial stabilizers.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import ShapeOperatorSet
from .matrix_core import (
    DimensionError,
    GroupElement,
    MatrixTuple,
    SymmetryClass,
    ValidationError,
    act,
)


class Kind(enum.Enum):
    SYMMETRIC_PAIR = "SymmetricPair"
    SKEW_TRIPLE3 = "SkewTriple3"
    SKEW_QUATERNIONIC4 = "SkewQuaternionic4"
    ZERO = "Zero"
    NOT_EQUALITY = "NotEquality"


@dataclass(frozen=True, eq=False)
class NormalFormResult:
    kind: Kind
    P: np.ndarray
    R: np.ndarray
    parameter: float
    residual: float
    reason: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def is_equality(self) -> bool:
        return self.kind is not Kind.NOT_EQUALITY

    def as_dict(self) -> dict:
        d = {
            "kind": self.kind.value,
            "P": self.P.tolist(),
            "R": self.R.tolist(),
            "parameter": self.parameter,
            "residual": self.residual,
        }
        if self.reason:
            d["reason"] = self.reason
        d.update(self.extra)
        return d


# --- constructors ------------------------------------------------------------


def make_symmetric_pair(n: int, m: int, mu: float) -> MatrixTuple:
    if mu < 0:
        raise ValueError("mu must be nonnegative")
    if (n < 2 or m < 2) and mu > 0:
        raise DimensionError("the symmetric pair needs n >= 2 and m >= 2")
    mats = np.zeros((m, n, n))
    if mu > 0:
        mats[0, 0, 0], mats[0, 1, 1] = mu, -mu
        mats[1, 0, 1] = mats[1, 1, 0] = mu
    return MatrixTuple(mats, SymmetryClass.SYMMETRIC)


def _c_block(lam: float) -> np.ndarray:
    C = np.zeros((3, 3, 3))
    for r, (i, j) in enumerate([(0, 1), (0, 2), (1, 2)]):
        C[r, i, j], C[r, j, i] = lam, -lam
    return C


def _d_block(lam: float) -> np.ndarray:
    D = np.zeros((3, 4, 4))
    entries = [
        [(0, 1, 1), (2, 3, 1)],
        [(0, 2, 1), (1, 3, -1)],
        [(0, 3, 1), (1, 2, 1)],
    ]
    for r, ents in enumerate(entries):
        for i, j, sgn in ents:
            D[r, i, j], D[r, j, i] = sgn * lam, -sgn * lam
    return D


def make_skew_triple3(m: int, lam: float) -> MatrixTuple:
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    if m < 3 and lam > 0:
        raise DimensionError("the so(3) triple needs m >= 3")
    mats = np.zeros((m, 3, 3))
    if lam > 0:
        mats[:3] = _c_block(lam)
    return MatrixTuple(mats, SymmetryClass.SKEW)


def make_skew_quaternionic(n: int, m: int, lam: float) -> MatrixTuple:
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    if (n < 4 or m < 3) and lam > 0:
        raise DimensionError("the quaternionic triple needs n >= 4 and m >= 3")
    mats = np.zeros((m, n, n))
    if lam > 0:
        mats[:3, :4, :4] = _d_block(lam)
    return MatrixTuple(mats, SymmetryClass.SKEW)


# --- helpers -------------------------------------------------------------------


def _not_equality(t: MatrixTuple, reason: str) -> NormalFormResult:
    return NormalFormResult(Kind.NOT_EQUALITY, np.eye(t.n), np.eye(t.m), 0.0, math.inf, reason)


def _zero(t: MatrixTuple, residual: float) -> NormalFormResult:
    return NormalFormResult(Kind.ZERO, np.eye(t.n), np.eye(t.m), 0.0, residual)


def _gram_frame(mats: np.ndarray):
    """Gram eigenvalues (descending) and eigenvectors of G_rs = <B_r, B_s>."""
    G = np.einsum("rij,sij->rs", mats, mats)
    w, V = np.linalg.eigh(G)
    order = np.argsort(-w, kind="stable")
    return w[order], V[:, order]


def _gram_pattern_ok(w: np.ndarray, k: int, tol: float) -> bool:
    """k equal leading Gram eigenvalues and the rest zero, relative to 1 + w_max."""
    if w.size < k:
        return False
    ref = tol * (1.0 + w[0])
    return bool(np.all(np.abs(w[:k] - w[0]) <= ref) and np.all(np.abs(w[k:]) <= ref))


def _residual(t: MatrixTuple, g: GroupElement, canonical: MatrixTuple) -> float:
    return float(np.linalg.norm(act(g, t).mats - canonical.mats))


def _nearest_orthogonal(M: np.ndarray) -> np.ndarray:
    U, _, Vt = np.linalg.svd(M, full_matrices=False)
    return U @ Vt


def _accept(t: MatrixTuple, ns: float, residual: float, tol: float) -> bool:
    return residual <= tol * (1.0 + math.sqrt(ns))


# --- symmetric -----------------------------------------------------------------


def _pair_conjugator(B1: np.ndarray, B2: np.ndarray) -> np.ndarray:
    """P with P^t B1 P = diag(mu, -mu, 0, ...) and (P^t B2 P)_12 >= 0."""
    w, V = np.linalg.eigh(B1)
    n = w.size
    order = [n - 1, 0] + list(range(1, n - 1))
    P = V[:, order]
    if (P.T @ B2 @ P)[0, 1] < 0:
        P[:, 1] = -P[:, 1]
    if np.linalg.det(P) < 0 and n > 2:
        P[:, -1] = -P[:, -1]
    return P


def detect_symmetric(t: MatrixTuple, tol: float = 1e-8) -> NormalFormResult:
    """Recognize the symmetric equality orbit.

    Traces must vanish, the Gram matrix must have two equal nonzero eigenvalues
    2 mu^2 and nothing else; R comes from its eigenvectors, P from the spectral
    frame of the first rotated matrix with the second one's off-diagonal sign
    fixed.
    """
    if t.symmetry is not SymmetryClass.SYMMETRIC:
        raise ValidationError("detect_symmetric expects a symmetric tuple")
    mats = t.mats
    ns = float(np.sum(mats * mats))
    if ns <= tol:
        return _zero(t, math.sqrt(ns))
    scale = 1.0 + ns
    traces = np.trace(mats, axis1=1, axis2=2)
    if np.abs(traces).max() > tol * scale:
        return _not_equality(t, "nonzero trace")
    if t.n < 2 or t.m < 2:
        return _not_equality(t, "n or m below 2")
    w, V = _gram_frame(mats)
    if not _gram_pattern_ok(w, 2, tol):
        return _not_equality(t, "Gram spectrum is not (2mu^2, 2mu^2, 0, ...)")
    mu = math.sqrt(max(0.0, (w[0] + w[1]) / 4.0))
    return _finish_symmetric(t, V, mu, ns, tol)


def _finish_symmetric(t: MatrixTuple, R: np.ndarray, mu: float, ns: float, tol: float) -> NormalFormResult:
    rotated = np.einsum("sr,sij->rij", R, t.mats)
    P = _pair_conjugator(rotated[0], rotated[1])
    g = GroupElement(P, R)
    canonical = make_symmetric_pair(t.n, t.m, mu)
    res = _residual(t, g, canonical)
    if not _accept(t, ns, res, tol):
        return NormalFormResult(Kind.NOT_EQUALITY, P, R, mu, res, "residual too large")
    return NormalFormResult(Kind.SYMMETRIC_PAIR, P, R, mu, res)


# --- skew ----------------------------------------------------------------------


def _axis(A: np.ndarray) -> np.ndarray:
    """so(3) -> R^3 with A x = axis x x."""
    return np.array([A[2, 1], A[0, 2], A[1, 0]])


def _detect_triple3(t: MatrixTuple, R: np.ndarray, lam: float, ns: float, tol: float) -> NormalFormResult:
    target = np.array([_axis(C) for C in _c_block(1.0)]).T
    for _ in range(2):
        rotated = np.einsum("sr,sij->rij", R, t.mats)
        axes = np.array([_axis(rotated[i]) for i in range(3)]).T
        M = axes @ np.linalg.inv(target)
        if np.linalg.det(M) >= 0:
            break
        R = R.copy()
        R[:, 2] = -R[:, 2]
    P = _nearest_orthogonal(M)
    g = GroupElement(P, R)
    res = _residual(t, g, make_skew_triple3(t.m, lam))
    if not _accept(t, ns, res, tol):
        return NormalFormResult(Kind.NOT_EQUALITY, P, R, lam, res, "residual too large")
    return NormalFormResult(Kind.SKEW_TRIPLE3, P, R, lam, res)


def _complete_basis(cols: np.ndarray) -> np.ndarray:
    """Extend orthonormal columns (n x k) to an orthonormal basis of R^n."""
    n, k = cols.shape
    Q, _ = np.linalg.qr(np.hstack([cols, np.eye(n)]))
    Q = Q[:, :n]
    signs = np.sign(np.sum(Q[:, :k] * cols, axis=0))
    Q[:, :k] *= signs
    return Q


def _detect_quaternionic(t: MatrixTuple, R: np.ndarray, lam: float, ns: float, tol: float) -> NormalFormResult:
    n = t.n
    K = _d_block(1.0)
    # orientation of the reference triple: K_1 K_2 = s K_3
    s_ref = np.sign(np.sum((K[0] @ K[1]) * K[2]))
    rotated = np.einsum("sr,sij->rij", R, t.mats)
    J = rotated[:3] / lam
    if np.sign(np.sum((J[0] @ J[1]) * J[2])) != s_ref:
        R = R.copy()
        R[:, 2] = -R[:, 2]
        J[2] = -J[2]
    # support: the common range of the J_i (J_i^2 = -Pi)
    S = -(J[0] @ J[0] + J[1] @ J[1] + J[2] @ J[2]) / 3.0
    w, V = np.linalg.eigh(0.5 * (S + S.T))
    v = V[:, -1]
    # J_i P = P K_i  =>  first column v, then J_i v = -p_i
    cols = np.column_stack([v, -J[0] @ v, -J[1] @ v, -J[2] @ v])
    cols = _nearest_orthogonal(cols)
    P = _complete_basis(cols) if n > 4 else cols
    g = GroupElement(P, R)
    res = _residual(t, g, make_skew_quaternionic(n, t.m, lam))
    if not _accept(t, ns, res, tol):
        return NormalFormResult(Kind.NOT_EQUALITY, P, R, lam, res, "residual too large")
    return NormalFormResult(Kind.SKEW_QUATERNIONIC4, P, R, lam, res, extra={"support_rank": int(np.sum(w > 0.5))})


def detect_skew(t: MatrixTuple, tol: float = 1e-8) -> NormalFormResult:
    """Recognize the skew equality orbits (so(3) triple for n = 3, quaternionic for n >= 4)."""
    if t.symmetry is not SymmetryClass.SKEW:
        raise ValidationError("detect_skew expects a skew tuple")
    mats = t.mats
    ns = float(np.sum(mats * mats))
    if ns <= tol:
        return _zero(t, math.sqrt(ns))
    if t.n < 3 or t.m < 3:
        return _not_equality(t, "n or m below 3")
    w, V = _gram_frame(mats)
    if not _gram_pattern_ok(w, 3, tol):
        return _not_equality(t, "Gram spectrum is not three equal values")
    g = float(np.mean(w[:3]))
    if t.n == 3:
        return _detect_triple3(t, V, math.sqrt(g / 2.0), ns, tol)
    return _detect_quaternionic(t, V, math.sqrt(g / 4.0), ns, tol)


def detect(t: MatrixTuple, tol: float = 1e-8) -> NormalFormResult:
    if t.symmetry is SymmetryClass.SYMMETRIC:
        return detect_symmetric(t, tol)
    return detect_skew(t, tol)


# --- shape operators ------------------------------------------------------------


def _align_first(vec: np.ndarray) -> np.ndarray:
    """Orthogonal H (symmetric, Householder) with H vec = |vec| e_1."""
    k = vec.size
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        return np.eye(k)
    e = np.zeros(k)
    e[0] = norm
    u = vec - e
    if np.linalg.norm(u) <= 1e-15 * norm:
        return np.eye(k)
    u /= np.linalg.norm(u)
    return np.eye(k) - 2.0 * np.outer(u, u)


def detect_shape_equality(s: ShapeOperatorSet, tol: float = 1e-8):
    """Recognize the pointwise equality form of rho + rho_perp <= |H|^2 + c.

    Returns (NormalFormResult, (lam1, lam2, lam3)). The pair (lam1, lam2) is
    only determined up to a rotation of the active normal plane (which the
    stabilizer of (H_1, H_2) absorbs); it is normalized to lam1 >= 0, lam2 = 0.
    """
    n, m = s.n, s.m
    if n < 2:
        raise DimensionError("n must be at least 2")
    tau = np.trace(s.ops, axis1=1, axis2=2) / n
    B = MatrixTuple(s.ops - tau[:, None, None] * np.eye(n))
    base = detect_symmetric(B, tol)
    full = MatrixTuple(s.ops)
    ns = float(np.sum(s.ops**2))
    if base.kind is Kind.NOT_EQUALITY:
        return base, (0.0, 0.0, 0.0)
    if base.kind is Kind.ZERO:
        R = _align_first(tau)
        lam1 = float(np.linalg.norm(tau))
        canonical = np.zeros((m, n, n))
        canonical[0] = lam1 * np.eye(n)
        g = GroupElement(np.eye(n), R)
        res = float(np.linalg.norm(act(g, full).mats - canonical))
        kind = Kind.ZERO if res <= tol * (1.0 + math.sqrt(ns)) else Kind.NOT_EQUALITY
        return NormalFormResult(kind, np.eye(n), R, 0.0, res), (lam1, 0.0, 0.0)

    R = base.R.copy()
    tr = R.T @ tau
    # rotate the active plane so the trace lands on the first slot
    lam1 = math.hypot(tr[0], tr[1])
    if lam1 > 0:
        c, sn = tr[0] / lam1, tr[1] / lam1
        G = np.array([[c, -sn], [sn, c]])
        R[:, :2] = R[:, :2] @ G
    lam3 = 0.0
    if m > 2:
        rest = (R.T @ tau)[2:]
        lam3 = float(np.linalg.norm(rest))
        R[:, 2:] = R[:, 2:] @ _align_first(rest)
    mu = base.parameter
    rotated = np.einsum("sr,sij->rij", R, B.mats)
    P = _pair_conjugator(rotated[0], rotated[1])
    g = GroupElement(P, R)
    target = _shape_canonical(n, m, mu, lam1, 0.0, lam3)
    res = float(np.linalg.norm(act(g, full).mats - target))
    kind = Kind.SYMMETRIC_PAIR if res <= tol * (1.0 + math.sqrt(ns)) else Kind.NOT_EQUALITY
    return NormalFormResult(kind, P, R, mu, res), (lam1, 0.0, lam3)


def _shape_canonical(n, m, mu, lam1, lam2, lam3) -> np.ndarray:
    ops = np.zeros((m, n, n))
    ops[0] = lam1 * np.eye(n)
    ops[0, 0, 0] += mu
    ops[0, 1, 1] -= mu
    ops[1] = lam2 * np.eye(n)
    ops[1, 0, 1] = ops[1, 1, 0] = mu
    if m > 2:
        ops[2] = lam3 * np.eye(n)
    return ops
