"""Reduction of the symmetric commutator inequality to a quadratic form on the simplex.

A symmetric tuple is written in the orthonormal basis {E_hat_(i,j)} of SM(n),
B B^t = Q diag(x) Q^t is diagonalized, and

    f_Q(x) = sum_{a,b} x_a x_b ||[Q_hat_a, Q_hat_b]||^2 - (sum_a x_a)^2

evaluated at the spectrum equals comm_norm_sum - norm_sum^2. The inequality
is equivalent to f_Q <= 0 on the standard simplex for every Q in SO(N).
"""
from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .matrix_core import (
    TOL_ORTH,
    DimensionError,
    MatrixTuple,
    SymmetryClass,
    ValidationError,
    comm_norm_sum,
    norm_sum,
    pairwise_commutators,
)


@dataclass(frozen=True, eq=False)
class SymBasis:
    """Orthonormal basis of SM(n) in lexicographic (i, j), i <= j order.

    ``index_map[a]`` is the 0-based pair (i, j) of the a-th element.
    """

    n: int
    elements: np.ndarray
    index_map: tuple

    @property
    def N(self) -> int:
        return len(self.index_map)

    def index_of(self, i: int, j: int) -> int:
        return self.index_map.index((min(i, j), max(i, j)))


@functools.lru_cache(maxsize=None)
def sym_basis(n: int) -> SymBasis:
    if n < 1:
        raise DimensionError("n must be positive")
    pairs = tuple((i, j) for i in range(n) for j in range(i, n))
    elems = np.zeros((len(pairs), n, n))
    r2 = 1.0 / math.sqrt(2.0)
    for a, (i, j) in enumerate(pairs):
        if i == j:
            elems[a, i, i] = 1.0
        else:
            elems[a, i, j] = elems[a, j, i] = r2
    elems.setflags(write=False)
    return SymBasis(n, elems, pairs)


@dataclass(frozen=True, eq=False)
class Vectorization:
    basis: SymBasis
    B: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return np.einsum("ar,aij->rij", self.B, self.basis.elements)


@dataclass(frozen=True, eq=False)
class SpectralFrame:
    Q: np.ndarray
    x: np.ndarray


def vectorize(t: MatrixTuple) -> Vectorization:
    """Coefficient matrix B (N x m) with (B_1..B_m) = (E_hat_1..E_hat_N) B."""
    if t.symmetry is not SymmetryClass.SYMMETRIC:
        raise ValidationError("vectorize() applies to symmetric tuples only")
    basis = sym_basis(t.n)
    B = np.einsum("aij,rij->ar", basis.elements, t.mats)
    return Vectorization(basis, B)


def spectral_frame(v: Vectorization) -> SpectralFrame:
    """B B^t = Q diag(x) Q^t with x sorted descending, x >= 0 and det Q = +1."""
    if not np.all(np.isfinite(v.B)):
        raise ValidationError("non-finite coefficients")
    G = v.B @ v.B.T
    N = G.shape[0]
    if not np.any(G):
        return SpectralFrame(np.eye(N), np.zeros(N))
    w, V = np.linalg.eigh(G)
    order = np.argsort(-w, kind="stable")
    w, V = w[order], V[:, order]
    w = np.where(w < 0, 0.0, w)
    if np.linalg.det(V) < 0:
        V[:, -1] = -V[:, -1]
    return SpectralFrame(V, w)


def _check_orthogonal(Q: np.ndarray, N: int):
    if Q.shape != (N, N):
        raise DimensionError(f"Q must be {N} x {N}, got {Q.shape}")
    if np.abs(Q.T @ Q - np.eye(N)).max() > TOL_ORTH:
        raise ValidationError("Q is not orthogonal")


def frame_matrices(Q, basis: SymBasis) -> np.ndarray:
    """Q_hat_a = sum_b Q[b, a] E_hat_b, returned with shape (N, n, n)."""
    Q = np.asarray(Q, dtype=float)
    _check_orthogonal(Q, basis.N)
    return np.einsum("ba,bij->aij", Q, basis.elements)


@functools.lru_cache(maxsize=256)
def _coefficients_cached(qbytes: bytes, N: int, n: int) -> np.ndarray:
    Q = np.frombuffer(qbytes, dtype=float).reshape(N, N)
    frames = frame_matrices(Q, sym_basis(n))
    comms = pairwise_commutators(frames)
    C = np.sum(comms * comms, axis=(-2, -1))
    C = 0.5 * (C + C.T)
    np.fill_diagonal(C, 0.0)
    C.setflags(write=False)
    return C


def coefficient_matrix(Q, basis: SymBasis) -> np.ndarray:
    """C[a, b] = ||[Q_hat_a, Q_hat_b]||^2, cached per Q."""
    Q = np.ascontiguousarray(Q, dtype=float)
    _check_orthogonal(Q, basis.N)
    return _coefficients_cached(Q.tobytes(), basis.N, basis.n)


def f_eval(Q, x, basis: SymBasis) -> float:
    x = np.asarray(x, dtype=float)
    C = coefficient_matrix(Q, basis)
    return float(x @ C @ x - np.sum(x) ** 2)


def translation_check(t: MatrixTuple) -> tuple[float, float]:
    """Residuals of sum ||B_r||^2 = sum x_a and sum ||[B_r,B_s]||^2 = sum x_a x_b C_ab."""
    v = vectorize(t)
    fr = spectral_frame(v)
    C = coefficient_matrix(fr.Q, v.basis)
    r1 = abs(norm_sum(t) - float(np.sum(fr.x)))
    r2 = abs(comm_norm_sum(t) - float(fr.x @ C @ fr.x))
    return r1, r2


def pipeline_value(t: MatrixTuple) -> float:
    """f_Q at the spectral frame of t; equals comm_norm_sum(t) - norm_sum(t)^2."""
    v = vectorize(t)
    fr = spectral_frame(v)
    return f_eval(fr.Q, fr.x, v.basis)


# --- maximization over the truncated simplex -------------------------------


@dataclass(frozen=True)
class SimplexRegion:
    """Delta_eps = {x : sum x = 1, x_a >= eps}."""

    N: int
    epsilon: float = 0.0

    def __post_init__(self):
        if self.N < 1:
            raise DimensionError("N must be positive")
        if self.epsilon < 0 or self.epsilon * self.N > 1 + 1e-12:
            raise ValueError(f"empty region: eps * N = {self.epsilon * self.N} > 1")

    @property
    def width(self) -> float:
        return max(0.0, 1.0 - self.N * self.epsilon)

    def to_simplex(self, y: np.ndarray) -> np.ndarray:
        return self.epsilon + self.width * y


@dataclass(frozen=True)
class SimplexConfig:
    starts: int = 64
    iterations: int = 5000
    tol: float = 1e-13
    seed: int = 0
    oracle_max_n: int = 6
    margin: float = 1e-10


@dataclass(frozen=True)
class SimplexMaxResult:
    x: np.ndarray
    value: float
    method: str
    gradient_value: float
    oracle_value: float | None
    converged: bool


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {y >= 0, sum y = 1}."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / k > 0)[0][-1]
    theta = css[rho] / (rho + 1)
    return np.maximum(v - theta, 0.0)


def _face_stationary(M: np.ndarray, support) -> np.ndarray | None:
    """Stationary point of y^t M y on the affine hull of a face, or None."""
    S = list(support)
    k = len(S)
    K = np.zeros((k + 1, k + 1))
    K[:k, :k] = 2.0 * M[np.ix_(S, S)]
    K[:k, k] = -1.0
    K[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    sol, *_ = np.linalg.lstsq(K, rhs, rcond=None)
    if np.abs(K @ sol - rhs).max() > 1e-9 * (1.0 + np.abs(K).max()):
        return None
    y = np.zeros(M.shape[0])
    y[S] = sol[:k]
    return y


def face_oracle(M: np.ndarray) -> tuple[np.ndarray, float]:
    """Exact max of y^t M y over the simplex by enumerating every face's KKT point."""
    N = M.shape[0]
    best_y, best_val = None, -np.inf
    for k in range(1, N + 1):
        for S in itertools.combinations(range(N), k):
            y = _face_stationary(M, S)
            if y is None or y.min() < -1e-12:
                continue
            y = np.maximum(y, 0.0)
            y /= y.sum()
            val = float(y @ M @ y)
            if val > best_val:
                best_y, best_val = y, val
    return best_y, best_val


def _starting_points(N: int, count: int, rng: np.random.Generator) -> list[np.ndarray]:
    pts = [np.full(N, 1.0 / N)]
    pts += list(np.eye(N))
    for a, b in itertools.combinations(range(N), 2):
        y = np.zeros(N)
        y[[a, b]] = 0.5
        pts.append(y)
    pts = pts[:count]
    while len(pts) < count:
        pts.append(rng.dirichlet(np.ones(N)))
    return pts


def _ascend(M: np.ndarray, y: np.ndarray, step: float, iters: int, tol: float):
    val = float(y @ M @ y)
    for _ in range(iters):
        y_new = project_simplex(y + step * 2.0 * (M @ y))
        new_val = float(y_new @ M @ y_new)
        if np.abs(y_new - y).max() <= tol:
            return y_new, max(new_val, val), True
        y, val = y_new, new_val
    return y, val, False


def _polish(M: np.ndarray, y: np.ndarray, val: float):
    support = np.nonzero(y > 1e-9)[0]
    cand = _face_stationary(M, support)
    if cand is None or cand.min() < -1e-12:
        return y, val
    cand = np.maximum(cand, 0.0)
    cand /= cand.sum()
    cval = float(cand @ M @ cand)
    return (cand, cval) if cval >= val else (y, val)


def simplex_max(Q, region: SimplexRegion, cfg: SimplexConfig = SimplexConfig(), basis: SymBasis | None = None) -> SimplexMaxResult:
    """Maximize f_Q over Delta_eps.

    Multi-start projected gradient ascent (vertices, edge midpoints, barycenter,
    random Dirichlet points) with a KKT polish on the final face. For N <= 6 the
    exact face-enumeration oracle also runs and the better value wins.
    """
    Q = np.asarray(Q, dtype=float)
    if basis is None:
        n = int(round((math.sqrt(8 * Q.shape[0] + 1) - 1) / 2))
        basis = sym_basis(n)
    if basis.N != region.N:
        raise DimensionError("region and basis disagree on N")
    N = region.N
    C = coefficient_matrix(Q, basis)
    # on sum x = 1 the form is x^t (C - 11^t) x; substitute x = eps + w y
    Mx = C - np.ones((N, N))
    w, eps = region.width, region.epsilon
    if w == 0.0:
        x = np.full(N, eps)
        val = float(x @ Mx @ x)
        return SimplexMaxResult(x, val, "degenerate", val, val, True)
    e = np.full(N, eps)
    # quadratic in y: (e + w y)^t Mx (e + w y), homogenized with sum y = 1
    lin = w * (Mx @ e)
    My = w * w * Mx + np.outer(lin, np.ones(N)) + np.outer(np.ones(N), lin) + float(e @ Mx @ e)
    My = 0.5 * (My + My.T)

    L = 2.0 * np.abs(np.linalg.eigvalsh(My)).max()
    step = 1.0 / L if L > 0 else 1.0
    rng = np.random.default_rng(cfg.seed)
    best_y, best_val, all_converged = None, -np.inf, True
    for y0 in _starting_points(N, cfg.starts, rng):
        y, val, conv = _ascend(My, y0, step, cfg.iterations, cfg.tol)
        y, val = _polish(My, y, val)
        all_converged &= conv
        if val > best_val:
            best_y, best_val = y, val
    grad_val = best_val
    method = "gradient"
    oracle_val = None
    if N <= cfg.oracle_max_n:
        oy, oracle_val = face_oracle(My)
        if oracle_val > best_val:
            best_y, best_val, method = oy, oracle_val, "face_oracle"
    x = region.to_simplex(best_y)
    return SimplexMaxResult(x, float(x @ Mx @ x), method, grad_val, oracle_val, all_converged)


@dataclass(frozen=True)
class MembershipResult:
    member: bool
    value: float
    certificate: np.ndarray | None
    margin: float


def g_epsilon_member(Q, epsilon: float, cfg: SimplexConfig = SimplexConfig(), basis: SymBasis | None = None) -> MembershipResult:
    """Numerical test of f_Q < 0 on Delta_eps.

    A negative answer carries the maximizer as certificate; it is sound when
    f at the certificate is >= 0. A positive answer is heuristic.
    """
    Q = np.asarray(Q, dtype=float)
    res = simplex_max(Q, SimplexRegion(Q.shape[0], epsilon), cfg, basis)
    member = res.value < -cfg.margin
    return MembershipResult(member, res.value, None if member else res.x, cfg.margin)
