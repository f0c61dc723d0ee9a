"""Dense matrix tuples, Frobenius products, commutators and the O(n) x O(m) action."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

TOL_SYM = 1e-9
TOL_ORTH = 1e-9


class DimensionError(ValueError):
    """Raised when matrix shapes do not line up."""


class ValidationError(ValueError):
    """Raised when an input violates a symmetry or orthogonality contract."""


class SymmetryClass(enum.Enum):
    SYMMETRIC = "symmetric"
    SKEW = "skew"


def _as_symmetry(symmetry) -> SymmetryClass:
    if isinstance(symmetry, SymmetryClass):
        return symmetry
    return SymmetryClass(str(symmetry).lower())


@dataclass(frozen=True, eq=False)
class MatrixTuple:
    """An ordered tuple (B_1, ..., B_m) of real n x n matrices.

    ``mats`` is stored as a read-only array of shape (m, n, n).
    """

    mats: np.ndarray
    symmetry: SymmetryClass = SymmetryClass.SYMMETRIC

    def __post_init__(self):
        mats = np.array(self.mats, dtype=float)
        if mats.ndim == 2:
            mats = mats[None]
        if mats.ndim != 3 or mats.shape[0] < 1 or mats.shape[1] != mats.shape[2] or mats.shape[1] < 1:
            raise DimensionError(f"expected shape (m, n, n), got {mats.shape}")
        if not np.all(np.isfinite(mats)):
            raise ValidationError("matrix entries must be finite")
        symmetry = _as_symmetry(self.symmetry)
        sign = 1.0 if symmetry is SymmetryClass.SYMMETRIC else -1.0
        scale = max(1.0, float(np.abs(mats).max(initial=0.0)))
        err = np.abs(mats - sign * mats.transpose(0, 2, 1)).max(initial=0.0)
        if err > TOL_SYM * scale:
            raise ValidationError(f"matrices are not {symmetry.value} (deviation {err:.3e})")
        mats.setflags(write=False)
        object.__setattr__(self, "mats", mats)
        object.__setattr__(self, "symmetry", symmetry)

    @property
    def n(self) -> int:
        return self.mats.shape[1]

    @property
    def m(self) -> int:
        return self.mats.shape[0]

    def __len__(self):
        return self.m

    def __getitem__(self, r):
        return self.mats[r]

    def __iter__(self):
        return iter(self.mats)

    def scaled(self, s: float) -> MatrixTuple:
        return MatrixTuple(s * self.mats, self.symmetry)


@dataclass(frozen=True, eq=False)
class GroupElement:
    """(P, R) in O(n) x O(m)."""

    P: np.ndarray
    R: np.ndarray

    def __post_init__(self):
        P = np.array(self.P, dtype=float)
        R = np.array(self.R, dtype=float)
        for name, M in (("P", P), ("R", R)):
            if M.ndim != 2 or M.shape[0] != M.shape[1]:
                raise DimensionError(f"{name} must be square, got {M.shape}")
            err = np.abs(M.T @ M - np.eye(M.shape[0])).max()
            if err > TOL_ORTH:
                raise ValidationError(f"{name} is not orthogonal (deviation {err:.3e})")
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "R", R)

    @classmethod
    def identity(cls, n: int, m: int) -> GroupElement:
        return cls(np.eye(n), np.eye(m))


def frob_inner(A, B) -> float:
    """Frobenius inner product trace(A B^t)."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.shape != B.shape:
        raise DimensionError(f"shape mismatch {A.shape} vs {B.shape}")
    return float(np.sum(A * B))


def commutator(A, B) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape != B.shape:
        raise DimensionError(f"commutator needs equal square shapes, got {A.shape} and {B.shape}")
    return A @ B - B @ A


def pairwise_commutators(mats: np.ndarray) -> np.ndarray:
    """All brackets [B_r, B_s] for an array of shape (..., m, n, n); result (..., m, m, n, n)."""
    prod = np.einsum("...rij,...sjk->...rsik", mats, mats)
    return prod - np.swapaxes(prod, -3, -4)


def comm_norm_sum_array(mats: np.ndarray) -> np.ndarray:
    """Sum over ordered pairs of ||[B_r, B_s]||^2, batched over leading axes."""
    comms = pairwise_commutators(mats)
    return np.sum(comms * comms, axis=(-4, -3, -2, -1))


def norm_sum_array(mats: np.ndarray) -> np.ndarray:
    return np.sum(mats * mats, axis=(-3, -2, -1))


def comm_norm_sum(t: MatrixTuple) -> float:
    """Sum of ||[B_r, B_s]||^2 over all ordered pairs (r, s).

    Each unordered pair is counted twice; diagonal terms vanish.
    """
    return float(comm_norm_sum_array(t.mats))


def norm_sum(t: MatrixTuple) -> float:
    return float(norm_sum_array(t.mats))


def act(g: GroupElement, t: MatrixTuple) -> MatrixTuple:
    """(P, R) . (B_1..B_m) = (P^t B_1 P, ..., P^t B_m P) R."""
    if g.P.shape[0] != t.n or g.R.shape[0] != t.m:
        raise DimensionError(
            f"group element of size ({g.P.shape[0]}, {g.R.shape[0]}) cannot act on tuple ({t.n}, {t.m})"
        )
    conj = np.einsum("ai,rab,bj->rij", g.P, t.mats, g.P)
    mixed = np.einsum("sr,sij->rij", g.R, conj)
    return MatrixTuple(_restore_symmetry(mixed, t.symmetry), t.symmetry)


def _restore_symmetry(mats: np.ndarray, symmetry: SymmetryClass) -> np.ndarray:
    if symmetry is SymmetryClass.SYMMETRIC:
        return 0.5 * (mats + np.swapaxes(mats, -1, -2))
    return 0.5 * (mats - np.swapaxes(mats, -1, -2))


def center(t: MatrixTuple) -> MatrixTuple:
    """Remove the pure-trace part (trace/n) I from every matrix."""
    if t.symmetry is not SymmetryClass.SYMMETRIC:
        raise ValidationError("center() applies to symmetric tuples only")
    traces = np.trace(t.mats, axis1=1, axis2=2)
    out = t.mats - (traces / t.n)[:, None, None] * np.eye(t.n)
    return MatrixTuple(out, t.symmetry)


def random_mats(rng: np.random.Generator, n: int, m: int, symmetry, traceless: bool = False) -> np.ndarray:
    """Raw (m, n, n) array; Gaussian entries projected onto the symmetry class."""
    symmetry = _as_symmetry(symmetry)
    A = rng.standard_normal((m, n, n))
    A = _restore_symmetry(A, symmetry)
    if traceless and symmetry is SymmetryClass.SYMMETRIC:
        A = A - (np.trace(A, axis1=1, axis2=2) / n)[:, None, None] * np.eye(n)
    return A


def random_tuple(n: int, m: int, symmetry=SymmetryClass.SYMMETRIC, seed=None, traceless: bool = False) -> MatrixTuple:
    """Seeded random tuple. ``seed`` may be an int, a sequence of ints or a Generator."""
    if n < 1 or m < 1:
        raise DimensionError("n and m must be positive")
    rng = np.random.default_rng(seed)
    return MatrixTuple(random_mats(rng, n, m, symmetry, traceless), symmetry)


def random_orthogonal(k: int, seed=None, special: bool = False) -> np.ndarray:
    """Haar-distributed k x k orthogonal matrix (QR of a Gaussian with sign-fixed diagonal)."""
    if k < 1:
        raise DimensionError("k must be positive")
    rng = np.random.default_rng(seed)
    Z = rng.standard_normal((k, k))
    Q, R = np.linalg.qr(Z)
    d = np.sign(np.diag(R))
    d[d == 0] = 1.0
    Q = Q * d
    if special and np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q


def random_group_element(n: int, m: int, seed=None) -> GroupElement:
    rng = np.random.default_rng(seed)
    return GroupElement(random_orthogonal(n, rng), random_orthogonal(m, rng))
