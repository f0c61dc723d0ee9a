"""Fuzz campaigns, ratio ascent toward the equality locus, and a brute-force oracle."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .inequality import defect_arrays, sharp_constant
from .matrix_core import (
    MatrixTuple,
    SymmetryClass,
    _as_symmetry,
    _restore_symmetry,
    comm_norm_sum_array,
    norm_sum_array,
    pairwise_commutators,
    random_mats,
)
from .normal_form import NormalFormResult, detect

DEFECT_TOL = 1e-9


@dataclass(frozen=True)
class SearchConfig:
    n: int
    m: int
    symmetry: SymmetryClass = SymmetryClass.SYMMETRIC
    trials: int = 1
    seed: int = 0
    max_iters: int = 5000
    step_init: float = 0.5
    tol_grad: float = 1e-10
    normalize: bool = True
    classify_tol: float = 1e-6
    record_trajectory: bool = False

    def __post_init__(self):
        object.__setattr__(self, "symmetry", _as_symmetry(self.symmetry))
        if self.n < 1 or self.m < 1:
            raise ValueError("n and m must be positive")
        if self.trials < 1 or self.max_iters < 1:
            raise ValueError("trials and max_iters must be >= 1")
        if self.step_init <= 0:
            raise ValueError("step_init must be positive")


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream for trial ``index`` of a campaign seeded with ``seed``."""
    return np.random.default_rng([seed, index])


# --- fuzzing ---------------------------------------------------------------------


@dataclass
class FuzzSummary:
    n: int
    m: int
    symmetry: str
    trials: int
    constant: float
    min_relative_defect: float
    max_ratio: float
    histogram: list[int]
    violations: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "symmetry": self.symmetry,
            "trials": self.trials,
            "constant": self.constant,
            "min_relative_defect": self.min_relative_defect,
            "max_ratio": self.max_ratio,
            "min_gap_to_bound": 1.0 - self.max_ratio,
            "histogram": self.histogram,
            "violations": self.violations,
        }


def fuzz_samples(cfg: SearchConfig) -> np.ndarray:
    """All random tuples of a campaign, shape (trials, m, n, n); trial i uses stream (seed, i)."""
    return np.stack([random_mats(trial_rng(cfg.seed, i), cfg.n, cfg.m, cfg.symmetry) for i in range(cfg.trials)])


def fuzz_inequality(cfg: SearchConfig, bins: int = 10, chunk: int = 2048) -> FuzzSummary:
    k = sharp_constant(cfg.n, cfg.symmetry)
    samples = fuzz_samples(cfg)
    lhs = np.empty(cfg.trials)
    bound = np.empty(cfg.trials)
    for lo in range(0, cfg.trials, chunk):
        lhs[lo : lo + chunk], bound[lo : lo + chunk] = defect_arrays(samples[lo : lo + chunk], k)
    rel = (bound - lhs) / np.maximum(1.0, bound)
    ratio = np.divide(lhs, bound, out=np.zeros_like(lhs), where=bound > 0)
    hist, _ = np.histogram(np.clip(ratio, 0.0, 1.0), bins=bins, range=(0.0, 1.0))
    violations = [
        {"trial": int(i), "defect": float(bound[i] - lhs[i]), "matrices": samples[i].tolist()}
        for i in np.nonzero(rel < -DEFECT_TOL)[0]
    ]
    return FuzzSummary(
        n=cfg.n,
        m=cfg.m,
        symmetry=cfg.symmetry.value,
        trials=cfg.trials,
        constant=k,
        min_relative_defect=float(rel.min()),
        max_ratio=float(ratio.max()),
        histogram=[int(h) for h in hist],
        violations=violations,
    )


# --- ratio ascent ------------------------------------------------------------------


def comm_gradient(mats: np.ndarray) -> np.ndarray:
    """Euclidean gradient of sum_{r,s} ||[B_r,B_s]||^2 with respect to each B_r.

    grad_r = 4 sum_s ([B_r,B_s] B_s^t - B_s^t [B_r,B_s]), which is
    -4 sum_s [B_s,[B_r,B_s]] for symmetric and +4 sum_s [B_s,[B_r,B_s]] for
    skew tuples.
    """
    C = pairwise_commutators(mats)
    Bt = np.swapaxes(mats, -1, -2)
    return 4.0 * (np.einsum("rsij,sjk->rik", C, Bt) - np.einsum("sij,rsjk->rik", Bt, C))


def ratio_gradient(mats: np.ndarray, k: float) -> tuple[float, np.ndarray]:
    """Ratio lhs / (k ns^2) and its Euclidean gradient."""
    lhs = float(comm_norm_sum_array(mats))
    ns = float(norm_sum_array(mats))
    g_lhs = comm_gradient(mats)
    ratio = lhs / (k * ns * ns)
    grad = g_lhs / (k * ns * ns) - 4.0 * lhs * mats / (k * ns**3)
    return ratio, grad


@dataclass
class SearchResult:
    best_ratio: float
    best_tuple: MatrixTuple
    iterations: int
    classified: NormalFormResult
    trajectory: list[tuple[int, float]] | None = None
    trial: int = 0
    per_trial: list[dict] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "best_ratio": self.best_ratio,
            "iterations": self.iterations,
            "trial": self.trial,
            "classified": self.classified.kind.value,
            "parameter": self.classified.parameter,
            "residual": self.classified.residual,
            "best_tuple": self.best_tuple.mats.tolist(),
        }


def _ascend_one(mats: np.ndarray, cfg: SearchConfig, k: float):
    sym = cfg.symmetry
    mats = _restore_symmetry(mats, sym)
    mats = mats / math.sqrt(norm_sum_array(mats))
    ratio, grad = ratio_gradient(mats, k)
    step = cfg.step_init
    traj = [(0, ratio)] if cfg.record_trajectory else None
    it = 0
    for it in range(1, cfg.max_iters + 1):
        # the ratio is scale invariant, so its gradient is already tangent to the sphere
        grad = _restore_symmetry(grad, sym)
        gnorm = math.sqrt(float(np.sum(grad * grad)))
        if gnorm <= cfg.tol_grad:
            break
        while True:
            cand = mats + step * grad
            if cfg.normalize:
                cand = cand / math.sqrt(norm_sum_array(cand))
            c_ratio, c_grad = ratio_gradient(cand, k)
            if c_ratio > ratio:
                mats, ratio, grad = cand, c_ratio, c_grad
                step *= 1.5
                break
            step *= 0.5
            if step < 1e-14:
                break
        if traj is not None:
            traj.append((it, ratio))
        if step < 1e-14:
            break
    return mats, ratio, it, traj


def ascend_ratio(cfg: SearchConfig, start: MatrixTuple | None = None) -> SearchResult:
    """Gradient ascent of comm_norm_sum / (k norm_sum^2) on the unit sphere of tuple space.

    With ``start`` a single ascent is run from it; otherwise ``cfg.trials``
    random starts (trial i seeded by (seed, i)) and the best is kept, ties
    going to the lowest trial index.
    """
    k = sharp_constant(cfg.n, cfg.symmetry)
    if k == 0:
        raise ValueError("the ratio is undefined: skew matrices of size <= 2 commute")
    if start is not None:
        if float(norm_sum_array(start.mats)) == 0.0:
            raise ValueError("start tuple must be nonzero")
        starts = [np.array(start.mats)]
    else:
        starts = [random_mats(trial_rng(cfg.seed, i), cfg.n, cfg.m, cfg.symmetry) for i in range(cfg.trials)]
    best = None
    per_trial = []
    for i, s in enumerate(starts):
        mats, ratio, iters, traj = _ascend_one(s, cfg, k)
        if not math.isfinite(ratio):
            raise FloatingPointError(f"non-finite ratio in trial {i}")
        per_trial.append({"trial": i, "ratio": ratio, "iterations": iters, "mats": mats})
        if best is None or ratio > best[1]:
            best = (mats, ratio, iters, traj, i)
    mats, ratio, iters, traj, idx = best
    t = MatrixTuple(mats, cfg.symmetry)
    classified = detect(t, cfg.classify_tol)
    return SearchResult(ratio, t, iters, classified, traj, idx, per_trial)


# --- brute force -------------------------------------------------------------------

BRUTE_BUDGET = 10**7


class BudgetExceeded(ValueError):
    def __init__(self, count: int):
        super().__init__(f"enumeration of {count} tuples exceeds budget {BRUTE_BUDGET}")
        self.count = count


def _free_positions(n: int, symmetry: SymmetryClass):
    if symmetry is SymmetryClass.SYMMETRIC:
        return [(i, j) for i in range(n) for j in range(i, n)]
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def _build(values, positions, n, symmetry):
    sign = 1 if symmetry is SymmetryClass.SYMMETRIC else -1
    M = [[0.0] * n for _ in range(n)]
    for v, (i, j) in zip(values, positions):
        M[i][j] = v
        if i != j:
            M[j][i] = sign * v
    return M


def _bracket_sq(A, B, n) -> float:
    total = 0.0
    for i in range(n):
        for j in range(n):
            c = 0.0
            for p in range(n):
                c += A[i][p] * B[p][j] - B[i][p] * A[p][j]
            total += c * c
    return total


def _sq(A, n) -> float:
    return sum(A[i][j] * A[i][j] for i in range(n) for j in range(n))


def enumerate_tuples(n: int, m: int, symmetry, grid):
    """Yield (matrices, lhs, bound) for every tuple with free entries in ``grid``.

    Plain-Python arithmetic, independent of the vectorized code paths.
    """
    symmetry = _as_symmetry(symmetry)
    positions = _free_positions(n, symmetry)
    grid = list(grid)
    count = len(grid) ** (m * len(positions))
    if count > BRUTE_BUDGET:
        raise BudgetExceeded(count)
    k = sharp_constant(n, symmetry)
    per = len(positions)
    for values in itertools.product(grid, repeat=m * per):
        mats = [_build(values[r * per : (r + 1) * per], positions, n, symmetry) for r in range(m)]
        lhs = 0.0
        for r in range(m):
            for s in range(m):
                if r != s:
                    lhs += _bracket_sq(mats[r], mats[s], n)
        ns = sum(_sq(M, n) for M in mats)
        yield mats, lhs, k * ns * ns


@dataclass
class BruteResult:
    max_ratio: float
    argmax: MatrixTuple | None
    count: int


def brute_oracle(n: int, m: int, symmetry, grid) -> BruteResult:
    symmetry = _as_symmetry(symmetry)
    best_ratio, best = 0.0, None
    count = 0
    for mats, lhs, bound in enumerate_tuples(n, m, symmetry, grid):
        count += 1
        if bound > 0:
            ratio = lhs / bound
            if ratio > best_ratio:
                best_ratio, best = ratio, mats
    arg = MatrixTuple(np.array(best), symmetry) if best is not None else None
    return BruteResult(best_ratio, arg, count)
