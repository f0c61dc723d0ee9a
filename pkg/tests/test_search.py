import numpy as np
import pytest

from ddvv.inequality import defect, sharp_constant
from ddvv.matrix_core import MatrixTuple, comm_norm_sum_array, random_mats
from ddvv.normal_form import Kind, make_symmetric_pair
from ddvv.search import (
    BudgetExceeded,
    SearchConfig,
    ascend_ratio,
    brute_oracle,
    comm_gradient,
    enumerate_tuples,
    fuzz_inequality,
    ratio_gradient,
)


def test_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(3, 3, trials=0)
    with pytest.raises(ValueError):
        SearchConfig(3, 3, step_init=0.0)


def test_fuzz_deterministic_and_clean():
    cfg = SearchConfig(3, 2, trials=1, seed=17)
    assert fuzz_inequality(cfg).as_dict() == fuzz_inequality(cfg).as_dict()
    s = fuzz_inequality(SearchConfig(4, 3, "skew", trials=500, seed=2))
    assert s.ok and s.min_relative_defect >= -1e-9 and sum(s.histogram) == 500


def _fd_direction(f, B, E, h=1e-6):
    return (f(B + h * E) - f(B - h * E)) / (2 * h)


@pytest.mark.parametrize("sym", ["symmetric", "skew"])
def test_comm_gradient_finite_differences(sym):
    rng = np.random.default_rng(4)
    for _ in range(10):
        B = random_mats(rng, 4, 3, sym)
        E = random_mats(rng, 4, 3, sym)
        fd = _fd_direction(lambda X: float(comm_norm_sum_array(X)), B, E)
        an = float(np.sum(comm_gradient(B) * E))
        assert an == pytest.approx(fd, rel=1e-6)


def test_gradient_sign_matches_double_bracket():
    B = random_mats(np.random.default_rng(0), 3, 3, "symmetric")
    double = sum(B[s] @ (B[0] @ B[s] - B[s] @ B[0]) - (B[0] @ B[s] - B[s] @ B[0]) @ B[s] for s in range(3))
    np.testing.assert_allclose(comm_gradient(B)[0], -4 * double, atol=1e-12)


def test_ascent_from_perturbed_maximizer():
    rng = np.random.default_rng(1)
    t = make_symmetric_pair(3, 3, 1.0)
    start = MatrixTuple(t.mats + 0.05 * random_mats(rng, 3, 3, "symmetric"))
    res = ascend_ratio(SearchConfig(3, 3, record_trajectory=True), start)
    assert res.best_ratio >= 1 - 1e-6
    assert res.classified.kind is Kind.SYMMETRIC_PAIR
    ratios = [r for _, r in res.trajectory]
    assert all(b >= a for a, b in zip(ratios, ratios[1:]))


def test_ascent_skew3():
    res = ascend_ratio(SearchConfig(3, 3, "skew", trials=4, seed=3))
    assert res.best_ratio == pytest.approx(1.0, abs=1e-6)
    assert res.classified.kind is Kind.SKEW_TRIPLE3


def test_ascent_rejects_zero_start():
    with pytest.raises(ValueError):
        ascend_ratio(SearchConfig(2, 2), MatrixTuple(np.zeros((2, 2, 2))))


def test_brute_oracle_examples():
    res = brute_oracle(2, 2, "symmetric", [-1, 0, 1])
    assert res.max_ratio == 1.0 and res.count == 3**6
    assert brute_oracle(2, 1, "symmetric", [-1, 0, 1]).max_ratio == 0.0
    z = brute_oracle(2, 2, "symmetric", [0])
    assert z.max_ratio == 0.0 and z.argmax is None and z.count == 1
    with pytest.raises(BudgetExceeded) as exc:
        brute_oracle(3, 3, "symmetric", range(5))
    assert exc.value.count == 5**18


def test_oracle_arithmetic_agrees_with_defect():
    k = sharp_constant(3, "skew")
    for mats, lhs, bound in enumerate_tuples(3, 2, "skew", [-1, 1]):
        rep = defect(MatrixTuple(np.array(mats), "skew"))
        assert rep.lhs == pytest.approx(lhs, abs=1e-12)
        assert rep.bound == pytest.approx(bound, abs=1e-12)
        assert rep.constant_used == k


def test_ratio_gradient_scale_invariant():
    B = random_mats(np.random.default_rng(3), 3, 2, "symmetric")
    _, g = ratio_gradient(B, 1.0)
    assert abs(np.sum(g * B)) <= 1e-12
