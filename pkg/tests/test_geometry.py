import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ddvv.geometry import (
    DomainError,
    ShapeOperatorSet,
    circle_agrees_with_equality,
    curvature_report,
    ellipse_circle_test,
    equality_shape_ops,
    mean_curvature,
    rho_direct,
    rho_perp,
    rho_perp_direct,
    rho_perp_via_translation,
    rho_via_translation,
    scale,
)
from ddvv.matrix_core import DimensionError, act, random_group_element, random_mats

WINTGEN_PAIR = [np.diag([1.0, -1.0]), np.array([[0.0, 1.0], [1.0, 0.0]])]


def random_shape(n, m, c, seed):
    return ShapeOperatorSet(random_mats(np.random.default_rng(seed), n, m, "symmetric"), c)


def test_mean_curvature():
    s = ShapeOperatorSet([np.eye(3), np.zeros((3, 3))])
    np.testing.assert_allclose(mean_curvature(s), [1.0, 0.0])
    assert not np.any(mean_curvature(ShapeOperatorSet(WINTGEN_PAIR)))
    assert mean_curvature(ShapeOperatorSet([np.diag([3.0, 1.0])]))[0] == 2.0


def test_rho_examples():
    umb = ShapeOperatorSet([np.eye(2)])
    assert rho_direct(umb) == 1.0 and rho_via_translation(umb) == 1.0
    geo = ShapeOperatorSet(np.zeros((2, 4, 4)), c=5.0)
    assert rho_direct(geo) == 5.0 and rho_via_translation(geo) == 5.0
    w = ShapeOperatorSet(WINTGEN_PAIR)
    assert rho_direct(w) == -2.0 and rho_via_translation(w) == -2.0


def test_rho_perp_examples():
    assert rho_perp(ShapeOperatorSet([np.diag([1.0, 2.0, 5.0])])) == 0.0
    assert rho_perp(ShapeOperatorSet([np.diag([1.0, 2.0]), np.diag([3.0, -1.0])])) == 0.0
    w = ShapeOperatorSet(WINTGEN_PAIR)
    assert rho_perp_direct(w) == 2.0
    assert rho_perp_via_translation(w) == 2.0


def test_domain_errors():
    s = ShapeOperatorSet([[[1.0]]])
    for f in (rho_direct, rho_via_translation, rho_perp, curvature_report):
        with pytest.raises(DomainError):
            f(s)
    with pytest.raises(DomainError):
        ellipse_circle_test(ShapeOperatorSet([np.eye(3)]))


def test_curvature_report_examples():
    r = curvature_report(ShapeOperatorSet([np.eye(2)]))
    assert (r.rho, r.rho_perp, r.h_norm_sq, r.wintgen_defect) == (1.0, 0.0, 1.0, 0.0)
    r = curvature_report(ShapeOperatorSet(WINTGEN_PAIR))
    assert (r.rho, r.rho_perp, r.h_norm_sq, r.wintgen_defect) == (-2.0, 2.0, 0.0, 0.0)
    r = curvature_report(random_shape(4, 3, 0.0, 9))
    assert r.wintgen_defect > 0


def test_ellipse_examples():
    assert ellipse_circle_test(ShapeOperatorSet(WINTGEN_PAIR))
    assert ellipse_circle_test(ShapeOperatorSet([np.eye(2) * 3.0]))
    assert not ellipse_circle_test(ShapeOperatorSet([np.diag([2.0, -1.0])]))


def test_equality_shape_ops_examples():
    r = curvature_report(equality_shape_ops(3, 3, 0.0))
    assert r.wintgen_defect == 0.0
    for args in [(3, 3, 1.0, 0.0, 0.0, 0.0), (4, 3, 2.0, 1.0, -1.0, 3.0)]:
        s = equality_shape_ops(*args)
        assert abs(curvature_report(s).wintgen_defect) <= 1e-10 * scale(s)
    with pytest.raises(DimensionError):
        equality_shape_ops(3, 2, 1.0, lam3=1.0)
    with pytest.raises(DimensionError):
        equality_shape_ops(3, 1, 1.0)


shapes = st.builds(
    random_shape,
    st.integers(2, 5),
    st.integers(1, 4),
    st.sampled_from([-1.0, 0.0, 1.0, 2.5]),
    st.integers(0, 2**31),
)


@settings(max_examples=100, deadline=None)
@given(shapes)
def test_path_agreement_and_inequalities(s):
    sc = scale(s)
    assert abs(rho_direct(s) - rho_via_translation(s)) <= 1e-9 * sc
    assert abs(rho_perp_direct(s) - rho_perp_via_translation(s)) <= 1e-9 * sc
    r = curvature_report(s)
    assert r.rho_perp >= 0
    assert r.wintgen_defect >= -1e-9 * sc
    assert r.chen_defect >= r.wintgen_defect


@settings(max_examples=60, deadline=None)
@given(shapes)
def test_wintgen_defect_identity(s):
    from ddvv.matrix_core import center, comm_norm_sum, norm_sum

    n = s.n
    B = center(s.as_tuple())
    expected = (norm_sum(B) - np.sqrt(comm_norm_sum(B))) / (n * (n - 1))
    assert curvature_report(s).wintgen_defect == pytest.approx(expected, abs=1e-9 * scale(s))


@settings(max_examples=60, deadline=None)
@given(shapes, st.integers(0, 2**31))
def test_frame_covariance(s, seed):
    g = random_group_element(s.n, s.m, seed)
    s2 = ShapeOperatorSet(act(g, s.as_tuple()).mats, s.c)
    a, b = curvature_report(s), curvature_report(s2)
    for f in ("rho", "rho_perp", "h_norm_sq", "wintgen_defect", "chen_defect"):
        assert getattr(b, f) == pytest.approx(getattr(a, f), abs=1e-9 * scale(s))


def _surface(u, v, h):
    return ShapeOperatorSet([h[r] * np.eye(2) + np.array([[u[r], v[r]], [v[r], -u[r]]]) for r in range(len(u))])


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 4), st.integers(0, 2**31), st.booleans())
def test_circle_iff_equality(m, seed, circle):
    rng = np.random.default_rng(seed)
    u = rng.standard_normal(m)
    v = rng.standard_normal(m)
    v -= (v @ u) / (u @ u) * u
    v *= np.linalg.norm(u) / np.linalg.norm(v)
    if not circle:
        v *= 1.0 + rng.uniform(0.1, 1.0)
    s = _surface(u, v, rng.standard_normal(m))
    assert ellipse_circle_test(s) == circle
    assert circle_agrees_with_equality(s)
    d = curvature_report(s).wintgen_defect
    if circle:
        assert d <= 1e-9 * scale(s)
    else:
        assert d > 0
