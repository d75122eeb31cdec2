import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fracnodal.quadrature import (
    NonIntegrableWeight, WeightParam, ball_measure_const, integrate_ball, integrate_segment,
    integrate_sphere, sphere_measure_const, sphere_rule,
)
from fracnodal.poly import MultiPoly, weighted_moment

# 4 * int_0^{pi/2} sin(t)^{1/2} dt, mpmath oracle
S1_HALF = 4.79256093894236882976


def one(X):
    return np.ones(len(X))


def test_sphere_constants_trivial():
    assert sphere_measure_const(1, 0.0) == pytest.approx(2 * math.pi, rel=1e-15)
    assert sphere_measure_const(2, 0.0) == pytest.approx(4 * math.pi, rel=1e-15)


def test_sphere_constant_weighted_oracle():
    assert sphere_measure_const(1, 0.5) == pytest.approx(S1_HALF, rel=1e-14)


def test_non_integrable_weight():
    with pytest.raises(NonIntegrableWeight):
        sphere_measure_const(1, -1.0)
    with pytest.raises(NonIntegrableWeight):
        WeightParam(-1.2, 1)
    with pytest.raises(ValueError):
        WeightParam(0.0, 0)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("a", [-0.5, 0.0, 1 / 3, 0.5])
def test_constant_integrand(n, a):
    w = WeightParam(a, n)
    assert integrate_sphere(one, None, 1.0, w) == pytest.approx(sphere_measure_const(n, a), rel=1e-13)
    assert integrate_ball(one, None, 1.0, w) == pytest.approx(sphere_measure_const(n, a) / (n + a + 1), rel=1e-13)
    assert integrate_ball(one, None, 0.5, w) == pytest.approx(ball_measure_const(n, a, 0.5), rel=1e-13)


def test_sphere_scaling_unweighted():
    w = WeightParam(0.0, 1)
    assert integrate_sphere(one, None, 2.0, w) == pytest.approx(4 * math.pi, rel=1e-14)


def test_y_squared_on_circle():
    w = WeightParam(0.0, 1)
    assert integrate_sphere(lambda X: X[:, 1] ** 2, None, 1.0, w) == pytest.approx(math.pi, rel=1e-14)


def test_radius_squared_on_disk():
    w = WeightParam(0.0, 1)
    val = integrate_ball(lambda X: np.sum(X**2, axis=1), None, 1.0, w)
    assert val == pytest.approx(math.pi / 2, rel=1e-14)


def test_error_estimate_and_center():
    w = WeightParam(1 / 3, 1)
    val, err = integrate_sphere(lambda X: np.cos(X[:, 0]), [0.3, 0.0], 0.7, w, with_error=True)
    assert err < 1e-12
    with pytest.raises(ValueError):
        integrate_sphere(one, [0.0, 0.1], 1.0, w)
    with pytest.raises(ValueError):
        integrate_sphere(one, None, -1.0, w)


def test_nonfinite_integrand_raises():
    with pytest.raises(FloatingPointError):
        integrate_sphere(lambda X: np.full(len(X), np.nan), None, 1.0, WeightParam(0.0, 1))


def test_outside_main_range_warns():
    with pytest.warns(UserWarning):
        integrate_sphere(one, None, 1.0, WeightParam(1.5, 1))


def test_rule_is_symmetric():
    rule = sphere_rule(2, 0.5)
    refl = rule.nodes * np.array([1, 1, -1])
    # reflection in y permutes the nodes
    key = lambda P: np.round(P, 12).tolist()
    assert sorted(key(refl)) == sorted(key(rule.nodes))
    assert np.allclose(np.linalg.norm(rule.nodes, axis=1), 1.0)


def test_segment():
    val = integrate_segment(lambda P: P[:, 0] ** 2, [0.0, 0.0], [1.0, 0.0])
    assert val == pytest.approx(1 / 3, rel=1e-14)


exps = st.tuples(st.integers(0, 6), st.integers(0, 6), st.integers(0, 6))


@given(exps, st.sampled_from([-0.5, 0.0, 0.25, 0.5, 0.75]))
def test_moment_exactness(e, a):
    # product rule agrees with the exact Beta-function moments
    p = MultiPoly.monomial(e, 1)
    w = WeightParam(a, 2)
    num = integrate_sphere(lambda X: p(X), None, 1.0, w)
    ref = weighted_moment(p, 1.0, a, "sphere")
    assert num == pytest.approx(ref, rel=1e-12, abs=1e-13)
    numb = integrate_ball(lambda X: p(X), None, 1.0, w)
    assert numb == pytest.approx(weighted_moment(p, 1.0, a, "ball"), rel=1e-12, abs=1e-13)


@given(st.floats(0.1, 3.0), st.sampled_from([-0.5, 0.0, 0.5]))
def test_scaling_law(r, a):
    w = WeightParam(a, 1)
    f = lambda X: X[:, 0] ** 2 + X[:, 1] ** 4
    s1 = integrate_sphere(lambda X: f(r * X), None, 1.0, w)
    sr = integrate_sphere(f, None, r, w)
    assert sr == pytest.approx(r ** (1 + a) * s1, rel=1e-12)
