from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fracnodal.blowup import (
    NotANodalPoint, admissible_orders, blowup_sequence, classify_point, part_basis, rescale, snap_order,
    spine_dimension, tangent_field, tangent_map_fit, vanishing_order,
)
from fracnodal.fields import poly_field
from fracnodal.poly import MultiPoly, garofalo_extend, planar_even, planar_odd
from fracnodal.solver import GridDomain, solve_extension

X = MultiPoly.variable(0, 2)
ONE = MultiPoly.constant(1)
A_FLOATS = [-0.5, 1 / 3]


def _a(a):
    return Fraction(a).limit_denominator(6)


@pytest.mark.parametrize("k", [2, 4])
def test_rescale_homogeneous_is_identity(k):
    a = 1 / 3
    u = poly_field(a, even=planar_even(k, _a(a)))
    P = np.random.default_rng(0).uniform(-1, 1, (30, 2))
    for r in (0.1, 0.7):
        v = rescale(u, None, r, mode="k", k=k)
        assert np.allclose(v(P), u(P), rtol=1e-12, atol=1e-14)


def test_rescale_taylor_rate():
    u = poly_field(0.0, even=X + X**3)
    P = np.random.default_rng(1).uniform(-1, 1, (200, 2))
    errs = [np.max(np.abs(rescale(u, None, r, mode="k", k=1)(P) - P[:, 0])) for r in (0.1, 0.05)]
    assert errs[0] < 0.011 and errs[0] / errs[1] == pytest.approx(4.0, rel=1e-6)


def test_rescale_modes():
    u = poly_field(0.0, even=X)
    with pytest.raises(ValueError):
        rescale(u, None, 0.5, mode="k")
    with pytest.raises(ValueError):
        rescale(u, None, 0.5, mode="zz")
    seq = blowup_sequence(u, None, [0.1, 0.5, 0.25])
    assert list(seq.radii) == [0.5, 0.25, 0.1]
    # H-normalised blow-ups have unit sphere norm
    assert np.allclose(seq.sphere_norms(), 1.0)


@pytest.mark.parametrize("a", A_FLOATS)
def test_vanishing_order_examples(a):
    k_raw, k, par = vanishing_order(poly_field(a, even=planar_even(2, _a(a))))
    assert (k, par) == (2.0, "symmetric") and abs(k_raw - 2) < 1e-8
    k_raw, k, par = vanishing_order(poly_field(a, odd=ONE))
    assert (k, par) == (pytest.approx(1 - a), "antisymmetric")
    k_raw, k, par = vanishing_order(poly_field(a, odd=X))
    assert (k, par) == (pytest.approx(2 - a), "antisymmetric")


def test_not_a_nodal_point():
    with pytest.raises(NotANodalPoint):
        vanishing_order(poly_field(0.5, even=X + 1))


def test_snap_order():
    assert snap_order(2.004, 1 / 3)[:2] == (2.0, "symmetric")
    k, par, _ = snap_order(1.67, 1 / 3)
    assert par == "antisymmetric" and k == pytest.approx(5 / 3)
    assert snap_order(2.3, 1 / 3)[1] is None
    # lattices coincide at a = 0
    assert snap_order(1.0, 0.0)[2]
    sym, anti = admissible_orders(0.5, 4)
    assert list(sym) == [1, 2, 3, 4] and list(anti) == [0.5, 1.5, 2.5, 3.5]


@given(st.integers(1, 8), st.sampled_from([-0.5, -0.25, 0.25, 1 / 3, 0.5]), st.floats(-0.009, 0.009))
def test_snap_property(k, a, eps):
    assert snap_order(k + eps, a)[:2] == (float(k), "symmetric")
    kk, par, _ = snap_order(k - a + eps, a)
    assert par == "antisymmetric" and kk == pytest.approx(k - a)


@pytest.mark.parametrize("a", A_FLOATS)
def test_tangent_fit_recovers_own_coefficients(a):
    p = planar_even(2, _a(a))
    fit = tangent_map_fit(poly_field(a, even=p), None, 2, "symmetric")
    assert fit.residual <= 1e-8
    diff = (fit.polynomial - p.to_float()).to_float()
    assert max((abs(float(c)) for _, c in diff), default=0.0) <= 1e-8


def test_tangent_fit_separates_higher_terms():
    a = 1 / 3
    p = planar_even(2, _a(a))
    u = poly_field(a, even=p + planar_odd(3, _a(a)))
    res = [tangent_map_fit(u, None, 2, "symmetric", radius=r).residual for r in (0.1, 0.05, 0.025)]
    assert res[0] > res[1] > res[2]
    assert res[1] / res[2] == pytest.approx(2.0, rel=0.05)


def test_tangent_fit_errors():
    u = poly_field(0.0, even=X)
    with pytest.raises(ValueError):
        tangent_map_fit(u, None, 1, "mixed")
    with pytest.raises(ValueError):
        tangent_map_fit(u, None, 1, "antisymmetric")
    with pytest.raises(ValueError):
        part_basis(1, 1.5, 0.0, "symmetric")


@pytest.mark.parametrize("a", A_FLOATS)
def test_tangent_field_examples(a):
    tf = tangent_field(poly_field(a, even=X, odd=ONE))
    assert tf.k_even == 1 and tf.k_odd == pytest.approx(1 - a)
    tf = tangent_field(poly_field(a, even=planar_even(2, _a(a))))
    assert tf.odd is None and tf.k_odd == np.inf
    tf = tangent_field(poly_field(a, even=planar_even(2, _a(a)), odd=X))
    assert tf.k_even == 2 and tf.k_odd == pytest.approx(2 - a)


@pytest.mark.parametrize("a", A_FLOATS)
def test_classify_examples(a):
    af = _a(a)
    assert classify_point(poly_field(a, even=X)).stratum == "regular-orthogonal"
    assert classify_point(poly_field(a, odd=ONE)).stratum == "regular-tangential"
    # planar family extended trivially in x2
    p3 = planar_even(2, af).embed(3, [0, 2])
    c = classify_point(poly_field(a, even=p3))
    assert c.stratum == "Gamma^a_2" and c.spine_dim == 1
    q = garofalo_extend(MultiPoly({(2, 0, 0): 1, (0, 2, 0): -1}, 3), af)
    c = classify_point(poly_field(a, even=q))
    assert c.stratum == "Gamma*_2" and c.spine_dim == 0
    js = c.to_json()
    assert js["k_snapped"] == 2.0 and js["k_odd"] is None


def test_classify_shifted_point():
    a = 1 / 3
    p = planar_even(2, _a(a)).affine([Fraction(-1, 4), 0])  # vanishing block centred at x = 1/4
    c = classify_point(poly_field(a, even=p), [0.25, 0.0])
    assert c.k == 2.0 and c.stratum == "Gamma^a_2"


@given(st.floats(0.1, 10.0))
def test_classification_scale_invariant(c):
    a = 1 / 3
    u = poly_field(a, even=planar_even(2, _a(a)), odd=X)
    base = classify_point(u)
    other = classify_point(u * c)
    assert (other.k, other.parity, other.stratum, other.spine_dim) == (base.k, base.parity, base.stratum,
                                                                      base.spine_dim)


def test_spine_dimension_direct():
    assert spine_dimension(None, 2) == 2
    a = Fraction(1, 3)
    q = garofalo_extend(MultiPoly({(1, 1, 0): 1}, 3), a)
    fit = tangent_map_fit(poly_field(float(a), even=q), None, 2, "symmetric")
    assert spine_dimension(fit, 2) == 0


def test_solver_tangent_map_cross_term():
    a = 1 / 3
    p = MultiPoly({(1, 1, 0): 1}, 3)
    f = solve_extension(p + MultiPoly({(3, 1, 0): 1, (1, 3, 0): -1}, 3), a=a,
                        grid=GridDomain.square(17, n=2), tol=1e-9).as_field()
    fit = tangent_map_fit(f, None, 2, "symmetric", radius=0.05)
    coefs = dict(zip(map(tuple, fit.exponents), fit.coefficients))
    big = coefs[(1, 1, 0)]
    others = [abs(v) for e, v in coefs.items() if e != (1, 1, 0)]
    assert abs(big) > 0.5 and max(others) < 1e-2 * abs(big)
