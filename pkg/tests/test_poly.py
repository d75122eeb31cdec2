import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fracnodal.poly import (
    MultiPoly, ParityError, PoleError, QuasiPoly, antisymmetric_from_symmetric, apply_La, coeff_c,
    coeff_c_gamma, decompose, extension_matrix_nullity, garofalo_extend, planar_even,
    planar_hypergeometric, planar_odd, poly_from_json, poly_to_json, symbolic_a, symmetric_basis,
    weighted_moment,
)
from fracnodal.quadrature import sphere_measure_const

X = MultiPoly.variable(0, 2)
Y = MultiPoly.variable(1, 2)


def x_only(terms, nvars):
    return MultiPoly(terms, nvars)


# -- exact families ----------------------------------------------------------
def test_coeff_c_first():
    A = symbolic_a()
    assert coeff_c(1, Fraction(1, 3), 0) == Fraction(-1, 2) / (1 + Fraction(1, 3))
    assert str(coeff_c(1, A, 0)) == "-1/(2*a + 2)"
    assert coeff_c(1, Fraction(1, 3), 1) == Fraction(1, 2)


def test_coeff_c_pole():
    with pytest.raises(PoleError):
        coeff_c(1, Fraction(-1), 0)
    with pytest.raises(ValueError):
        coeff_c(1, 0, 2)


@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_coeff_c_gamma_form(m):
    for a in (-0.5, 0.2, 0.5):
        for t in range(m + 1):
            assert float(coeff_c(m, a, t)) == pytest.approx(coeff_c_gamma(m, a, t), rel=1e-12)


def test_planar_even_two(a_exact):
    p = planar_even(2, a_exact)
    assert p == X * X / 2 - Y * Y / (2 * (1 + a_exact))
    assert planar_even(2, 0) == (X * X - Y * Y) / 2


def test_planar_even_symbolic_is_solution():
    A = symbolic_a()
    for k in (2, 4, 6):
        assert apply_La(planar_even(k, A), A).is_zero()


def test_planar_odd_three(a_exact):
    assert planar_odd(3, a_exact) == X**3 / 6 + X * Y * Y * coeff_c(1, a_exact, 0)
    assert planar_odd(3, 0) == X**3 / 6 - X * Y * Y / 2


@pytest.mark.parametrize("k", [3, 5, 7, 9])
def test_planar_odd_solves(k, a_exact):
    assert apply_La(planar_odd(k, a_exact), a_exact).is_zero()


@pytest.mark.parametrize("k", [2, 4, 6, 8, 10])
def test_planar_even_solves_and_homogeneous(k, a_exact):
    p = planar_even(k, a_exact)
    assert apply_La(p, a_exact).is_zero()
    assert p.is_homogeneous(k)
    assert p.euler() == p * k


def test_parity_errors():
    with pytest.raises(ParityError):
        planar_even(3, 0)
    with pytest.raises(ParityError):
        planar_odd(4, 0)
    with pytest.raises(ParityError):
        apply_La(Y, 0)


def test_apply_La_simple():
    assert apply_La(X, Fraction(1, 3)).is_zero()
    assert apply_La(X * X, Fraction(1, 3)) == 2


@pytest.mark.parametrize("k", range(2, 11))
@pytest.mark.parametrize("a", [Fraction(-1, 2), Fraction(3, 10), Fraction(1, 2)])
def test_hypergeometric_closed_form(k, a):
    P = np.random.default_rng(k).uniform(-1, 1, (20, 2))
    p = planar_even(k, a) if k % 2 == 0 else planar_odd(k, a)
    ref = p.to_float()(P)
    hyp = planar_hypergeometric(k, float(a), P[:, 0], P[:, 1])
    # same normalisation and sign, odd degrees included
    assert np.allclose(hyp, ref, rtol=1e-9, atol=1e-13)


# -- extension ---------------------------------------------------------------
def test_garofalo_one_term(a_exact):
    p = MultiPoly({(2, 0): Fraction(1, 2)}, 2)
    assert garofalo_extend(p, a_exact) == planar_even(2, a_exact)


def test_garofalo_harmonic_truncates(a_exact):
    p = MultiPoly({(1, 1, 0): 1}, 3)
    assert garofalo_extend(p, a_exact) == p
    p = MultiPoly({(2, 0, 0): 1, (0, 2, 0): -1}, 3)
    assert garofalo_extend(p, a_exact) == p


def test_garofalo_x1sq_x2sq():
    a = Fraction(1, 3)
    q = garofalo_extend(MultiPoly({(2, 2, 0): 1}, 3), a)
    assert len(q) == 4
    assert apply_La(q, a).is_zero()
    assert q.trace() == MultiPoly({(2, 2, 0): 1}, 3)
    # uniqueness: no nonzero even solution of degree 4 with zero trace
    assert extension_matrix_nullity(2, 4, a) == 0


def test_garofalo_rejects_y():
    with pytest.raises(ValueError):
        garofalo_extend(X + Y, 0)


poly_terms = st.dictionaries(
    st.tuples(st.integers(0, 4), st.integers(0, 4), st.just(0)),
    st.fractions(min_value=-3, max_value=3, max_denominator=7), min_size=1, max_size=5)


@given(poly_terms, st.sampled_from([Fraction(-1, 2), Fraction(0), Fraction(1, 3), Fraction(3, 4)]))
def test_garofalo_property(terms, a):
    p = MultiPoly(terms, 3)
    q = garofalo_extend(p, a)
    assert apply_La(q, a).is_zero()
    assert q.trace() == p
    assert q.even_in_y


@given(st.integers(1, 5), st.sampled_from([Fraction(-1, 2), Fraction(1, 3)]))
def test_symmetric_basis_homogeneous(k, a):
    for q in symmetric_basis(2, k, a):
        assert q.is_homogeneous(k)
        assert apply_La(q, a).is_zero()


# -- antisymmetric class -----------------------------------------------------
def test_antisymmetric_constant(a_exact):
    q = antisymmetric_from_symmetric(MultiPoly.constant(1), a_exact)
    assert q.homogeneity == 1 - a_exact
    assert q.residual().is_zero()
    P = np.array([[0.3, 0.5], [0.1, -0.2]])
    assert np.allclose(q(P), np.sign(P[:, 1]) * np.abs(P[:, 1]) ** (1 - float(a_exact)))


def test_antisymmetric_harmonic_case():
    q = antisymmetric_from_symmetric(MultiPoly.constant(1), 0)
    P = np.array([[0.3, 0.5], [0.1, -0.2]])
    assert np.allclose(q(P), P[:, 1])


def test_antisymmetric_from_planar(a_exact):
    a = a_exact
    v = planar_even(2, 2 - a)
    q = antisymmetric_from_symmetric(v, a)
    assert q.homogeneity == 3 - a
    # off-axis finite-difference residual of div(|y|^a grad u)
    af = float(a)
    h = 1e-3
    for x, y in [(0.3, 0.4), (-0.5, 0.7), (0.2, -0.6)]:
        def u(x, y):
            return float(q(np.array([[x, y]]))[0])

        def flux(y1, y2):
            ym = 0.5 * (y1 + y2)
            return abs(ym) ** af * (u(x, y2) - u(x, y1)) / h

        lap_x = (u(x + h, y) - 2 * u(x, y) + u(x - h, y)) / h**2 * abs(y) ** af
        div_y = (flux(y, y + h) - flux(y - h, y)) / h
        assert abs(lap_x + div_y) < 1e-5


def test_antisymmetric_rejects_non_solution():
    with pytest.raises(ValueError):
        antisymmetric_from_symmetric(X * X, Fraction(1, 3))
    with pytest.raises(ParityError):
        QuasiPoly(Y, 0)


# -- decomposition -----------------------------------------------------------
def _odd_factor(P, a):
    return np.sign(P[:, 1]) * np.abs(P[:, 1]) ** (1 - a)


def test_decompose_examples(rng):
    a = 1 / 3
    P = rng.uniform(-1, 1, (50, 2))
    e, o = decompose(lambda X: X[:, 0] + _odd_factor(X, a), P)
    assert np.allclose(e, P[:, 0], atol=1e-15)
    assert np.allclose(o, _odd_factor(P, a), atol=1e-15)
    pe = planar_even(2, Fraction(1, 3)).to_float()
    e, o = decompose(lambda X: pe(X), P)
    assert np.allclose(o, 0, atol=1e-15)
    e, o = decompose(lambda X: pe(X) + 3 * _odd_factor(X, a), P)
    assert np.max(np.abs(e - pe(P))) < 1e-14
    assert np.max(np.abs(o - 3 * _odd_factor(P, a))) < 1e-14


@given(st.floats(-5, 5), st.floats(-5, 5))
def test_decompose_sums_back(c1, c2):
    P = np.random.default_rng(0).uniform(-1, 1, (10, 2))
    f = lambda X: c1 * np.exp(X[:, 0] + X[:, 1]) + c2 * X[:, 1] ** 3
    e, o = decompose(f, P)
    assert np.allclose(e + o, f(P))
    Pr = P * np.array([1, -1])
    e2, o2 = decompose(f, Pr)
    assert np.allclose(e2, e) and np.allclose(o2, -o)


# -- moments -----------------------------------------------------------------
def test_weighted_moment_examples():
    one = MultiPoly.constant(1)
    a = 0.5
    assert weighted_moment(one, 0.7, a, "ball") == pytest.approx(
        0.7 ** (2 + a) / (2 + a) * sphere_measure_const(1, a), rel=1e-14)
    assert weighted_moment(X, 1.0, a) == 0.0
    assert weighted_moment(X * Y * Y, 1.0, a) == 0.0
    assert weighted_moment(Y * Y, 1.0, 0.0) == pytest.approx(math.pi, rel=1e-14)


@given(st.integers(2, 8).filter(lambda k: k % 2 == 0), st.integers(2, 8).filter(lambda k: k % 2 == 0))
def test_homogeneous_orthogonality(k, m):
    # solutions of different degrees are orthogonal on the weighted sphere
    a = Fraction(1, 3)
    p, q = planar_even(k, a), planar_even(m, a)
    val = weighted_moment(p * q, 1.0, a)
    if k != m:
        assert abs(val) < 1e-14
    else:
        assert val > 0


# -- algebra and serialisation ----------------------------------------------
def test_affine_and_json():
    p = planar_even(4, Fraction(1, 3))
    q = p.affine([Fraction(1, 2), 0])
    assert q.exact_value([Fraction(-1, 2), Fraction(1, 5)]) == p.exact_value([0, Fraction(1, 5)])
    back, head = poly_from_json(poly_to_json(p, Fraction(1, 3)))
    assert back == p
    assert head == {"a": "1/3", "n": 1, "parity": "even"}


def test_multipoly_validation():
    with pytest.raises(ValueError):
        MultiPoly({(1, 0, 0): 1}, 2)
    with pytest.raises(ValueError):
        MultiPoly({(-1, 0): 1}, 2)
    assert (X - X).is_zero()
    assert (X + 1).degree == 1
    assert X.embed(3, [0, 2]) == MultiPoly.variable(0, 3)
