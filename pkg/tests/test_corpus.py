import json
from fractions import Fraction

import numpy as np
import pytest

from fracnodal.blowup import classify_point
from fracnodal.corpus import build_corpus, exact_truth, get_entry, harmonic_planar
from fracnodal.monotonicity import mean_value_defect
from fracnodal.poly import MultiPoly, apply_La, planar_even
from fracnodal.sharm1d import verify_order

A_VALUES = [Fraction(-1, 2), Fraction(1, 3)]


@pytest.fixture(scope="module", params=A_VALUES, ids=str)
def corpus(request):
    return request.param, build_corpus(request.param, solver_N=33)


def test_names_unique(corpus):
    _, E = corpus
    names = [e.name for e in E]
    assert len(names) == len(set(names))
    assert {e.kind for e in E} == {"exact", "composite", "solver", "sharm1d"}
    with pytest.raises(KeyError):
        get_entry(E, "nope")


def test_polynomial_entries_are_solutions(corpus):
    a, E = corpus
    for e in E:
        if e.kind not in ("exact", "composite"):
            continue
        even, odd = e.parts
        if even is not None:
            assert apply_La(even, a).is_zero(), e.name
        if odd is not None:
            assert apply_La(odd, 2 - a).is_zero(), e.name


def test_ground_truth_matches_classifier(corpus):
    _, E = corpus
    for e in E:
        if e.kind not in ("exact", "composite"):
            continue
        for pt in e.points:
            c = classify_point(e.field(), np.array(pt.point))
            assert c.k == pytest.approx(pt.order, abs=1e-9), e.name
            assert (c.parity, c.stratum, c.spine_dim) == (pt.parity, pt.stratum, pt.spine_dim), e.name


def test_homogeneous_degree_matches_truth(corpus):
    _, E = corpus
    for e in E:
        if e.kind == "exact" and e.degree is not None and all(v == 0 for v in e.points[0].point):
            assert e.points[0].order == pytest.approx(e.degree), e.name


def test_solver_entries_are_solutions(corpus):
    _, E = corpus
    solver = [e for e in E if e.kind == "solver"]
    assert len(solver) == 3
    for e in solver:
        f = e.field()
        assert mean_value_defect(f, r=0.5) < 1e-3
        assert e.recipe is not None


def test_sharm_entries(corpus):
    a, E = corpus
    s = float((1 - a) / 2)
    for k in (1, 2, 3):
        e = get_entry(E, f"sharm1d_order_{k}")
        rep = verify_order(e.field(), k, s)
        assert rep["slope"] == pytest.approx(2 * k, abs=0.05)


def test_summary_is_json(corpus):
    _, E = corpus
    text = json.dumps([e.summary() for e in E])
    assert "planar_even_2" in text


def test_exact_truth_examples():
    a = Fraction(1, 3)
    x = MultiPoly.variable(0, 2)
    t = exact_truth(x, None, a, (0, 0))
    assert (t.order, t.stratum) == (1, "regular-orthogonal")
    t = exact_truth(None, MultiPoly.constant(1), a, (0, 0))
    assert t.stratum == "regular-tangential" and t.parity == "antisymmetric"
    t = exact_truth(planar_even(2, a), None, a, (0, 0))
    assert t.stratum == "Gamma^a_2"
    t = exact_truth(harmonic_planar(3), None, 0, (0, 0))
    assert t.stratum == "Gamma^a_3" and t.spine_dim == 0
    t = exact_truth(MultiPoly({(1, 1, 0): 1}, 3), None, a, (0, 0, 0))
    assert t.stratum == "Gamma*_2" and t.spine_dim == 0


def test_harmonic_family_only_at_zero():
    names = {e.name for e in build_corpus(0, solver=False, sharm=False)}
    assert {f"harmonic_{k}" for k in range(1, 7)} <= names
    names = {e.name for e in build_corpus(Fraction(1, 3), solver=False, sharm=False)}
    assert not any(n.startswith("harmonic_") and n[-1].isdigit() for n in names)


def test_max_degree_limit():
    with pytest.raises(ValueError):
        build_corpus(0, max_degree=12)
    E = build_corpus(0, max_degree=10, solver=False, sharm=False)
    assert get_entry(E, "planar_even_10").degree == 10
