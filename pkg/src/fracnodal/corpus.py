"""Named test fields with ground-truth records.

Ground truths for polynomial entries are computed exactly from the
polynomials (lowest homogeneous blocks after shifting to the point); solver
entries use symmetry arguments; 1-D entries use the moment construction.
Each value is tagged with how it is known: 'theory' (a known result),
'trivial' (by inspection) or 'derived' (an independent exact computation).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dfield
from fractions import Fraction
from typing import Callable

import numpy as np
import sympy

from .fields import LaField
from .nodal import real_root_count
from .poly import MultiPoly, garofalo_extend, planar_even, planar_odd
from .sharm1d import construct_order
from .solver import GridDomain, solve_extension


@dataclass
class PointTruth:
    point: tuple
    order: float
    parity: str
    stratum: str
    spine_dim: int
    provenance: dict = dfield(default_factory=dict)


@dataclass
class CorpusEntry:
    name: str
    kind: str  # exact | composite | solver | sharm1d
    a: float
    n: int
    build: Callable = dfield(repr=False)
    degree: float | None = None  # homogeneity for homogeneous entries
    points: list = dfield(default_factory=list)
    nodal_length: float | None = None  # in the unit disk (planar entries)
    provenance: dict = dfield(default_factory=dict)
    parts: tuple = dfield(default=(None, None), repr=False)
    recipe: tuple | None = dfield(default=None, repr=False)  # (boundary data, parity) for solver entries

    _cache: object = dfield(default=None, repr=False, compare=False)

    def field(self):
        if self._cache is None:
            self._cache = self.build()
        return self._cache

    def summary(self):
        return {"name": self.name, "kind": self.kind, "a": self.a, "n": self.n, "degree": self.degree,
                "nodal_length": self.nodal_length,
                "points": [{"X0": list(p.point), "order": p.order, "parity": p.parity, "stratum": p.stratum,
                            "spine_dim": p.spine_dim, "provenance": p.provenance} for p in self.points],
                "provenance": self.provenance}


def _lowest_block(p: MultiPoly | None, X0):
    """(degree, block) of the lowest nonzero homogeneous part of p(X0 + .)."""
    if p is None:
        return math.inf, None
    q = p.affine(list(X0))
    if q.is_zero():
        return math.inf, None
    d = min(sum(m) for m in q.terms)
    return d, q.homogeneous_part(d)


def _spine(block: MultiPoly | None, n):
    if block is None:
        return n
    trace = block.trace()
    monos = sorted({m for i in range(n) for m in trace.diff(i).terms})
    if not monos:
        return n
    M = sympy.Matrix([[sympy.nsimplify(trace.diff(i).coeff(m)) for m in monos] for i in range(n)])
    return n - M.rank()


def _label(k, a):
    k = float(k)
    kk = int(round(k)) if abs(k - round(k)) < 1e-9 else f"{k:.6g}"
    return kk


def exact_truth(even: MultiPoly | None, odd: MultiPoly | None, a, X0) -> PointTruth:
    """Order, parity, stratum and spine of e + y|y|^{-a} o at X0, exactly."""
    n = (even or odd).n
    de, be = _lowest_block(even, X0)
    do, bo = _lowest_block(odd, X0)
    ke, ko = de, do + (1 - a)
    k = min(ke, ko)
    if ke == 0:
        raise ValueError("not a nodal point")
    if abs(ke - ko) < 1e-12:
        parity = "mixed"
    else:
        parity = "symmetric" if ke < ko else "antisymmetric"
    if ke == 1 and ke <= ko:
        stratum = "regular-orthogonal"
    elif abs(ko - (1 - a)) < 1e-12 and ko <= k:
        stratum = "regular-tangential"
    else:
        block = be if ke <= ko else bo
        stratum = f"Gamma^a_{_label(k, a)}" if block.depends_on_y() else f"Gamma*_{_label(k, a)}"
    spine = _spine(be, n) if even is not None and be is not None else n
    return PointTruth(tuple(float(v) for v in X0), float(k), parity, stratum, spine,
                      {"order": "derived", "parity": "derived", "stratum": "derived", "spine_dim": "derived"})


def harmonic_planar(k) -> MultiPoly:
    """Re (x + i y)^k."""
    return MultiPoly({(k - j, j): Fraction(math.comb(k, j) * (-1) ** (j // 2)) for j in range(0, k + 1, 2)}, 2)


def _var(i, nv):
    return MultiPoly.variable(i, nv)


def _one(nv):
    return MultiPoly.constant(Fraction(1), nv)


def _poly_entry(name, even, odd, a, kind="exact", degree=None, points=None, nodal_length=None, prov=None):
    n = (even or odd).n
    X0s = points or [tuple([0.0] * (n + 1))]
    pts = [exact_truth(even, odd, a, X0) for X0 in X0s]
    af = float(a)
    return CorpusEntry(name, kind, af, n, lambda: LaField(af, n, even, odd, name), degree, pts, nodal_length,
                       prov or {}, (even, odd))


def _solver_entries(a, N, seed):
    af = float(a)
    rng = np.random.default_rng(seed)
    c = rng.uniform(0.0, 1.0 / 3.0, size=3)

    def sine_data(X):
        return np.sin(2 * X[:, 0]) * np.exp(X[:, -1] / 2)

    def seeded_data(X):
        x, y = X[:, 0], X[:, -1]
        return x * (1 + c[0] * np.cos(x) * y + c[1] * np.cos(2 * x) + c[2] * y * y)

    def antisym_data(X):
        x, y = X[:, 0], X[:, -1]
        return np.abs(y) ** (1 - af) * np.sign(y) * (1 + 0.2 * np.cos(3 * x))

    grid = GridDomain.square(N)
    prov = {"order": "derived: odd boundary data positive for x > 0, Hopf lemma at the symmetry line"}
    reg = dict(order=1.0, parity="symmetric", stratum="regular-orthogonal", spine_dim=0)
    anti_prov = {"order": "derived: positive data on y > 0 with v = 0 on y = 0, Hopf lemma for the odd factor"}
    out = []
    for name, fn in (("grid_odd_sine", sine_data), ("grid_seeded_odd", seeded_data)):
        out.append(CorpusEntry(name, "solver", af, 1,
                               (lambda fn=fn: solve_extension(fn, "symmetric", af, grid, tol=1e-10)),
                               None, [PointTruth((0.0, 0.0), **reg, provenance=prov)], None, {"grid": N},
                               recipe=(fn, "symmetric")))
    out.append(CorpusEntry("grid_antisym", "solver", af, 1,
                           lambda: solve_extension(antisym_data, "antisymmetric", af, grid, tol=1e-10),
                           None, [PointTruth((0.0, 0.0), 1 - af, "antisymmetric", "regular-tangential", 1,
                                             anti_prov)], None, {"grid": N}, recipe=(antisym_data, "antisymmetric")))
    return out


def build_corpus(a, max_degree=6, solver=True, sharm=True, solver_N=129, seed=0):
    """The named corpus for weight exponent a (rational preferred).

    1-D entries use s = (1 - a)/2.
    """
    if max_degree > 10:
        raise ValueError("max_degree must be at most 10")
    a = Fraction(a).limit_denominator(10**6) if not isinstance(a, Fraction) else a
    x, one = _var(0, 2), _one(2)
    E = []
    E.append(_poly_entry("linear_x", x, None, a, degree=1, nodal_length=2.0,
                         prov={"nodal_length": "trivial"}))
    E.append(_poly_entry("odd_base", None, one, a, degree=float(1 - a), nodal_length=2.0,
                         prov={"degree": "theory: order 1 - a of y|y|^{-a}", "nodal_length": "trivial: y = 0"}))
    E.append(_poly_entry("odd_x", None, x, a, degree=float(2 - a),
                         prov={"degree": "derived: product homogeneity 1 + (1 - a)"}))
    for k in (2, 4, 6, 8, 10):
        if k <= max_degree:
            p = planar_even(k, a)
            E.append(_poly_entry(f"planar_even_{k}", p, None, a, degree=k,
                                 nodal_length=2.0 * real_root_count(p),
                                 prov={"degree": "theory: k-homogeneous", "nodal_length": "derived: real roots of p(t,1)"}))
    for k in (3, 5, 7, 9):
        if k <= max_degree:
            p = planar_odd(k, a)
            E.append(_poly_entry(f"planar_odd_{k}", p, None, a, degree=k,
                                 nodal_length=2.0 * real_root_count(p),
                                 prov={"degree": "theory: k-homogeneous", "nodal_length": "derived: real roots of p(t,1)"}))
    if a == 0:
        for k in range(1, max_degree + 1):
            E.append(_poly_entry(f"harmonic_{k}", harmonic_planar(k), None, a, degree=k, nodal_length=2.0 * k,
                                 prov={"nodal_length": "theory: 2k for a planar harmonic polynomial"}))
    # antisymmetric y-dependent entry
    pa = planar_even(2, 2 - a)
    E.append(_poly_entry("odd_planar_even_2", None, pa, a, degree=float(3 - a),
                         prov={"degree": "derived: degree 2 factor times y|y|^{-a}"}))
    # n = 2 entries
    x1, x2 = _var(0, 3), _var(1, 3)
    z3 = (0.0, 0.0, 0.0)
    E.append(_poly_entry("harmonic_x1x2_ext", garofalo_extend(x1 * x2, a), None, a, degree=2, points=[z3]))
    E.append(_poly_entry("harmonic_x1sq_minus_x2sq_ext", garofalo_extend(x1 * x1 - x2 * x2, a), None, a,
                         degree=2, points=[z3]))
    if max_degree >= 4:
        E.append(_poly_entry("x1sq_x2sq_ext", garofalo_extend(x1 * x1 * x2 * x2, a), None, a, degree=4, points=[z3]))
    E.append(_poly_entry("planar_even_2_in_3d", planar_even(2, a).embed(3, [0, 2]), None, a, degree=2, points=[z3]))
    # non-homogeneous composites
    pe2, po3 = planar_even(2, a), planar_odd(3, a)
    E.append(_poly_entry("comp_linear_plus_even2", x + pe2, None, a, kind="composite"))
    E.append(_poly_entry("comp_even2_plus_odd3", pe2 + po3, None, a, kind="composite"))
    E.append(_poly_entry("comp_even2_plus_odd_x", pe2, x, a, kind="composite"))
    E.append(_poly_entry("comp_odd_base_plus_odd_x", None, one + x, a, kind="composite"))
    if max_degree >= 4:
        E.append(_poly_entry("comp_odd3_plus_even4", po3 + planar_even(4, a), None, a, kind="composite"))
    E.append(_poly_entry("comp_linear_plus_odd_base", x, one, a, kind="composite"))
    # a nodal point away from the origin: planar_even_2 shifted to x = 1/4
    sh = pe2.affine([Fraction(-1, 4), 0])
    E.append(_poly_entry("shifted_even2", sh, None, a, degree=2, points=[(0.25, 0.0)],
                         prov={"degree": "trivial: translate of planar_even_2"}))
    if solver:
        E += _solver_entries(a, solver_N, seed)
    if sharm:
        s = float((1 - a) / 2)
        for k in (1, 2, 3):
            td = construct_order(k, s)
            E.append(CorpusEntry(f"sharm1d_order_{k}", "sharm1d", float(a), 1, (lambda td=td: td), k,
                                 [PointTruth((0.0,), float(k), "even-in-x" if k % 2 == 0 else "odd-in-x",
                                             "prescribed-order", 0, {"order": "derived: moment construction"})],
                                 None, {"s": s, "g": [str(v) for v in td.coeffs]}))
    return E


def get_entry(corpus, name):
    for e in corpus:
        if e.name == name:
            return e
    raise KeyError(name)
