"""The acceptance suite: thirteen numbered checks with explicit tolerances.

Each ``criterion_N`` returns a :class:`CriterionResult`; :func:`run_acceptance`
collects them into a pass/fail matrix.  Corpora are built once per weight
exponent and shared through an :class:`AcceptanceContext`.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field as dfield
from fractions import Fraction

import numpy as np

from .blowup import classify_point, snap_order, tangent_map_fit, vanishing_order
from .corpus import build_corpus, harmonic_planar
from .extension import BoundaryDatum, bump_datum, dtn, frac_laplacian_direct, poisson_extend
from .fields import as_field
from .monotonicity import (almgren, doubling_check, geometric_radii, logH_derivative_check, monneau,
                           monotonicity_report, weiss)
from .nodal import linear_fit_report, measure_boxcount
from .poly import MultiPoly, apply_La, garofalo_extend, planar_even, planar_odd
from .sharm1d import construct_order, verify_order
from .solver import GridDomain, convergence_study, max_principle_holds, solve_extension

DEFAULT_A_VALUES = (Fraction(-1, 2), Fraction(1, 3))
LADDER = geometric_radii(0.5, 8)


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: dict
    seconds: float = 0.0

    def line(self):
        return f"criterion {self.number:2d} {'PASS' if self.passed else 'FAIL'}  {self.title}"


@dataclass
class AcceptanceContext:
    a_values: tuple = DEFAULT_A_VALUES
    solver_N: int = 129
    _corpora: dict = dfield(default_factory=dict)

    def corpus(self, a):
        a = Fraction(a)
        if a not in self._corpora:
            self._corpora[a] = build_corpus(a, solver_N=self.solver_N)
        return self._corpora[a]

    def entries(self, kinds):
        for a in self.a_values:
            for e in self.corpus(a):
                if e.kind in kinds:
                    yield a, e


def _field(e):
    f = e.field()
    return f.as_field() if hasattr(f, "as_field") and not hasattr(f, "even") else f


def _fmt(x):
    return float(f"{float(x):.17g}")


# 1 -----------------------------------------------------------------------
def _extension_inputs():
    x = [MultiPoly.variable(i, 2) for i in range(1)]
    x1, x2, x3 = (MultiPoly.variable(i, 4) for i in range(3))
    v1, v2 = (MultiPoly.variable(i, 3) for i in range(2))
    return [x[0] ** 3, x[0] ** 6, v1 * v2, v1 * v1 - v2 * v2, v1 * v1 * v2 * v2, v1 ** 3 * v2 ** 2,
            (v1 - v2 * 2) ** 5, v1 ** 4 * v2 ** 6, x1 * x2 * x3, x1 ** 2 * x2 ** 3 * x3 ** 4]


def criterion_1(ctx=None):
    avals = [Fraction(v, 4) for v in (-2, -1, 0, 1, 2)]
    bad = []
    count = 0
    for a in avals:
        for k in range(2, 11, 2):
            count += 1
            if not apply_La(planar_even(k, a), a).is_zero():
                bad.append(f"planar_even({k},{a})")
        for k in range(3, 11, 2):
            count += 1
            if not apply_La(planar_odd(k, a), a).is_zero():
                bad.append(f"planar_odd({k},{a})")
        for i, p in enumerate(_extension_inputs()):
            count += 1
            if not apply_La(garofalo_extend(p, a), a).is_zero():
                bad.append(f"extension[{i}]({a})")
    return CriterionResult(1, "exact L_a-harmonicity of the polynomial families", not bad,
                           {"checked": count, "failures": bad})


# 2 -----------------------------------------------------------------------
def criterion_2(ctx):
    worst, rows = 0.0, []
    for a, e in ctx.entries({"exact"}):
        if e.degree is None:
            continue
        prof = almgren(e.field(), e.points[0].point, [0.25, 0.5, 1.0])
        dev = float(np.max(np.abs(prof.N - e.degree)))
        worst = max(worst, dev)
        rows.append({"a": str(a), "entry": e.name, "k": _fmt(e.degree), "max_dev": _fmt(dev)})
    return CriterionResult(2, "frequency of homogeneous solutions equals the degree", worst <= 1e-8,
                           {"max_abs_dev": _fmt(worst), "entries": rows})


# 3 -----------------------------------------------------------------------
def _solver_tolerance(e, a, ladder):
    """Richardson estimate of the discretisation error in N on the ladder."""
    fine = e.field()
    dom = fine.domain
    coarse_dom = GridDomain(dom.L, dom.H, tuple((s + 1) // 2 for s in dom.shape))
    data, parity = e.recipe
    coarse = solve_extension(data, parity, a, coarse_dom, tol=1e-10)
    X0 = e.points[0].point
    Nf = almgren(fine.as_field(), X0, ladder).N
    Nc = almgren(coarse.as_field(), X0, ladder).N
    return float(np.max(np.abs(Nf - Nc))) / 3.0, Nf


def criterion_3(ctx):
    rows, ok = [], True
    for a, e in ctx.entries({"composite", "solver"}):
        X0 = e.points[0].point
        if e.kind == "solver":
            est, N = _solver_tolerance(e, float(a), LADDER)
            tol = max(1e-6, est)
        else:
            N = almgren(e.field(), X0, LADDER).N
            tol = 1e-6
        rep = monotonicity_report(LADDER, N, tol)
        ok &= rep["monotone"]
        rows.append({"a": str(a), "entry": e.name, "max_violation": _fmt(rep["max_violation"]),
                     "tol": _fmt(tol), "monotone": rep["monotone"]})
    return CriterionResult(3, "Almgren frequency is nondecreasing", ok, {"entries": rows})


# 4 -----------------------------------------------------------------------
def criterion_4(ctx):
    worst, rows = 0.0, []
    for a, e in ctx.entries({"exact", "composite"}):
        for p in e.points:
            prof = almgren(e.field(), p.point, LADDER)
            dev = logH_derivative_check(prof)["max_rel_deviation"]
            worst = max(worst, dev)
            rows.append({"a": str(a), "entry": e.name, "max_rel_dev": _fmt(dev)})
    return CriterionResult(4, "d/dr log H = 2N/r", worst <= 1e-4, {"max_rel_dev": _fmt(worst), "entries": rows})


# 5 -----------------------------------------------------------------------
def criterion_5(ctx):
    ok, rows = True, []
    for a, e in ctx.entries({"exact", "composite", "solver"}):
        u = _field(e)
        for p in e.points:
            prof = almgren(u, p.point, LADDER)
            rep = doubling_check(prof, tol=1e-8)
            good = rep["holds"]
            if e.degree is not None and e.kind == "exact":
                good = good and rep["min_ratio"] >= 1 - 1e-8
            ok &= good
            rows.append({"a": str(a), "entry": e.name, "max_ratio": _fmt(rep["max_ratio"]),
                         "min_ratio": _fmt(rep["min_ratio"]), "ok": good})
    return CriterionResult(5, "doubling inequality, equality for homogeneous entries", ok, {"entries": rows})


# 6 -----------------------------------------------------------------------
def criterion_6(ctx):
    ok, rows = True, []
    for a, e in ctx.entries({"exact", "composite"}):
        X0 = e.points[0].point
        k = e.points[0].order
        u = e.field()
        wp = weiss(u, X0, k, LADDER)
        # W is compared with its natural size r^{-2k} H
        Hs = almgren(u, X0, LADDER).H * LADDER ** (-2 * k)
        if e.kind == "exact" and e.degree is not None:
            dev = float(np.max(np.abs(wp.W) / Hs))
            good = dev <= 1e-8
            rows.append({"a": str(a), "entry": e.name, "W_rel": _fmt(dev), "ok": good})
        else:
            even, odd = e.parts
            ref = _tangent_poly(even, odd, X0, k, a)
            mp = monneau(u, X0, ref, k, LADDER)
            rw = _drop_report(LADDER, wp.W, float(np.max(Hs)), 1e-6)
            rm = mp.monotone(1e-6)
            good = rw["monotone"] and rm["monotone"]
            rows.append({"a": str(a), "entry": e.name, "W_violation": _fmt(rw["max_violation"]),
                         "M_violation": _fmt(rm["max_violation"]), "ok": good})
        ok &= good
    return CriterionResult(6, "Weiss vanishes on homogeneous entries; Weiss and Monneau nondecreasing",
                           ok, {"entries": rows})


def _drop_report(radii, values, scale, tol):
    """Largest decrease along increasing radii, divided by an explicit scale."""
    v = np.asarray(values, float)[np.argsort(radii)]
    worst = float(max(np.max(v[:-1] - v[1:]) / scale, 0.0))
    return {"monotone": worst <= tol, "max_violation": worst}


def _tangent_poly(even, odd, X0, k, a):
    """The exact lowest-order block of the composite at X0, as a field."""
    from .fields import LaField
    from .corpus import _lowest_block
    de, be = _lowest_block(even, X0)
    do, bo = _lowest_block(odd, X0)
    ev = be if abs(de - k) < 1e-12 else None
    od = bo if abs(do + 1 - float(a) - k) < 1e-12 else None
    n = (be or bo).n
    return LaField(float(a), n, ev, od)


# 7 -----------------------------------------------------------------------
def criterion_7(ctx):
    ok, rows = True, []
    for a, e in ctx.entries({"exact", "composite", "solver"}):
        u = _field(e)
        for p in e.points:
            k_raw, k, parity = vanishing_order(u, p.point)
            snapped, _, _ = snap_order(k_raw, float(a), 1e-2)
            on_lattice = snapped is not None and abs(k_raw - snapped) <= 1e-2
            good = bool(on_lattice and parity == p.parity and abs(k - p.order) < 1e-9)
            ok &= good
            rows.append({"a": str(a), "entry": e.name, "k_raw": _fmt(k_raw), "parity": parity, "ok": good})
    for a, e in ctx.entries({"sharm1d"}):
        s = e.provenance["s"]
        rep = verify_order(e.field(), int(e.degree), s)
        k_raw = rep["slope"] / 2
        good = abs(k_raw - round(k_raw)) <= 1e-2 and round(k_raw) == e.degree
        ok &= good
        rows.append({"a": str(a), "entry": e.name, "k_raw": _fmt(k_raw), "parity": "symmetric", "ok": good})
    return CriterionResult(7, "orders lie on the admissible lattices with correct parity", ok, {"entries": rows})


# 8 -----------------------------------------------------------------------
def criterion_8(ctx):
    ok, rows = True, []
    for a, e in ctx.entries({"exact", "composite", "solver"}):
        u = _field(e)
        for p in e.points:
            parity = "symmetric" if p.parity in ("symmetric", "mixed") else "antisymmetric"
            f1 = tangent_map_fit(u, p.point, p.order, parity, radius=1e-3)
            scale = float(np.max(np.abs(u.value(np.asarray(p.point)[None, :] + 1e-3 * _sphere_points(u.n)))))
            scale = scale * 1e-3 ** (-p.order)
            nondeg = f1.norm >= 1e-6 * scale
            row = {"a": str(a), "entry": e.name, "norm": _fmt(f1.norm), "scale": _fmt(scale)}
            if e.kind != "solver":
                f2 = tangent_map_fit(u, p.point, p.order, parity, radius=2e-3)
                rel = float(np.linalg.norm(f1.coefficients - f2.coefficients) / np.linalg.norm(f1.coefficients))
                row["two_radius_rel"] = _fmt(rel)
                good = nondeg and rel <= 1e-4
            else:
                good = nondeg
            row["ok"] = bool(good)
            ok &= bool(good)
            rows.append(row)
    return CriterionResult(8, "tangent maps are unique and nondegenerate", ok, {"entries": rows})


def _sphere_points(n):
    from .quadrature import sphere_rule
    return sphere_rule(n, 0.0, 12).nodes


# 9 -----------------------------------------------------------------------
def criterion_9(ctx=None, Ns=(33, 65, 129, 257, 513)):
    ok, rows = True, []
    for a in (Fraction(-1, 2), Fraction(0), Fraction(1, 2)):
        exact = as_field(planar_even(4, a), a)
        st = convergence_study(exact, float(a), Ns, method="direct")
        mp = all(max_principle_holds(f) for f in st["fields"])
        good = bool(np.min(st["orders"]) >= 1.9 and mp)
        ok &= good
        rows.append({"a": str(a), "errors": [_fmt(v) for v in st["errors"]],
                     "orders": [_fmt(v) for v in st["orders"]], "max_principle": mp, "ok": good})
    return CriterionResult(9, "solver converges at second order with a discrete maximum principle", ok,
                           {"runs": rows})


# 10 ----------------------------------------------------------------------
def criterion_10(ctx=None):
    ok = True
    coeffs = (0.5, -1.0, 0.25, 2.0, -0.5)
    rows = []
    rng = np.random.default_rng(10)
    pts = np.column_stack([rng.uniform(-1.5, 1.5, 20), rng.uniform(0.05, 1.5, 20)])
    for s in (0.25, 0.5, 0.75):
        a = Fraction(1 - 2 * s).limit_denominator(8)
        trace = MultiPoly({(i, 0): Fraction(c).limit_denominator(8) for i, c in enumerate(coeffs)}, 2)
        ext = garofalo_extend(trace, a)
        datum = BoundaryDatum.polynomial(coeffs)
        worst = raw = bound = 0.0
        for x, y in pts:
            v, err = poisson_extend(datum, x, y, s, with_error=True)
            exact = float(ext(np.array([[x, y]]))[0])
            raw, bound = max(raw, abs(v - exact)), max(bound, err)
            excess = (abs(v - exact) - err) / max(abs(exact), 1.0)
            worst = max(worst, excess) if math.isfinite(excess) else math.inf
        good_ext = worst <= 1e-14
        b = bump_datum(0.2, 1.0)
        rel = 0.0
        for x in (-0.5, 0.0, 0.3, 0.9):
            d1, d2 = dtn(b, x, s), frac_laplacian_direct(b, x, s)
            r = abs(d1 - d2) / abs(d2)
            rel = max(rel, r) if math.isfinite(r) else math.inf
        good = bool(good_ext and rel <= 1e-5)
        ok &= good
        rows.append({"s": s, "extension_excess": _fmt(worst), "max_abs_error": _fmt(raw),
                     "max_reported_error": _fmt(bound), "dtn_rel": _fmt(rel), "ok": good})
    return CriterionResult(10, "Poisson extension and Dirichlet-to-Neumann consistency", ok, {"runs": rows})


# 11 ----------------------------------------------------------------------
def criterion_11(ctx=None):
    ok, rows = True, []
    for s in (0.25, 0.5, 0.75):
        for k in (1, 2, 3):
            rep = verify_order(construct_order(k, s), k, s)
            good = abs(rep["slope"] - 2 * k) <= 0.05 and rep["frac_max_rel"] <= 1e-5
            ok &= good
            rows.append({"s": s, "k": k, "slope": _fmt(rep["slope"]), "frac_max_rel": _fmt(rep["frac_max_rel"]),
                         "ok": good})
    return CriterionResult(11, "1-D prescribed-order construction", ok, {"runs": rows})


# 12 ----------------------------------------------------------------------
def criterion_12(ctx):
    ok, rows = True, []
    for k in range(1, 7):
        m = measure_boxcount(as_field(harmonic_planar(k), 0), 1.0).value
        good = abs(m - 2 * k) <= 0.05 * 2 * k
        ok &= good
        rows.append({"field": f"harmonic_{k}", "length": _fmt(m), "target": 2 * k, "ok": good})
    for a in ctx.a_values:
        m = measure_boxcount(as_field(planar_even(2, a), a), 1.0).value
        good = abs(m - 4) <= 0.05 * 4
        ok &= good
        rows.append({"field": f"planar_even_2(a={a})", "length": _fmt(m), "target": 4, "ok": good})
    fits = []
    for a in ctx.a_values:
        Ns, ms = [], []
        for e in ctx.corpus(a):
            if e.kind == "exact" and e.n == 1 and e.name.startswith("planar_"):
                Ns.append(float(almgren(e.field(), e.points[0].point, [1.0]).N[0]))
                ms.append(measure_boxcount(e.field(), 0.5).value)
        fit = linear_fit_report(Ns, ms)
        good = fit["max_rel_deviation"] < 0.2
        ok &= good
        fits.append({"a": str(a), "N": [_fmt(v) for v in Ns], "measure": [_fmt(v) for v in ms],
                     "slope": _fmt(fit["slope"]), "max_rel_deviation": _fmt(fit["max_rel_deviation"]), "ok": good})
    return CriterionResult(12, "nodal length of planar solutions", ok, {"lengths": rows, "measure_vs_N": fits})


# 13 ----------------------------------------------------------------------
def criterion_13(ctx):
    total, hits, rows = 0, 0, []
    for a, e in ctx.entries({"exact", "composite", "solver"}):
        u = _field(e)
        for p in e.points:
            c = classify_point(u, p.point)
            good = c.stratum == p.stratum and c.parity == p.parity and c.spine_dim == p.spine_dim
            total += 1
            hits += good
            rows.append({"a": str(a), "entry": e.name, "stratum": c.stratum, "expected": p.stratum,
                         "parity": c.parity, "spine_dim": c.spine_dim, "ok": bool(good)})
    return CriterionResult(13, "classification matches the corpus ground truth", hits == total,
                           {"matched": hits, "total": total, "entries": rows})


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 14)}


def run_acceptance(which=None, a_values=DEFAULT_A_VALUES, solver_N=129):
    ctx = AcceptanceContext(tuple(Fraction(v) for v in a_values), solver_N)
    out = []
    for i in sorted(which or CRITERIA):
        t0 = time.perf_counter()
        try:
            res = CRITERIA[i](ctx)
        except Exception as exc:  # numerical failure is a failed criterion
            res = CriterionResult(i, f"raised {type(exc).__name__}", False, {"error": str(exc)})
        res.seconds = time.perf_counter() - t0
        out.append(res)
    return out


def matrix(results):
    return "\n".join(r.line() for r in results)
