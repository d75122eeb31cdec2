"""Almgren, Weiss and Monneau functionals at centres on {y = 0}.

For a field u = e + y|y|^{-a} o and a centre X0 on {y = 0} the cross terms
between the even and odd parts integrate to zero over spheres and balls
about X0, so

    int |y|^a u^2        = int |y|^a e^2 + int |y|^{2-a} o^2,
    int |y|^a |grad u|^2 = int |y|^a |grad e|^2
                           + int |y|^{-a} (y^2 |grad o|^2 + 2(1-a) y o o_y + (1-a)^2 o^2),

and each integral has a pure power weight with a smooth integrand.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dfield

import numpy as np

from .fields import FuncPart, LaField, as_field
from .quadrature import DEFAULT_DEGREE, ball_rule, sphere_rule

H_DEGENERATE = 1e-30


class DegenerateSphere(ArithmeticError):
    """H vanishes on a sphere, so the frequency is undefined there."""


def _center(X0, n):
    X0 = np.zeros(n + 1) if X0 is None else np.asarray(X0, float).ravel()
    if X0.shape != (n + 1,):
        raise ValueError(f"centre needs {n + 1} coordinates")
    if X0[-1] != 0:
        raise ValueError("centre must lie on y = 0")
    return X0


def sphere_mass(u: LaField, X0, r, degree=DEFAULT_DEGREE) -> float:
    """Integral of |y|^a u^2 over the sphere of radius r about X0."""
    n, a = u.n, u.a
    tot = 0.0
    if u.even is not None:
        rule = sphere_rule(n, a, degree)
        v = u.even.value(X0 + r * rule.nodes)
        tot += r ** (n + a) * np.dot(rule.weights, v * v)
    if u.odd is not None:
        rule = sphere_rule(n, 2 - a, degree)
        v = u.odd.value(X0 + r * rule.nodes)
        tot += r ** (n + 2 - a) * np.dot(rule.weights, v * v)
    return float(tot)


def ball_mass(u: LaField, X0, r, degree=DEFAULT_DEGREE) -> float:
    n, a = u.n, u.a
    tot = 0.0
    if u.even is not None:
        rule = ball_rule(n, a, degree)
        v = u.even.value(X0 + r * rule.nodes)
        tot += r ** (n + a + 1) * np.dot(rule.weights, v * v)
    if u.odd is not None:
        rule = ball_rule(n, 2 - a, degree)
        v = u.odd.value(X0 + r * rule.nodes)
        tot += r ** (n + 3 - a) * np.dot(rule.weights, v * v)
    return float(tot)


def dirichlet_energy(u: LaField, X0, r, degree=DEFAULT_DEGREE) -> float:
    """Integral of |y|^a |grad u|^2 over the ball of radius r about X0."""
    n, a = u.n, u.a
    tot = 0.0
    if u.even is not None:
        rule = ball_rule(n, a, degree)
        g = u.even.grad(X0 + r * rule.nodes)
        tot += r ** (n + a + 1) * np.dot(rule.weights, np.sum(g * g, axis=1))
    if u.odd is not None:
        rule = ball_rule(n, -a, degree)
        P = X0 + r * rule.nodes
        y = P[:, -1]
        o = u.odd.value(P)
        g = u.odd.grad(P)
        dens = y * y * np.sum(g * g, axis=1) + 2 * (1 - a) * y * o * g[:, -1] + (1 - a) ** 2 * o * o
        tot += r ** (n - a + 1) * np.dot(rule.weights, dens)
    return float(tot)


def boundary_flux(u: LaField, X0, r, degree=DEFAULT_DEGREE) -> float:
    """Integral of |y|^a u d_r u over the sphere; equals the energy for solutions."""
    n, a = u.n, u.a
    tot = 0.0
    if u.even is not None:
        rule = sphere_rule(n, a, degree)
        P = X0 + r * rule.nodes
        dr = np.sum(u.even.grad(P) * rule.nodes, axis=1)
        tot += r ** (n + a) * np.dot(rule.weights, u.even.value(P) * dr)
    if u.odd is not None:
        rule = sphere_rule(n, -a, degree)
        P = X0 + r * rule.nodes
        y = P[:, -1]
        o = u.odd.value(P)
        dr = np.sum(u.odd.grad(P) * rule.nodes, axis=1)
        dens = y * y * o * dr + (1 - a) * y * rule.nodes[:, -1] * o * o
        tot += r ** (n - a) * np.dot(rule.weights, dens)
    return float(tot)


def H_value(u, X0, r, degree=DEFAULT_DEGREE):
    return sphere_mass(u, X0, r, degree) / r ** (u.n + u.a)


def E_value(u, X0, r, degree=DEFAULT_DEGREE):
    return dirichlet_energy(u, X0, r, degree) / r ** (u.n + u.a - 1)


def geometric_radii(r_max, count=8, ratio=2.0):
    """Sorted ladder r_max * ratio^{-j}, j = 0..count-1."""
    return np.sort(r_max * ratio ** -np.arange(count, dtype=float))


def _field_scale(u: LaField, X0, r):
    rule = sphere_rule(u.n, 0.0, 12)
    vals = u.value(X0 + r * rule.nodes)
    return float(np.max(np.abs(vals))) if vals.size else 0.0


@dataclass
class FrequencyProfile:
    center: np.ndarray
    radii: np.ndarray
    H: np.ndarray
    E: np.ndarray
    a: float
    provenance: str = "exact-poly"
    field: LaField | None = dfield(default=None, repr=False, compare=False)

    @property
    def N(self):
        return self.E / self.H

    def limit(self):
        """Extrapolated N(X0, u, 0+) from the three smallest radii."""
        return aitken_limit(self.N[:3][::-1])

    def monotone(self, tol=1e-6):
        return monotonicity_report(self.radii, self.N, tol)


def almgren(u, X0=None, radii=None, w=None, degree=DEFAULT_DEGREE, provenance=None):
    """Frequency profile r -> (H, E, N) at X0 on y = 0."""
    u = as_field(u, None if w is None else w.a)
    X0 = _center(X0, u.n)
    radii = np.sort(np.asarray(geometric_radii(0.5) if radii is None else radii, float))
    if u.is_zero():
        raise DegenerateSphere("the zero field has no frequency")
    H = np.array([H_value(u, X0, r, degree) for r in radii])
    E = np.array([E_value(u, X0, r, degree) for r in radii])
    scale = np.array([_field_scale(u, X0, r) for r in radii])
    bad = ~(H > H_DEGENERATE * scale**2) | (scale == 0)
    if np.any(bad):
        raise DegenerateSphere(f"H vanishes at r={radii[bad].tolist()}")
    prov = provenance or getattr(u, "provenance", None) or "exact-poly"
    return FrequencyProfile(X0, radii, H, E, u.a, prov, u)


def aitken_limit(seq):
    """Aitken extrapolation of a sequence ordered from large to small radius.

    Falls back to the last term when the second difference is negligible.
    """
    s0, s1, s2 = (float(v) for v in seq[-3:])
    d1, d2 = s1 - s0, s2 - s1
    den = d2 - d1
    if abs(den) <= 1e-14 * max(abs(s2), 1.0) or abs(d2) <= 1e-14 * max(abs(s2), 1.0):
        return s2
    ratio = d2 / d1 if d1 != 0 else 0.0
    if not 0.0 < ratio < 1.0:  # not a contracting sequence
        return s2
    return s2 - d2 * d2 / den


def monotonicity_report(radii, values, tol=1e-6):
    """Largest decrease of values along increasing radii, relative to scale."""
    order = np.argsort(radii)
    v = np.asarray(values, float)[order]
    drops = v[:-1] - v[1:]
    scale = max(np.max(np.abs(v)), 1e-300)
    max_violation = float(max(np.max(drops) / scale, 0.0)) if len(v) > 1 else 0.0
    return {"monotone": bool(max_violation <= tol), "max_violation": max_violation}


def logH_derivative_check(profile: FrequencyProfile, field=None, rel_step=1e-3, degree=DEFAULT_DEGREE):
    """Compare d/dr log H with 2N/r at the profile's interior radii.

    With a field available the derivative is a central difference with
    relative step ``rel_step``; otherwise a three-point difference on the
    profile's own radii is used.
    """
    u = field if field is not None else profile.field
    r = profile.radii
    if len(r) < 3:
        raise ValueError("need at least three radii")
    rows = []
    if u is not None:
        for ri, Ni in zip(r, profile.N):
            hp = H_value(u, profile.center, ri * (1 + rel_step), degree)
            hm = H_value(u, profile.center, ri * (1 - rel_step), degree)
            deriv = (math.log(hp) - math.log(hm)) / (2 * ri * rel_step)
            rows.append((ri, deriv, 2 * Ni / ri))
    else:
        lh = np.log(profile.H)
        for i in range(1, len(r) - 1):
            h0, h1 = r[i] - r[i - 1], r[i + 1] - r[i]
            deriv = (-h1 / (h0 * (h0 + h1)) * lh[i - 1] + (h1 - h0) / (h0 * h1) * lh[i]
                     + h0 / (h1 * (h0 + h1)) * lh[i + 1])
            rows.append((r[i], deriv, 2 * profile.N[i] / r[i]))
    rows = np.array(rows)
    scale = np.maximum(np.abs(rows[:, 2]), 1.0 / rows[:, 0])
    rel = np.abs(rows[:, 1] - rows[:, 2]) / scale
    return {"radii": rows[:, 0], "dlogH": rows[:, 1], "two_N_over_r": rows[:, 2],
            "max_rel_deviation": float(np.max(rel))}


def doubling_check(profile: FrequencyProfile, N_bound=None, tol=1e-8, ball=False, degree=DEFAULT_DEGREE):
    """Check H(r2) <= H(r1) (r2/r1)^{2N} over all pairs r1 < r2.

    With ``ball`` the integrated form is checked instead: the ball mass
    scaled by r^{-(n+a+2)} grows at most like r^{2N-1}. It needs the field.
    """
    r = profile.radii
    N = float(profile.N[-1]) if N_bound is None else float(N_bound)
    if ball:
        u = profile.field
        if u is None:
            raise ValueError("the ball form needs the field")
        vals = np.array([ball_mass(u, profile.center, ri, degree) / ri ** (u.n + u.a + 2) for ri in r])
        expo = 2 * N - 1
    else:
        vals = profile.H
        expo = 2 * N
    worst = -np.inf
    best = np.inf
    for i in range(len(r)):
        for j in range(i + 1, len(r)):
            ratio = vals[j] / (vals[i] * (r[j] / r[i]) ** expo)
            worst = max(worst, ratio)
            best = min(best, ratio)
    return {"holds": bool(worst <= 1 + tol), "max_ratio": float(worst), "min_ratio": float(best),
            "N_bound": N, "exponent": expo}


def ball_sphere_bounds(profile: FrequencyProfile, degree=DEFAULT_DEGREE):
    """Check sphere/(n+a+1+2N) <= ball mass <= sphere/(n+a+1) at each radius."""
    u = profile.field
    if u is None:
        raise ValueError("needs the field")
    rows = []
    for r, N in zip(profile.radii, profile.N):
        S = sphere_mass(u, profile.center, r, degree) * r
        B = ball_mass(u, profile.center, r, degree)
        lo, hi = S / (u.n + u.a + 1 + 2 * N), S / (u.n + u.a + 1)
        rows.append((lo, B, hi))
    rows = np.array(rows)
    slack = 1e-10 * np.abs(rows[:, 1])
    ok = np.all(rows[:, 0] <= rows[:, 1] + slack) and np.all(rows[:, 1] <= rows[:, 2] + slack)
    return {"holds": bool(ok), "lower": rows[:, 0], "ball": rows[:, 1], "upper": rows[:, 2]}


@dataclass
class WeissProfile:
    center: np.ndarray
    k: float
    radii: np.ndarray
    W: np.ndarray

    def monotone(self, tol=1e-6):
        return monotonicity_report(self.radii, self.W, tol)


def weiss(u, X0=None, k=1.0, radii=None, w=None, degree=DEFAULT_DEGREE):
    """W_k(r) = r^{-2k} (E(r) - k H(r))."""
    prof = almgren(u, X0, radii, w, degree)
    W = prof.radii ** (-2 * k) * (prof.E - k * prof.H)
    return WeissProfile(prof.center, k, prof.radii, W)


@dataclass
class MonneauProfile:
    center: np.ndarray
    k: float
    radii: np.ndarray
    M: np.ndarray
    reference: object = None

    def monotone(self, tol=1e-6):
        return monotonicity_report(self.radii, self.M, tol)


def monneau(u, X0, p, k, radii=None, w=None, degree=DEFAULT_DEGREE):
    """M(r) = r^{-(n+a+2k)} times the sphere mass of u - p(. - X0)."""
    u = as_field(u, None if w is None else w.a)
    X0 = _center(X0, u.n)
    pf = as_field(p, u.a).translated(X0)
    diff = u - pf
    radii = np.sort(np.asarray(geometric_radii(0.5) if radii is None else radii, float))
    M = np.array([sphere_mass(diff, X0, r, degree) / r ** (u.n + u.a + 2 * k) for r in radii])
    return MonneauProfile(X0, k, radii, M, p)


def frequency_lower_bound_check(profile: FrequencyProfile, parity: str, tol=1e-3) -> bool:
    """N at the smallest radius is at least 1 (symmetric) or 1 - a (antisymmetric)."""
    bound = {"symmetric": 1.0, "antisymmetric": 1.0 - profile.a}.get(parity)
    if bound is None:
        bound = min(1.0, 1.0 - profile.a)
    return bool(profile.N[0] >= bound - tol)


def perturbed_monotonicity_constant(u: LaField, X0, radii, degree=DEFAULT_DEGREE):
    """Smallest C making exp(C r) N(r) nondecreasing at a centre off y = 0.

    Only radii below |y0| are used so that the weight is smooth on each ball;
    the integrals then use unweighted rules with |y|^a in the integrand.
    """
    X0 = np.asarray(X0, float)
    y0 = abs(X0[-1])
    radii = np.sort(np.asarray(radii, float))
    radii = radii[radii < y0]
    if len(radii) < 2:
        raise ValueError("need at least two radii below the distance to y = 0")
    srule = sphere_rule(u.n, 0.0, degree)
    brule = ball_rule(u.n, 0.0, degree)
    Ns = []
    for r in radii:
        P = X0 + r * srule.nodes
        Hs = r**u.n * np.dot(srule.weights, np.abs(P[:, -1]) ** u.a * u.value(P) ** 2)
        P = X0 + r * brule.nodes
        g = u.grad(P)
        Eb = r ** (u.n + 1) * np.dot(brule.weights, np.abs(P[:, -1]) ** u.a * np.sum(g * g, axis=1))
        Ns.append(r * Eb / Hs)
    Ns = np.array(Ns)
    C = 0.0
    for i in range(len(radii) - 1):
        if Ns[i + 1] < Ns[i]:
            C = max(C, math.log(Ns[i] / Ns[i + 1]) / (radii[i + 1] - radii[i]))
    return {"radii": radii, "N": Ns, "C": C}


# -- diagnostics with non-explicit constants ------------------------------------
def sphere_average(u: LaField, X0, r, degree=DEFAULT_DEGREE) -> float:
    """Weighted mean of u over the sphere; the odd part integrates to zero."""
    n, a = u.n, u.a
    if u.even is None:
        return 0.0
    rule = sphere_rule(n, a, degree)
    return float(np.dot(rule.weights, u.even.value(X0 + r * rule.nodes)) / rule.weights.sum())


def mean_value_defect(u, X0=None, r=0.5, w=None, degree=DEFAULT_DEGREE):
    """|sphere average - u(X0)|; zero for solutions."""
    u = as_field(u, None if w is None else w.a)
    X0 = _center(X0, u.n)
    return abs(sphere_average(u, X0, r, degree) - float(u.value(X0[None, :])[0]))


def caccioppoli_constant(u, X0=None, r=0.25, R=0.5, w=None, degree=DEFAULT_DEGREE):
    """C with energy(B_r) = C (R - r)^{-2} * weighted L2 mass of the annulus B_R minus B_r."""
    u = as_field(u, None if w is None else w.a)
    X0 = _center(X0, u.n)
    if not 0 < r < R:
        raise ValueError("need 0 < r < R")
    annulus = ball_mass(u, X0, R, degree) - ball_mass(u, X0, r, degree)
    return dirichlet_energy(u, X0, r, degree) * (R - r) ** 2 / annulus


def moser_constant(u, X0=None, r=0.5, w=None, degree=DEFAULT_DEGREE):
    """sup over B_{r/2} of |u| divided by the weighted root mean square over B_r."""
    from .quadrature import ball_measure_const

    u = as_field(u, None if w is None else w.a)
    X0 = _center(X0, u.n)
    pts = np.concatenate([X0 + 0.5 * r * ball_rule(u.n, 0.0, degree).nodes,
                          X0 + 0.5 * r * sphere_rule(u.n, 0.0, degree).nodes])
    sup = float(np.max(np.abs(u.value(pts))))
    rms = math.sqrt(ball_mass(u, X0, r, degree) / ball_measure_const(u.n, u.a, r))
    return sup / rms


def empirical_N0(fields, R=0.5, degree=DEFAULT_DEGREE):
    """Smallest N(0, 1 + c phi, 1) at which 1 + c phi first vanishes in B_R.

    For each phi with phi(0) = 0 the threshold is c* = 1 / max over B_R of
    (-phi), found on quadrature nodes of the ball and its boundary.  Below
    the returned value no member of the tested families vanishes in B_R;
    the threshold depends on the family and is not a universal constant.
    """
    rows = []
    for phi in fields:
        n = phi.n
        P = np.concatenate([R * ball_rule(n, 0.0, degree).nodes, R * sphere_rule(n, 0.0, degree).nodes])
        m = float(np.max(-phi.value(P)))
        if m <= 0:
            continue
        c = 1.0 / m
        one = LaField(phi.a, n, even=FuncPart(lambda X: np.ones(len(X)), n + 1, grad=np.zeros_like))
        u = one + phi * c
        N = float(almgren(u, np.zeros(n + 1), [1.0], degree=degree).N[0])
        rows.append({"field": phi.name, "c_star": c, "N_at_threshold": N})
    return {"R": R, "N0": min(r["N_at_threshold"] for r in rows) if rows else math.nan, "families": rows}
