"""Blow-up analysis at nodal points on {y = 0}.

The order of vanishing is read off the Almgren frequency; the tangent map is
the least-squares projection of the r^k rescaling onto the homogeneous
solutions of that order.  Homogeneous solutions of different degrees are
orthogonal in the weighted sphere inner product, so on exact fields this
projection recovers the leading Taylor block up to O(r) corrections.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dfield
from fractions import Fraction

import numpy as np

from .fields import LaField, as_field
from .monotonicity import DegenerateSphere, almgren, geometric_radii, sphere_mass
from .poly import MultiPoly, garofalo_extend, x_monomial_basis
from .quadrature import DEFAULT_DEGREE, sphere_rule

SNAP_TOL = 1e-2
ZERO_TOL = 1e-10
YDEP_TOL = 1e-4


class NotANodalPoint(ValueError):
    pass


def _center(X0, n):
    X0 = np.zeros(n + 1) if X0 is None else np.asarray(X0, float).ravel()
    if X0.shape != (n + 1,) or X0[-1] != 0:
        raise ValueError("centre must be a point of y = 0 with n + 1 coordinates")
    return X0


@dataclass
class BlowupSequence:
    center: np.ndarray
    radii: np.ndarray
    mode: str
    members: list = dfield(repr=False)
    k: float | None = None

    def sphere_norms(self, degree=DEFAULT_DEGREE):
        return np.array([math.sqrt(sphere_mass(m, np.zeros(m.n + 1), 1.0, degree)) for m in self.members])


def rescale(u, X0, r, mode="H", k=None, w=None, degree=DEFAULT_DEGREE) -> LaField:
    """X -> u(X0 + r X) / sqrt(H(X0, u, r))  (mode 'H') or / r^k  (mode 'k')."""
    u = as_field(u, None if w is None else w.a)
    X0 = _center(X0, u.n)
    if mode == "H":
        H = sphere_mass(u, X0, r, degree) / r ** (u.n + u.a)
        if not H > 0:
            raise DegenerateSphere(f"H vanishes at r={r}")
        f = 1.0 / math.sqrt(H)
    elif mode == "k":
        if k is None:
            raise ValueError("the r^k mode needs k")
        f = r ** (-k)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return u.rescaled(X0, r, f, f)


def blowup_sequence(u, X0, radii, mode="H", k=None, w=None) -> BlowupSequence:
    u = as_field(u, None if w is None else w.a)
    X0 = _center(X0, u.n)
    radii = np.sort(np.asarray(radii, float))[::-1]
    return BlowupSequence(X0, radii, mode, [rescale(u, X0, r, mode, k) for r in radii], k)


def admissible_orders(a, kmax=12):
    sym = np.arange(1, kmax + 1, dtype=float)
    return sym, sym - a


def snap_order(k_raw, a, tol=SNAP_TOL):
    """Nearest admissible order and the lattice it came from.

    Returns (k_snapped, parity, ambiguous); parity is None when neither
    lattice is within tolerance.
    """
    sym, anti = admissible_orders(a, max(12, int(k_raw) + 3))
    ds = np.abs(sym - k_raw)
    da = np.abs(anti - k_raw)
    i, j = int(np.argmin(ds)), int(np.argmin(da))
    ambiguous = bool(ds[i] <= 2 * tol and da[j] <= 2 * tol)
    if ds[i] <= da[j]:
        k, parity, d = sym[i], "symmetric", ds[i]
    else:
        k, parity, d = anti[j], "antisymmetric", da[j]
    if d > tol:
        return float(k_raw), None, ambiguous
    return float(k), parity, ambiguous


def _check_zero(u: LaField, X0, r_max):
    val = abs(float(u.value(X0[None, :])[0]))
    rule = sphere_rule(u.n, 0.0, 16)
    pts = np.concatenate([X0 + rho * rule.nodes for rho in (r_max, r_max / 2, r_max / 4)])
    sup = float(np.max(np.abs(u.value(pts))))
    if val > ZERO_TOL * max(sup, 1e-300):
        raise NotANodalPoint(f"|u(X0)| = {val:.3e} is not small against sup {sup:.3e}")


def order_of(u: LaField, X0, radii, degree=DEFAULT_DEGREE):
    prof = almgren(u, X0, radii, degree=degree)
    return prof.limit(), prof


def vanishing_order(u, X0=None, w=None, radii=None, degree=DEFAULT_DEGREE, tol=SNAP_TOL):
    """(k_raw, k_snapped, parity) at a zero X0 of u on y = 0.

    ``parity`` is 'symmetric', 'antisymmetric' or 'mixed'; when the two
    lattices collide (a close to 0) the parity is settled by the orders of
    the even and odd parts.
    """
    u = as_field(u, None if w is None else w.a)
    X0 = _center(X0, u.n)
    radii = geometric_radii(0.5, 10) if radii is None else np.sort(np.asarray(radii, float))
    _check_zero(u, X0, radii[-1])
    k_raw, _ = order_of(u, X0, radii, degree)
    k, parity, ambiguous = snap_order(k_raw, u.a, tol)
    if ambiguous or parity is None:
        ke = order_of(u.even_field(), X0, radii, degree)[0] if u.even is not None else math.inf
        ko = order_of(u.odd_field(), X0, radii, degree)[0] if u.odd is not None else math.inf
        if abs(ke - ko) <= tol:
            parity = "mixed"
        else:
            parity = "symmetric" if ke < ko else "antisymmetric"
    return float(k_raw), k, parity


def part_basis(n, k, a, parity):
    """Basis polynomials for the smooth factor of order-k homogeneous solutions.

    Symmetric: extensions of the degree-k x-monomials for weight a.
    Antisymmetric: extensions of the degree-(k - 1 + a) monomials for weight
    2 - a, to be multiplied by y|y|^{-a}.
    """
    if parity == "symmetric":
        deg, wa = k, a
    else:
        deg, wa = k - 1 + a, 2 - a
    d = int(round(deg))
    if abs(deg - d) > 1e-8 or d < 0:
        raise ValueError(f"order {k} is not admissible for {parity} fields at a={a}")
    wa = Fraction(wa).limit_denominator(10**9)
    exps = x_monomial_basis(n, d)
    return d, exps, [garofalo_extend(MultiPoly.monomial(e, Fraction(1)), wa) for e in exps]


@dataclass
class TangentFit:
    parity: str
    k: float
    radius: float
    exponents: list
    coefficients: np.ndarray
    residual: float
    norm: float
    polynomial: MultiPoly
    y_dependence: float

    def as_field(self, a, n) -> LaField:
        if self.parity == "symmetric":
            return LaField(a, n, even=self.polynomial)
        return LaField(a, n, odd=self.polynomial)


def tangent_map_fit(u, X0, k, parity, w=None, radius=None, degree=DEFAULT_DEGREE, min_norm=1e-8):
    """Least-squares tangent map of the requested parity part at order k.

    The fit is done on the unit sphere in the weighted inner product of the
    smooth factor (weight a for the even part, 2 - a for the odd factor);
    the QR solve plays the role of orthonormalising the basis.
    """
    u = as_field(u, None if w is None else w.a)
    X0 = _center(X0, u.n)
    a, n = u.a, u.n
    if parity not in ("symmetric", "antisymmetric"):
        raise ValueError("parity must be 'symmetric' or 'antisymmetric'")
    part = u.even if parity == "symmetric" else u.odd
    if part is None:
        raise ValueError(f"the field has no {parity} part")
    r = 1e-3 if radius is None else float(radius)
    d, exps, basis = part_basis(n, k, a, parity)
    wa = a if parity == "symmetric" else 2 - a
    rule = sphere_rule(n, wa, max(degree, 2 * d + 4))
    sq = np.sqrt(rule.weights)
    single = LaField(a, n, even=part) if parity == "symmetric" else LaField(a, n, odd=part)
    v = single.rescaled(X0, r, r ** (-k), r ** (-k))
    target = (v.even if parity == "symmetric" else v.odd).value(rule.nodes)
    A = np.stack([b.to_float()(rule.nodes) for b in basis], axis=1)
    Q, R = np.linalg.qr(sq[:, None] * A)
    coef = np.linalg.solve(R, Q.T @ (sq * target))
    resid_vec = target - A @ coef
    tnorm = math.sqrt(np.dot(rule.weights, target**2))
    res = math.sqrt(np.dot(rule.weights, resid_vec**2)) / max(tnorm, 1e-300)
    poly = MultiPoly({}, n + 1)
    for c, b in zip(coef, basis):
        poly = poly + b.to_float() * float(c)
    fnorm = math.sqrt(np.dot(rule.weights, (A @ coef) ** 2))
    if fnorm < min_norm:
        raise DegenerateSphere(f"tangent map of order {k} has vanishing norm {fnorm:.3e}")
    trace = MultiPoly({m: c for m, c in poly.terms.items() if m[-1] == 0}, n + 1)
    ydep = math.sqrt(np.dot(rule.weights, (poly - trace)(rule.nodes) ** 2)) / fnorm
    return TangentFit(parity, float(k), r, exps, coef, res, fnorm, poly, ydep)


@dataclass
class TangentField:
    even: TangentFit | None
    odd: TangentFit | None
    k_even: float
    k_odd: float


def tangent_field(u, X0=None, w=None, radii=None, radius=None, degree=DEFAULT_DEGREE):
    """Per-parity orders and tangent maps; absent parts give order inf."""
    u = as_field(u, None if w is None else w.a)
    X0 = _center(X0, u.n)
    radii = geometric_radii(0.5, 10) if radii is None else np.sort(np.asarray(radii, float))
    out = {}
    for parity, part in (("symmetric", u.even_field() if u.even is not None else None),
                         ("antisymmetric", u.odd_field() if u.odd is not None else None)):
        if part is None:
            out[parity] = (None, math.inf)
            continue
        try:
            k_raw, _ = order_of(part, X0, radii, degree)
        except DegenerateSphere:
            out[parity] = (None, math.inf)
            continue
        sym, anti = admissible_orders(u.a, max(12, int(k_raw) + 3))
        lattice = np.concatenate([[0.0], sym]) if parity == "symmetric" else anti
        k = float(lattice[np.argmin(np.abs(lattice - k_raw))])
        if k == 0.0:  # even part does not vanish at X0
            out[parity] = (None, 0.0)
            continue
        out[parity] = (tangent_map_fit(part, X0, k, parity, radius=radius, degree=degree), k)
    return TangentField(out["symmetric"][0], out["antisymmetric"][0],
                        out["symmetric"][1], out["antisymmetric"][1])


def spine_dimension(fit: TangentFit | None, n: int, tol=1e-8) -> int:
    """Dimension of the directions xi in y = 0 along which the trace is invariant."""
    if fit is None or fit.parity != "symmetric":
        return n
    trace = MultiPoly({m: c for m, c in fit.polynomial.terms.items() if m[-1] == 0}, n + 1)
    rows = []
    monos = sorted({m for i in range(n) for m in trace.diff(i).terms})
    for i in range(n):
        g = trace.diff(i)
        rows.append([float(g.coeff(m)) for m in monos])
    if not monos:
        return n
    M = np.array(rows)
    s = np.linalg.svd(M, compute_uv=False)
    rank = int(np.sum(s > tol * max(s[0], 1e-300)))
    return n - rank


@dataclass
class PointClassification:
    center: np.ndarray
    k_raw: float
    k: float
    parity: str
    stratum: str
    spine_dim: int
    coefficients: dict
    residual: float
    k_even: float = math.inf
    k_odd: float = math.inf
    y_dependence: float = 0.0

    def to_json(self):
        def num(v):
            return None if not math.isfinite(v) else float(v)
        return {"X0": [float(v) for v in self.center], "k_raw": float(self.k_raw), "k_snapped": float(self.k),
                "parity": self.parity, "stratum": self.stratum, "spine_dim": int(self.spine_dim),
                "coefficients": self.coefficients, "residual": float(self.residual),
                "k_even": num(self.k_even), "k_odd": num(self.k_odd), "y_dependence": float(self.y_dependence)}


def classify_point(u, X0=None, w=None, radii=None, radius=None, degree=DEFAULT_DEGREE, ydep_tol=YDEP_TOL):
    """Order, tangent field and stratum at a nodal point on y = 0."""
    u = as_field(u, None if w is None else w.a)
    X0 = _center(X0, u.n)
    k_raw, k, parity = vanishing_order(u, X0, radii=radii, degree=degree)
    tf = tangent_field(u, X0, radii=radii, radius=radius, degree=degree)
    a, n = u.a, u.n
    ke, ko = tf.k_even, tf.k_odd
    k_min = min(ke, ko)
    if abs(ke - 1) < 1e-9 and ke <= ko:
        stratum = "regular-orthogonal"
    elif abs(ko - (1 - a)) < 1e-9 and ko <= k_min:
        stratum = "regular-tangential"
    else:
        kk = int(round(k)) if abs(k - round(k)) < 1e-9 else f"{k:.6g}"
        dominant = tf.even if (tf.even is not None and ke <= ko) else tf.odd
        ydep = dominant.y_dependence if dominant is not None else 0.0
        stratum = f"Gamma^a_{kk}" if ydep > ydep_tol else f"Gamma*_{kk}"
    fits = [f for f in (tf.even, tf.odd) if f is not None]
    coeffs = {}
    for f in fits:
        coeffs[f.parity] = {"exponents": [list(e) for e in f.exponents], "values": [float(c) for c in f.coefficients]}
    main = tf.even if (tf.even is not None and ke <= ko) else tf.odd
    return PointClassification(
        X0, k_raw, k, parity, stratum, spine_dimension(tf.even, n), coeffs,
        max((f.residual for f in fits), default=0.0), ke, ko,
        main.y_dependence if main is not None else 0.0)
