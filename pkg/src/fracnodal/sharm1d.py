"""s-harmonic functions on (-1, 1) with a prescribed order of vanishing at 0.

Exterior data of the form f(x) = (x^2 - 1)^s g(1/x) with g a polynomial give

    u(x) = K (1 - x^2)^s sum_m A_m x^m,    K = 2 sin(pi s) / pi,

inside (-1, 1), with A_{2n} = int_0^1 g_e(t) t^{2n-1} dt and
A_{2n+1} = int_0^1 g_o(t) t^{2n} dt.  Choosing g so that the first moments
vanish fixes the order of vanishing.  Moments are exact rationals.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import sympy
from scipy import integrate

from .extension import BoundaryDatum, frac_laplacian_direct


def kernel_constant(s):
    """K = 2 Gamma(1/2) sin(pi s) / pi^{3/2} = 2 sin(pi s) / pi."""
    return 2 * math.sin(math.pi * s) / math.pi


@dataclass(frozen=True)
class TailData:
    """g as ascending rational coefficients; s the fractional order."""

    coeffs: tuple
    s: float

    def __post_init__(self):
        c = tuple(Fraction(v) for v in self.coeffs)
        while len(c) > 1 and c[-1] == 0:
            c = c[:-1]
        object.__setattr__(self, "coeffs", c)
        if c and c[0] != 0:
            raise ValueError("g must vanish at 0 (the even part needs g_e(0) = 0)")

    @property
    def even(self):
        return tuple(v if i % 2 == 0 else Fraction(0) for i, v in enumerate(self.coeffs))

    @property
    def odd(self):
        return tuple(v if i % 2 == 1 else Fraction(0) for i, v in enumerate(self.coeffs))

    def g(self, t):
        return np.polynomial.polynomial.polyval(t, [float(v) for v in self.coeffs])

    def exterior(self, x):
        """f(x) = (x^2 - 1)^s g(1/x) for |x| >= 1."""
        x = np.asarray(x, float)
        out = np.zeros_like(x)
        m = np.abs(x) >= 1
        out[m] = (x[m] ** 2 - 1) ** self.s * self.g(1 / x[m])
        return out

    def moments(self, M):
        return moments(self.coeffs, M)

    def __call__(self, x):
        """u on the whole line: the interior solution and f outside."""
        return evaluate(self, x)

    def as_datum(self) -> BoundaryDatum:
        return BoundaryDatum(self.__call__, "growth", growth=2 * self.s - 1, breakpoints=(-1.0, 1.0))


def moments(g, M):
    """Exact A_0..A_M for g given by ascending coefficients (g_e(0) = 0)."""
    c = [Fraction(v) for v in g]
    if c and c[0] != 0:
        raise ValueError("A_0 diverges unless g_e(0) = 0")
    out = []
    for m in range(M + 1):
        tot = Fraction(0)
        for j, v in enumerate(c):
            if v == 0 or j % 2 != m % 2:
                continue
            # even m = 2n: int t^{j + 2n - 1}; odd m = 2n + 1: int t^{j + 2n}
            p = j + m - 1
            tot += v / (p + 1)
        out.append(tot)
    return out


def _null_vector(rows, ncols):
    if not rows:
        v = [Fraction(0)] * ncols
        v[0] = Fraction(1)
        return v
    Mx = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in r] for r in rows])
    ns = Mx.nullspace()
    if len(ns) != 1:
        raise ArithmeticError("moment system is not of corank one")
    v = ns[0]
    lead = v[0]
    return [Fraction(int(sympy.fraction(x / lead)[0]), int(sympy.fraction(x / lead)[1])) for x in v]


def _pure_part(k, parity_of_k):
    """Coefficients of g of one parity with A_i = 0 for i < k of that parity and A_k != 0."""
    if parity_of_k == 0:
        exps = [2 * j for j in range(1, k // 2 + 2)]  # y^2 .. y^{k+2}
        conds = list(range(0, k, 2))
    else:
        exps = [2 * j + 1 for j in range(0, (k - 1) // 2 + 1)]  # y .. y^k
        conds = list(range(1, k, 2))
    rows = []
    for m in conds:
        rows.append([Fraction(1, e + m) for e in exps])  # int t^{e + m - 1}
    v = _null_vector(rows, len(exps))
    c = [Fraction(0)] * (max(exps) + 1)
    for e, val in zip(exps, v):
        c[e] = val
    return c


def construct_order(k, s, complement=False) -> TailData:
    """Tail datum whose solution vanishes at 0 with order exactly k.

    By default g has the parity of k (the other-parity moments vanish
    identically).  With ``complement`` an other-parity part of order k + 1
    is added, so both moment families are active.
    """
    if k < 1 or int(k) != k:
        raise ValueError("k must be a positive integer")
    k = int(k)
    c = _pure_part(k, k % 2)
    if complement:
        extra = _pure_part(k + 1, (k + 1) % 2)
        n = max(len(c), len(extra))
        c = [(c[i] if i < len(c) else 0) + (extra[i] if i < len(extra) else 0) for i in range(n)]
    td = TailData(tuple(c), s)
    A = td.moments(k)
    if any(A[i] != 0 for i in range(k)) or A[k] == 0:
        raise ArithmeticError("moment conditions not met")
    return td


def _J_table(z, pmax):
    """J_p(z) = int_0^1 t^p / (1 - z t^2) dt for p = 0..pmax (0 <= z < 1)."""
    J = np.zeros(pmax + 1)
    if z < 0.25:
        m = np.arange(60)
        zm = z**m
        for p in range(pmax + 1):
            J[p] = np.sum(zm / (p + 2 * m + 1))
        return J
    r = math.sqrt(z)
    J[0] = math.atanh(r) / r
    if pmax >= 1:
        J[1] = -math.log1p(-z) / (2 * z)
    for p in range(2, pmax + 1):
        J[p] = (J[p - 2] - 1 / (p - 1)) / z
    return J


def interior_value(td: TailData, x):
    """Closed-form u(x) for |x| < 1."""
    c = [float(v) for v in td.coeffs]
    z = x * x
    J = _J_table(z, len(c) + 1)
    even = sum(c[j] * J[j - 1] for j in range(2, len(c), 2))
    odd = sum(c[j] * J[j] for j in range(1, len(c), 2))
    return kernel_constant(td.s) * (1 - z) ** td.s * (even + x * odd)


def evaluate(td: TailData, x):
    x = np.asarray(x, float)
    out = np.empty_like(x)
    flat = x.ravel()
    res = out.ravel()
    for i, xi in enumerate(flat):
        res[i] = interior_value(td, xi) if abs(xi) < 1 else float(td.exterior(np.array([xi]))[0])
    return res.reshape(x.shape)


def series_value(td: TailData, x, M=60):
    """K (1 - x^2)^s sum_{m <= M} A_m x^m with exact moments."""
    A = [float(v) for v in td.moments(M)]
    return kernel_constant(td.s) * (1 - x * x) ** td.s * np.polynomial.polynomial.polyval(x, A)


def poisson_eval_1d(f, x, s):
    """u(x) = (sin(pi s)/pi) (1 - x^2)^s int_{|y|>1} f(y) / ((y^2 - 1)^s |x - y|) dy.

    ``f`` is a TailData or any callable on |y| >= 1.  The (y - 1)^{-s}
    endpoint singularity is integrated with an algebraic-weight rule.
    """
    if abs(x) >= 1:
        raise ValueError("x must lie in (-1, 1)")
    fn = f.exterior if isinstance(f, TailData) else f

    def F(y):
        yy = np.array([y, -y])
        fy = np.asarray(fn(yy), float)
        return fy[0] / (y - x) + fy[1] / (y + x)

    v1, _ = integrate.quad(lambda y: F(y) * (y + 1) ** (-s), 1, 2, weight="alg", wvar=(-s, 0.0),
                           epsabs=1e-13, epsrel=1e-12, limit=200)
    v2, _ = integrate.quad(lambda y: F(y) * (y * y - 1) ** (-s), 2, np.inf, epsabs=1e-13, epsrel=1e-12, limit=400)
    return math.sin(math.pi * s) / math.pi * (1 - x * x) ** s * (v1 + v2)


def frac_residual(td: TailData, xs=(0.0, 0.3, -0.3, 0.6, -0.6)):
    """(-Delta)^s u at interior points and the scale used to judge it."""
    datum = td.as_datum()
    vals = np.array([frac_laplacian_direct(datum, x, td.s) for x in xs])
    grid = np.linspace(-1.5, 1.5, 601)
    scale = float(np.max(np.abs(td(grid))))
    return vals, scale


def verify_order(u, k, s, rs=None, xs=(0.0, 0.3, -0.3, 0.6, -0.6), cheb_window=0.2, cheb_deg=16):
    """Order checks for a 1-D function vanishing at 0.

    (i) slope of log H against log r with H(r) = (u(r)^2 + u(-r)^2)/2;
    (ii) (-Delta)^s u at interior points, when u is a TailData;
    (iii) power coefficients below k of a Chebyshev fit on [-w, w].
    """
    rs = np.geomspace(1e-3, 1e-1, 12) if rs is None else np.asarray(rs, float)
    fn = u if callable(u) else None
    H = 0.5 * (np.asarray(fn(rs), float) ** 2 + np.asarray(fn(-rs), float) ** 2)
    slope = float(np.polyfit(np.log(rs), np.log(H), 1)[0])
    report = {"k": k, "s": s, "slope": slope, "slope_target": 2 * k}
    t = np.cos(np.pi * (np.arange(4 * cheb_deg) + 0.5) / (4 * cheb_deg)) * cheb_window
    cheb = np.polynomial.Chebyshev.fit(t, np.asarray(fn(t), float), cheb_deg, domain=[-cheb_window, cheb_window])
    power = cheb.convert(kind=np.polynomial.Polynomial, domain=[-1, 1], window=[-1, 1]).coef
    scale = max(float(np.max(np.abs(power))), 1e-300)
    report["taylor"] = [float(c) for c in power[: k + 1]]
    report["low_taylor_max"] = float(np.max(np.abs(power[:k])) / scale) if k > 0 else 0.0
    if isinstance(u, TailData):
        vals, sc = frac_residual(u, xs)
        report["frac_values"] = [float(v) for v in vals]
        report["frac_scale"] = sc
        report["frac_max_rel"] = float(np.max(np.abs(vals)) / sc)
    return report
