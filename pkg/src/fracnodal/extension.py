"""Caffarelli-Silvestre extension in one space dimension.

The constants are given for every n; the integral operators (Poisson
extension, Dirichlet-to-Neumann limit, principal value) are implemented for
n = 1, where both integrals fold onto the half line via the pairing
u(x + h) + u(x - h).

Polynomial data grow too fast for the Poisson integral to converge once the
degree reaches 2s.  For those the integral over |eta - x| > R is replaced by
its finite part, which is the analytic continuation in s; with it the
extension of a polynomial is its even L_a-harmonic extension and its
fractional Laplacian vanishes.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field as dfield
from typing import Callable

import numpy as np
from scipy import integrate

from .poly import MultiPoly


class DivergentIntegral(ValueError):
    """The datum grows too fast for the requested integral."""


@dataclass(frozen=True)
class FracParam:
    s: float
    n: int = 1

    def __post_init__(self):
        if not 0 < self.s < 1:
            raise ValueError(f"s must lie in (0, 1), got {self.s}")

    @property
    def a(self):
        return 1 - 2 * self.s

    @property
    def C(self):
        return cns_const(self.n, self.s)

    @property
    def gamma(self):
        return gamma_closed(self.n, self.s)


def gamma_closed(n, s):
    return math.gamma(n / 2 + s) / (math.pi ** (n / 2) * math.gamma(s))


def gamma_const(n, s, with_error=False):
    """gamma(n, s) = 1 / int_{R^n} (1 + |eta|^2)^{-(n/2 + s)} d eta, by radial quadrature."""
    if not 0 < s < 1:
        raise ValueError("s must lie in (0, 1)")
    area = 2 * math.pi ** (n / 2) / math.gamma(n / 2)
    val, err = integrate.quad(lambda r: r ** (n - 1) * (1 + r * r) ** (-(n / 2 + s)), 0, np.inf,
                              epsabs=0, epsrel=1e-13, limit=200)
    g = 1 / (area * val)
    return (g, g * err / val) if with_error else g


def cns_const(n, s):
    """C(n, s) = 2^{2s} s Gamma(n/2 + s) / (pi^{n/2} Gamma(1 - s))."""
    if not 0 < s < 1:
        raise ValueError("s must lie in (0, 1)")
    return 2 ** (2 * s) * s * math.gamma(n / 2 + s) / (math.pi ** (n / 2) * math.gamma(1 - s))


def dtn_constant(n, s):
    """Multiplier of -lim y^{1-2s} d_y v giving (-Delta)^s u: C(n,s) / (2 s gamma(n,s))."""
    return cns_const(n, s) / (2 * s * gamma_closed(n, s))


def alternative_dtn_constant(s):
    """Gamma(s) / (2^{1-2s} Gamma(1-s)); equals dtn_constant for every n."""
    return math.gamma(s) / (2 ** (1 - 2 * s) * math.gamma(1 - s))


@dataclass
class BoundaryDatum:
    """A function on the real line with a declared decay class.

    kind:
      'compact'  -- zero outside ``support``;
      'growth'   -- |u(x)| <= M (1 + |x|)^growth with growth < 2s;
      'poly'     -- equal to the polynomial ``coeffs`` (ascending powers)
                    outside ``[-R0, R0]``; integrals use finite parts.
    """

    fn: Callable
    kind: str = "growth"
    support: tuple = (-np.inf, np.inf)
    growth: float = 0.0
    coeffs: tuple = ()
    R0: float = 0.0
    breakpoints: tuple = ()
    meta: dict = dfield(default_factory=dict)

    def __call__(self, x):
        return np.asarray(self.fn(np.asarray(x, float)), float)

    @classmethod
    def polynomial(cls, coeffs):
        c = tuple(float(v) for v in coeffs)
        return cls(lambda x: np.polynomial.polynomial.polyval(x, c), "poly", coeffs=c, growth=len(c) - 1)

    @classmethod
    def from_poly(cls, p: MultiPoly):
        """Trace on y = 0 of a polynomial in (x, y)."""
        if p.nvars != 2:
            raise ValueError("integral operators are one dimensional")
        deg = max((m[0] for m, _ in p if m[1] == 0), default=0)
        c = [0.0] * (deg + 1)
        for m, v in p:
            if m[1] == 0:
                c[m[0]] = float(v)
        return cls.polynomial(c)

    @classmethod
    def compact(cls, fn, support, breakpoints=()):
        return cls(fn, "compact", support=tuple(support), breakpoints=tuple(breakpoints))

    def check(self, s):
        if self.kind == "growth" and self.growth >= 2 * s:
            raise DivergentIntegral(f"datum growth {self.growth} is not below 2s = {2 * s}")


def bump(x, center=0.0, width=1.0, amp=1.0):
    """Smooth compactly supported bump exp(1 - 1/(1 - t^2)), t = (x - center)/width."""
    t = (np.asarray(x, float) - center) / width
    out = np.zeros_like(t)
    inside = np.abs(t) < 1
    out[inside] = amp * np.exp(1 - 1 / (1 - t[inside] ** 2))
    return out


def bump_datum(center=0.0, width=1.0, amp=1.0):
    return BoundaryDatum.compact(lambda x: bump(x, center, width, amp), (center - width, center + width))


def _pair_poly(coeffs, x):
    """Ascending coefficients in t of p(x + t) + p(x - t) (even powers only survive)."""
    P = np.polynomial.Polynomial(coeffs)
    shifted = P(np.polynomial.Polynomial([x, 1.0]))
    c = np.zeros(len(coeffs))
    c[: len(shifted.coef)] = shifted.coef
    out = 2 * c
    out[1::2] = 0.0
    return out


def _quad(f, lo, hi, points=(), alg=None):
    pts = sorted(p for p in set(points) if lo < p < hi)
    edges = [lo, *pts, hi]
    tot = err = 0.0
    with warnings.catch_warnings():
        # roundoff warnings at 1e-12 requested accuracy are expected; err is reported
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for l, h in zip(edges[:-1], edges[1:]):
            if alg is not None and l == lo == 0.0:
                v, e = integrate.quad(f, l, h, weight="alg", wvar=(alg, 0.0), epsabs=0, epsrel=1e-12, limit=400)
            else:
                v, e = integrate.quad(f, l, h, epsabs=0, epsrel=1e-12, limit=400)
            tot += v
            err += e
    return tot, err


def _edges(datum: BoundaryDatum, x):
    """Distances from x at which the datum has kinks or support edges."""
    out = [abs(x - e) for e in (*datum.support, *datum.breakpoints) if np.isfinite(e)]
    return out


def poisson_extend(datum: BoundaryDatum, x, y, s, with_error=False):
    """v(x, y) = gamma y^{2s} int u(eta) (|x - eta|^2 + y^2)^{-(1/2 + s)} d eta  (n = 1)."""
    if y <= 0:
        raise ValueError("y must be positive")
    if not callable(datum):
        datum = BoundaryDatum.from_poly(datum) if isinstance(datum, MultiPoly) else datum
    datum.check(s)
    g = gamma_closed(1, s)
    x = float(x)
    e = 0.5 + s

    def f(t):
        return (datum(x + t) + datum(x - t)) * (t * t + y * y) ** (-e)

    pts = [y, 4 * y, *_edges(datum, x)]
    if datum.kind == "compact":
        T = max(abs(x - datum.support[0]), abs(x - datum.support[1]))
        val, err = _quad(f, 0.0, T, pts)
    elif datum.kind == "poly":
        R = max(4 * y, 1.0, 2 * datum.R0 + 2 * abs(x))
        val, err = _quad(f, 0.0, R, pts)
        val += _finite_part_tail(_pair_poly(datum.coeffs, x), y, e, R)
    else:
        R = max(4 * y, 1.0) + 2 * abs(x)
        v1, e1 = _quad(f, 0.0, R, pts)
        v2, e2 = integrate.quad(f, R, np.inf, epsabs=0, epsrel=1e-12, limit=400)
        val, err = v1 + v2, e1 + e2
    scale = g * y ** (2 * s)
    return (scale * val, scale * err) if with_error else scale * val


def _finite_part_tail(pair_coeffs, y, e, R, terms=80):
    """Finite part of int_R^inf P(t) (t^2 + y^2)^{-e} dt with P a polynomial.

    Expands (t^2 + y^2)^{-e} = sum_j binom(-e, j) y^{2j} t^{-2e-2j} (valid for
    t > y) and integrates each power with FP int_R^inf t^p dt = -R^{p+1}/(p+1).
    """
    tot = 0.0
    for m, cm in enumerate(pair_coeffs):
        if cm == 0:
            continue
        binom = 1.0  # binom(-e, j), by recurrence (scipy gives nan at negative integers)
        for j in range(terms):
            if j:
                binom *= (-e - j + 1) / j
            b = binom * y ** (2 * j)
            p = m - 2 * e - 2 * j
            if abs(p + 1) < 1e-14:
                raise DivergentIntegral("logarithmic term in the finite part")
            term = cm * b * (-R ** (p + 1) / (p + 1))
            tot += term
            if j > 2 and abs(term) < 1e-18 * max(abs(tot), 1e-300):
                break
    return tot


def _excess_over_datum(datum: BoundaryDatum, x, y, s):
    """(v(x, y) - u(x)) / y^{2s} = gamma int_0^inf (u(x+h) + u(x-h) - 2u(x)) (h^2 + y^2)^{-1/2-s} dh."""
    g = gamma_closed(1, s)
    e = 0.5 + s
    u0 = float(datum(np.array([x]))[0])
    hfloor = 1e-4 * max(y, 1e-2)

    def num(h):
        h = max(h, hfloor)
        return datum(x + h) + datum(x - h) - 2 * u0

    def f(h):
        return num(h) * (h * h + y * y) ** (-e)

    pts = [y, 4 * y, *_edges(datum, x)]
    if datum.kind == "compact":
        T = max(abs(x - datum.support[0]), abs(x - datum.support[1]))
        val, err = _quad(f, 0.0, T, pts)
        # beyond the support only -2 u(x) remains
        tail, _ = integrate.quad(lambda h: (h * h + y * y) ** (-e), T, np.inf, epsabs=0, epsrel=1e-13)
        val += -2 * u0 * tail
    elif datum.kind == "poly":
        R = max(4 * y, 1.0, 2 * datum.R0 + 2 * abs(x))
        val, err = _quad(f, 0.0, R, pts)
        pc = _pair_poly(datum.coeffs, x)
        pc[0] -= 2 * u0
        val += _finite_part_tail(pc, y, e, R)
    else:
        datum.check(s)
        R = max(4 * y, 1.0) + 2 * abs(x)
        v1, err = _quad(f, 0.0, R, pts)
        v2, _ = integrate.quad(f, R, np.inf, epsabs=0, epsrel=1e-12, limit=400)
        val = v1 + v2
    return g * val


def dtn(datum, x, s, ys=None, with_error=False):
    """Dirichlet-to-Neumann value of the extension at x, equal to (-Delta)^s u(x).

    The excess c(y) = (v(x, y) - u(x)) / y^{2s} is sampled on a geometric
    ladder of y and extrapolated to y = 0 by least squares in the powers
    1, y^{2-2s}, y^2, y^{4-2s} that appear in its expansion.  Since
    y^{1-2s} d_y v -> 2s c(0), the result is -C(1,s)/gamma(1,s) * c(0).
    """
    if isinstance(datum, MultiPoly):
        datum = BoundaryDatum.from_poly(datum)
    ys = 0.05 * 2.0 ** -np.arange(8) if ys is None else np.asarray(ys, float)
    c = np.array([_excess_over_datum(datum, float(x), y, s) for y in ys])
    A = np.stack([np.ones_like(ys), ys ** (2 - 2 * s), ys**2, ys ** (4 - 2 * s)], axis=1)
    coef, *_ = np.linalg.lstsq(A, c, rcond=None)
    c0 = coef[0]
    # second estimate with one basis function fewer gauges the extrapolation error
    coef2, *_ = np.linalg.lstsq(A[:, :3], c, rcond=None)
    fac = -cns_const(1, s) / gamma_closed(1, s)
    val = fac * c0
    return (val, abs(fac * (coef2[0] - c0))) if with_error else val


def frac_laplacian_direct(datum, x, s, with_error=False):
    """(-Delta)^s u(x) = C(1,s) int_0^inf (2u(x) - u(x+h) - u(x-h)) h^{-1-2s} dh.

    The symmetric pairing removes the principal value; the numerator over
    h^2 is integrated against the algebraic weight h^{1-2s} near 0.
    """
    if isinstance(datum, MultiPoly):
        datum = BoundaryDatum.from_poly(datum)
    if not callable(datum):
        raise TypeError("datum must be callable")
    C = cns_const(1, s)
    x = float(x)
    u0 = float(datum(np.array([x]))[0])
    hfloor = 1e-4

    def g(h):
        h = max(h, hfloor)
        return (2 * u0 - datum(x + h) - datum(x - h)) / (h * h)

    edges = _edges(datum, x)
    h0 = min([1.0, *[d for d in edges if d > 0]]) * 0.5
    v0, e0 = _quad(g, 0.0, h0, alg=1 - 2 * s)

    def f(h):
        return (2 * u0 - datum(x + h) - datum(x - h)) * h ** (-1 - 2 * s)

    if datum.kind == "compact":
        T = max(abs(x - datum.support[0]), abs(x - datum.support[1]), h0)
        v1, e1 = _quad(f, h0, T, edges)
        v1 += 2 * u0 * T ** (-2 * s) / (2 * s)
    elif datum.kind == "poly":
        R = max(1.0, 2 * datum.R0 + 2 * abs(x), h0)
        v1, e1 = _quad(f, h0, R, edges)
        pc = -_pair_poly(datum.coeffs, x)
        pc[0] += 2 * u0
        v1 += sum(-cm * R ** (m - 2 * s) / (m - 2 * s) for m, cm in enumerate(pc) if cm != 0)
    else:
        datum.check(s)
        v1, e1 = _quad(f, h0, 10 * h0 + 2 * abs(x), edges)
        v2, e2 = integrate.quad(f, 10 * h0 + 2 * abs(x), np.inf, epsabs=0, epsrel=1e-12, limit=400)
        v1 += v2
        e1 += e2
    val = C * (v0 + v1)
    return (val, C * (e0 + e1)) if with_error else val
