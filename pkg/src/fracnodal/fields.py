"""Fields of the form u = e + y|y|^{-a} o with e, o smooth and even in y.

Every solution of div(|y|^a grad u) = 0 splits this way (the odd part of a
solution is y|y|^{-a} times a solution for the weight |y|^{2-a}).  Keeping
the two smooth factors separate lets every weighted integral be taken
against a pure power of |y| with a smooth integrand, which is what the
Gauss-Jacobi rules in :mod:`fracnodal.quadrature` are exact for.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .poly import MultiPoly, QuasiPoly


class Part:
    """A smooth function on R^{n+1}; subclasses give value and gradient."""

    nvars: int

    def value(self, X):
        raise NotImplementedError

    def grad(self, X):
        raise NotImplementedError

    def __call__(self, X):
        return self.value(X)


class PolyPart(Part):
    def __init__(self, poly: MultiPoly):
        self.exact = None if _all_float(poly) else poly
        self.poly = poly.to_float() if self.exact is not None else poly
        self.nvars = poly.nvars
        self._grad = [g for g in self.poly.gradient()]

    def value(self, X):
        return self.poly(np.atleast_2d(X))

    def grad(self, X):
        X = np.atleast_2d(X)
        return np.stack([g(X) for g in self._grad], axis=1)


def _all_float(p):
    return all(isinstance(c, float) for _, c in p)


class FuncPart(Part):
    """Wraps vectorised callables; the gradient defaults to central differences."""

    def __init__(self, fn, nvars, grad=None, h=1e-5):
        self.fn = fn
        self.nvars = nvars
        self._grad = grad
        self.h = h

    def value(self, X):
        return np.asarray(self.fn(np.atleast_2d(X)), float)

    def grad(self, X):
        X = np.atleast_2d(np.asarray(X, float))
        if self._grad is not None:
            return np.asarray(self._grad(X), float)
        out = np.empty_like(X)
        for i in range(self.nvars):
            e = np.zeros(self.nvars)
            e[i] = self.h
            out[:, i] = (self.value(X + e) - self.value(X - e)) / (2 * self.h)
        return out


def scale_part(part: Part, X0, r, factor) -> Part:
    """factor * part(X0 + r X); exact for polynomial parts with rational data."""
    if isinstance(part, PolyPart) and part.exact is not None and _symbol_free(part.exact):
        return PolyPart(part.exact.affine(list(np.asarray(X0, float)), float(r)) * Fraction(float(factor)))
    return ScaledPart(part, X0, r, factor)


def _symbol_free(p):
    return all(isinstance(c, (int, Fraction)) for _, c in p)


class ScaledPart(Part):
    """factor * part(X0 + r X)."""

    def __init__(self, part: Part, X0, r, factor):
        self.part = part
        self.X0 = np.asarray(X0, float)
        self.r = float(r)
        self.factor = float(factor)
        self.nvars = part.nvars

    def value(self, X):
        return self.factor * self.part.value(self.X0 + self.r * np.atleast_2d(X))

    def grad(self, X):
        return self.factor * self.r * self.part.grad(self.X0 + self.r * np.atleast_2d(X))


class SumPart(Part):
    def __init__(self, parts, coeffs):
        self.parts = list(parts)
        self.coeffs = [float(c) for c in coeffs]
        self.nvars = self.parts[0].nvars

    def value(self, X):
        return sum(c * p.value(X) for c, p in zip(self.coeffs, self.parts))

    def grad(self, X):
        return sum(c * p.grad(X) for c, p in zip(self.coeffs, self.parts))


def _as_part(obj, nvars):
    if obj is None or isinstance(obj, Part):
        return obj
    if isinstance(obj, MultiPoly):
        if not obj.even_in_y:
            raise ValueError("field parts must be even in y")
        return PolyPart(obj)
    if callable(obj):
        return FuncPart(obj, nvars)
    raise TypeError(f"cannot use {type(obj).__name__} as a field part")


class LaField:
    """u = even + y|y|^{-a} * odd, both parts even in y (``None`` = absent)."""

    def __init__(self, a, n, even=None, odd=None, name=""):
        self.a = float(a)
        self.n = int(n)
        self.even = _as_part(even, n + 1)
        self.odd = _as_part(odd, n + 1)
        self.name = name

    @property
    def nvars(self):
        return self.n + 1

    def _yfac(self, X):
        y = X[:, -1]
        return np.sign(y) * np.abs(y) ** (1.0 - self.a)

    def value(self, X):
        X = np.atleast_2d(np.asarray(X, float))
        out = np.zeros(X.shape[0])
        if self.even is not None:
            out = out + self.even.value(X)
        if self.odd is not None:
            out = out + self._yfac(X) * self.odd.value(X)
        return out

    __call__ = value

    def grad(self, X):
        """Gradient away from y = 0."""
        X = np.atleast_2d(np.asarray(X, float))
        out = np.zeros_like(X)
        if self.even is not None:
            out += self.even.grad(X)
        if self.odd is not None:
            y = X[:, -1]
            fac = self._yfac(X)
            out += fac[:, None] * self.odd.grad(X)
            out[:, -1] += (1 - self.a) * np.abs(y) ** (-self.a) * self.odd.value(X)
        return out

    def conormal(self, X):
        """lim |y|^a d_y u on y = 0, i.e. (1 - a) times the odd factor."""
        X = np.atleast_2d(np.asarray(X, float)).copy()
        X[:, -1] = 0.0
        if self.odd is None:
            return np.zeros(X.shape[0])
        return (1 - self.a) * self.odd.value(X)

    def even_field(self):
        return LaField(self.a, self.n, even=self.even, name=self.name + "[even]")

    def odd_field(self):
        return LaField(self.a, self.n, odd=self.odd, name=self.name + "[odd]")

    def is_zero(self):
        return self.even is None and self.odd is None

    def rescaled(self, X0, r, even_factor, odd_factor):
        """X -> u(X0 + r X) with separate multipliers on the two parts."""
        ev = None if self.even is None else scale_part(self.even, X0, r, even_factor)
        od = None if self.odd is None else scale_part(self.odd, X0, r, odd_factor * r ** (1 - self.a))
        return LaField(self.a, self.n, ev, od, name=self.name)

    def translated(self, X0):
        return self.rescaled(-np.asarray(X0, float), 1.0, 1.0, 1.0)

    def __add__(self, other):
        return combine([self, other], [1.0, 1.0])

    def __sub__(self, other):
        return combine([self, other], [1.0, -1.0])

    def __mul__(self, c):
        return combine([self], [c])

    __rmul__ = __mul__


def combine(fields, coeffs):
    a, n = fields[0].a, fields[0].n
    if any(f.a != a or f.n != n for f in fields):
        raise ValueError("fields must share a and n")
    ev = [(c, f.even) for c, f in zip(coeffs, fields) if f.even is not None]
    od = [(c, f.odd) for c, f in zip(coeffs, fields) if f.odd is not None]
    even = _sum_parts(ev) if ev else None
    odd = _sum_parts(od) if od else None
    return LaField(a, n, even, odd, name="+".join(f.name for f in fields))


def _sum_parts(pairs):
    if all(isinstance(p, PolyPart) and p.exact is not None and _symbol_free(p.exact) for _, p in pairs):
        tot = MultiPoly({}, pairs[0][1].nvars)
        for c, p in pairs:
            tot = tot + p.exact * Fraction(float(c))
        if tot.is_zero():
            return None
        return PolyPart(tot)
    return SumPart([p for _, p in pairs], [c for c, _ in pairs])


def as_field(obj, a=None, n=None) -> LaField:
    """Coerce a MultiPoly, QuasiPoly or LaField to a LaField."""
    if isinstance(obj, LaField):
        return obj
    if isinstance(obj, QuasiPoly):
        af = float(obj.a)
        if obj.factor:
            return LaField(af, obj.base.n, odd=obj.base)
        return LaField(af, obj.base.n, even=obj.base)
    if isinstance(obj, MultiPoly):
        if a is None:
            raise ValueError("weight exponent a is required for a bare polynomial")
        ev, od = obj.parity_parts()
        if not od.is_zero():
            raise ValueError("polynomial fields must be even in y; odd parts need the y|y|^-a factor")
        return LaField(float(a), obj.n, even=ev)
    if hasattr(obj, "as_field"):
        return obj.as_field()
    raise TypeError(f"cannot interpret {type(obj).__name__} as a field")


def poly_field(a, even: MultiPoly | None = None, odd: MultiPoly | None = None, name=""):
    n = (even if even is not None else odd).n
    return LaField(a, n, even, odd, name)
