"""Exact homogeneous solutions of div(|y|^a grad u) = 0.

Polynomials live in R^{n+1} with variables (x_1, ..., x_n, y); exponent
tuples carry y last.  Coefficients are ``Fraction`` for rational ``a``, but
anything supporting field arithmetic works (floats, or sympy expressions in
a symbolic ``a``).
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping

import numpy as np

try:  # symbolic-a support is optional
    import sympy
except ImportError:  # pragma: no cover
    sympy = None


class ParityError(ValueError):
    """A polynomial has the wrong symmetry for the requested operation."""


class PoleError(ZeroDivisionError):
    """A coefficient formula hit a vanishing denominator."""


def as_exact(a):
    """Coerce a rational-looking parameter to Fraction; keep sympy symbols."""
    if sympy is not None and isinstance(a, sympy.Basic):
        if a.is_Rational:
            return Fraction(int(a.p), int(a.q))
        return a
    if isinstance(a, str):
        return Fraction(a)
    if isinstance(a, float):
        return Fraction(a).limit_denominator(10**12)
    return Fraction(a)


def _iszero(c) -> bool:
    if sympy is not None and isinstance(c, sympy.Basic):
        return sympy.cancel(c) == 0
    return c == 0


def _simplify(c):
    if sympy is not None and isinstance(c, sympy.Basic):
        return sympy.cancel(c)
    return c


class MultiPoly:
    """Sparse multivariate polynomial, immutable, last variable is ``y``."""

    __slots__ = ("nvars", "_terms")

    def __init__(self, terms: Mapping[tuple, object] | None = None, nvars: int = 2):
        clean = {}
        for mono, c in (terms or {}).items():
            mono = tuple(int(e) for e in mono)
            if len(mono) != nvars:
                raise ValueError(f"monomial {mono} does not have {nvars} exponents")
            if any(e < 0 for e in mono):
                raise ValueError(f"negative exponent in {mono}")
            c = _simplify(c)
            if not _iszero(c):
                clean[mono] = c
        self.nvars = nvars
        self._terms = clean

    # construction -----------------------------------------------------
    @classmethod
    def constant(cls, c, nvars=2):
        return cls({(0,) * nvars: c}, nvars)

    @classmethod
    def monomial(cls, exps, c=1):
        return cls({tuple(exps): c}, len(exps))

    @classmethod
    def variable(cls, i, nvars=2):
        e = [0] * nvars
        e[i] = 1
        return cls({tuple(e): Fraction(1)}, nvars)

    # basic protocol ---------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    @property
    def n(self) -> int:
        return self.nvars - 1

    def __iter__(self):
        return iter(sorted(self._terms.items()))

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def coeff(self, mono):
        return self._terms.get(tuple(mono), 0)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MultiPoly.constant(other, self.nvars)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.nvars == other.nvars and (self - other).is_zero()

    def __hash__(self):
        return hash((self.nvars, frozenset(self._terms.items())))

    def __repr__(self):
        if not self._terms:
            return "MultiPoly(0)"
        return "MultiPoly(" + " + ".join(f"({c})*{m}" for m, c in self) + ")"

    # arithmetic -------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            if other.nvars != self.nvars:
                raise ValueError("polynomials live in different dimensions")
            return other
        return MultiPoly.constant(other, self.nvars)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, 0) + c
        return MultiPoly(out, self.nvars)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly({m: -c for m, c in self._terms.items()}, self.nvars)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            return MultiPoly({m: c * other for m, c in self._terms.items()}, self.nvars)
        other = self._coerce(other)
        out: dict = {}
        for (m1, c1), (m2, c2) in itertools.product(self._terms.items(), other._terms.items()):
            m = tuple(i + j for i, j in zip(m1, m2))
            out[m] = out.get(m, 0) + c1 * c2
        return MultiPoly(out, self.nvars)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return MultiPoly({m: c / scalar for m, c in self._terms.items()}, self.nvars)

    def __pow__(self, k: int):
        out = MultiPoly.constant(Fraction(1), self.nvars)
        for _ in range(k):
            out = out * self
        return out

    # calculus ---------------------------------------------------------
    def diff(self, i: int, times: int = 1):
        out = {}
        for m, c in self._terms.items():
            if m[i] < times:
                continue
            fac = math.perm(m[i], times)
            mm = list(m)
            mm[i] -= times
            out[tuple(mm)] = c * fac
        return MultiPoly(out, self.nvars)

    def integrate(self, i: int):
        """Antiderivative in variable i with zero constant."""
        out = {}
        for m, c in self._terms.items():
            mm = list(m)
            mm[i] += 1
            out[tuple(mm)] = c / Fraction(mm[i])
        return MultiPoly(out, self.nvars)

    def laplacian_x(self):
        out = MultiPoly({}, self.nvars)
        for i in range(self.n):
            out = out + self.diff(i, 2)
        return out

    def gradient(self):
        return [self.diff(i) for i in range(self.nvars)]

    # structure --------------------------------------------------------
    @property
    def degree(self) -> int:
        return max((sum(m) for m in self._terms), default=-1)

    def is_homogeneous(self, k: int | None = None) -> bool:
        degs = {sum(m) for m in self._terms}
        if not degs:
            return True
        return len(degs) == 1 and (k is None or degs == {k})

    def homogeneous_part(self, k: int):
        return MultiPoly({m: c for m, c in self._terms.items() if sum(m) == k}, self.nvars)

    @property
    def even_in_y(self) -> bool:
        return all(m[-1] % 2 == 0 for m in self._terms)

    @property
    def odd_in_y(self) -> bool:
        return all(m[-1] % 2 == 1 for m in self._terms)

    def depends_on_y(self) -> bool:
        return any(m[-1] > 0 for m in self._terms)

    def parity_parts(self):
        """Split into the parts even and odd in y."""
        ev = {m: c for m, c in self._terms.items() if m[-1] % 2 == 0}
        od = {m: c for m, c in self._terms.items() if m[-1] % 2 == 1}
        return MultiPoly(ev, self.nvars), MultiPoly(od, self.nvars)

    def trace(self):
        """Restriction to y = 0, kept in n+1 variables."""
        return MultiPoly({m: c for m, c in self._terms.items() if m[-1] == 0}, self.nvars)

    def euler(self):
        """<X, grad p>; equals k p for a k-homogeneous p."""
        return MultiPoly({m: c * sum(m) for m, c in self._terms.items()}, self.nvars)

    def embed(self, nvars: int, positions: Iterable[int]):
        """Re-index variables: variable j goes to slot positions[j]."""
        positions = list(positions)
        out = {}
        for m, c in self._terms.items():
            mm = [0] * nvars
            for j, e in enumerate(m):
                mm[positions[j]] += e
            out[tuple(mm)] = c
        return MultiPoly(out, nvars)

    def affine(self, X0, r=1):
        """p(X0 + r X), expanded exactly when the inputs are rational."""
        X0 = [Fraction(v) if isinstance(v, float) else v for v in X0]
        r = Fraction(r) if isinstance(r, float) else r
        lin = [MultiPoly.constant(X0[i], self.nvars) + MultiPoly.variable(i, self.nvars) * r
               for i in range(self.nvars)]
        cache = {}

        def power(i, e):
            if (i, e) not in cache:
                cache[(i, e)] = lin[i] ** e
            return cache[(i, e)]

        out = MultiPoly({}, self.nvars)
        for m, c in self._terms.items():
            term = MultiPoly.constant(c, self.nvars)
            for i, e in enumerate(m):
                if e:
                    term = term * power(i, e)
            out = out + term
        return out

    def map_coeffs(self, fn: Callable):
        return MultiPoly({m: fn(c) for m, c in self._terms.items()}, self.nvars)

    def subs_a(self, a):
        """Substitute a value for a symbolic weight parameter."""
        def sub(c):
            if sympy is not None and isinstance(c, sympy.Basic):
                v = c.subs(A_SYMBOL, sympy.Rational(str(a)) if isinstance(a, Fraction) else a)
                return as_exact(v) if v.is_Rational else v
            return c
        return self.map_coeffs(sub)

    def to_float(self):
        return self.map_coeffs(float)

    # evaluation -------------------------------------------------------
    def __call__(self, X):
        """Float evaluation at an (m, nvars) array (or a single point)."""
        X = np.asarray(X, dtype=float)
        single = X.ndim == 1
        X = np.atleast_2d(X)
        out = np.zeros(X.shape[0])
        if not self._terms:
            return out[0] if single else out
        maxe = [max(m[i] for m in self._terms) for i in range(self.nvars)]
        powers = [np.vander(X[:, i], maxe[i] + 1, increasing=True) for i in range(self.nvars)]
        for m, c in self._terms.items():
            term = np.full(X.shape[0], float(c))
            for i, e in enumerate(m):
                if e:
                    term = term * powers[i][:, e]
            out += term
        return out[0] if single else out

    def exact_value(self, point):
        tot = 0
        for m, c in self._terms.items():
            t = c
            for xi, e in zip(point, m):
                t = t * Fraction(xi) ** e
            tot = tot + t
        return tot

    # serialisation ----------------------------------------------------
    def to_records(self):
        recs = []
        for m, c in self:
            c = as_exact(c)
            if not isinstance(c, Fraction):
                raise TypeError("only rational coefficients serialise")
            recs.append({"exponents": list(m), "num": c.numerator, "den": c.denominator})
        return recs


def poly_to_json(p: MultiPoly, a=None, parity: str | None = None) -> str:
    if parity is None:
        parity = "even" if p.even_in_y else ("odd" if p.odd_in_y else "none")
    if a is None:
        a_str = "symbolic"
    else:
        fa = as_exact(a)
        a_str = f"{fa.numerator}/{fa.denominator}" if isinstance(fa, Fraction) else "symbolic"
    doc = {"header": {"n": p.n, "a": a_str, "parity": parity}, "terms": p.to_records()}
    return json.dumps(doc, sort_keys=True)


def poly_from_json(text: str) -> tuple[MultiPoly, dict]:
    doc = json.loads(text)
    head = doc["header"]
    nvars = head["n"] + 1
    terms = {tuple(r["exponents"]): Fraction(r["num"], r["den"]) for r in doc["terms"]}
    return MultiPoly(terms, nvars), head


# ---------------------------------------------------------------------------
# symbolic parameter
A_SYMBOL = sympy.Symbol("a") if sympy is not None else None


def symbolic_a():
    if sympy is None:  # pragma: no cover
        raise RuntimeError("sympy is required for symbolic a")
    return A_SYMBOL


# ---------------------------------------------------------------------------
# the operator


def apply_La(p: MultiPoly, a) -> MultiPoly:
    """|y|^{-a} div(|y|^a grad p) = Lap_x p + p_yy + (a/y) p_y for p even in y."""
    if not p.even_in_y:
        raise ParityError("apply_La needs a polynomial even in y; use QuasiPoly for odd parts")
    out = p.laplacian_x()
    yy = {}
    for m, c in p.terms.items():
        b = m[-1]
        if b >= 2:
            mm = m[:-1] + (b - 2,)
            yy[mm] = yy.get(mm, 0) + c * (b * (b - 1) + a * b)
    return out + MultiPoly(yy, p.nvars)


@dataclass(frozen=True)
class QuasiPoly:
    """base * y|y|^{-a} when ``factor`` is set, otherwise just ``base``."""

    base: MultiPoly
    a: object
    factor: bool = True

    def __post_init__(self):
        if not self.base.even_in_y:
            raise ParityError("QuasiPoly base must be even in y")

    @property
    def homogeneity(self):
        if not self.base.is_homogeneous():
            raise ValueError("base is not homogeneous")
        return self.base.degree + (1 - self.a if self.factor else 0)

    @property
    def antisymmetric(self) -> bool:
        return self.factor

    def residual(self):
        """Residual of L_a, as the polynomial multiplying y|y|^{-a}."""
        if self.factor:
            return apply_La(self.base, 2 - self.a)
        return apply_La(self.base, self.a)

    def __call__(self, X):
        X = np.atleast_2d(np.asarray(X, float))
        vals = self.base(X)
        if self.factor:
            y = X[:, -1]
            vals = vals * np.sign(y) * np.abs(y) ** (1 - float(self.a))
        return vals


# ---------------------------------------------------------------------------
# explicit families


def coeff_c(m: int, a, t: int):
    """Coefficient of x^{2t} y^{2m-2t} in the degree-2m planar family."""
    if not 0 <= t <= m:
        raise ValueError("need 0 <= t <= m")
    a = as_exact(a) if not isinstance(a, float) else a
    j = m - t
    val = Fraction((-1) ** j, math.factorial(2 * t) * 2**j * math.factorial(j))
    for i in range(1, j + 1):
        den = 2 * i + a - 1
        if _iszero(den):
            raise PoleError(f"2i+a-1 vanishes for i={i}, a={a}")
        val = val / den
    return _simplify(val)


def coeff_c_gamma(m: int, a: float, t: int) -> float:
    """Gamma-function form of coeff_c (float, for cross-checks)."""
    j = m - t
    return ((-1) ** j * math.gamma(0.5 + a / 2)
            / (math.factorial(2 * t) * math.factorial(j) * 2 ** (2 * j) * math.gamma(j + 0.5 + a / 2)))


def planar_even(k: int, a) -> MultiPoly:
    """The y-dependent symmetric solution of degree k (k even) in R^2."""
    if k < 2 or k % 2:
        raise ParityError(f"planar_even needs an even degree >= 2, got {k}")
    m = k // 2
    terms = {(2 * t, 2 * m - 2 * t): coeff_c(m, a, t) for t in range(m + 1)}
    return MultiPoly(terms, 2)


def planar_odd(k: int, a) -> MultiPoly:
    """Odd-in-x planar solution of degree k, the x-antiderivative of planar_even(k-1)."""
    if k < 3 or k % 2 == 0:
        raise ParityError(f"planar_odd needs an odd degree >= 3, got {k}")
    return planar_even(k - 1, a).integrate(0)


def garofalo_extend(p: MultiPoly, a) -> MultiPoly:
    """Unique even-in-y solution q with q(x, 0) = p(x).

    ``p`` is given in n+1 variables with no y dependence.
    """
    if p.depends_on_y():
        raise ValueError("p must not depend on y")
    a = as_exact(a) if not isinstance(a, float) else a
    out = MultiPoly({}, p.nvars)
    lap = p
    c2k = Fraction(1)
    sign = 1
    fact = 1
    k = 0
    ymono = MultiPoly.constant(Fraction(1), p.nvars)
    y2 = MultiPoly.monomial((0,) * (p.nvars - 1) + (2,), Fraction(1))
    while not lap.is_zero():
        out = out + lap * ymono * (sign * c2k / fact)
        k += 1
        den = 2 * k - 1 + a  # 2k - 2s with s = (1 - a)/2
        if _iszero(den):
            raise PoleError(f"extension coefficient has a pole at a={a}")
        c2k = c2k * (2 * k - 1) / den
        sign = -sign
        fact *= (2 * k) * (2 * k - 1)
        lap = lap.laplacian_x()
        ymono = ymono * y2
    return out


def antisymmetric_from_symmetric(v: MultiPoly, a) -> QuasiPoly:
    """v y|y|^{-a} for an L_{2-a}-harmonic symmetric v."""
    if not apply_La(v, 2 - as_exact(a) if not isinstance(a, float) else 2 - a).is_zero():
        raise ValueError("v is not L_{2-a}-harmonic")
    return QuasiPoly(v, a, True)


def decompose(u: Callable, X):
    """Even and odd parts in y of a callable field, evaluated at X."""
    X = np.atleast_2d(np.asarray(X, float))
    Xr = X.copy()
    Xr[:, -1] = -Xr[:, -1]
    up, um = np.asarray(u(X), float), np.asarray(u(Xr), float)
    return 0.5 * (up + um), 0.5 * (up - um)


def x_monomial_basis(n: int, k: int):
    """Exponent tuples (in n+1 variables) of the degree-k monomials in x."""
    out = []
    for combo in itertools.combinations_with_replacement(range(n), k):
        e = [0] * (n + 1)
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return sorted(set(out), reverse=True)


def symmetric_basis(n: int, k: int, a):
    """Garofalo extensions of the degree-k x-monomials: a basis of the symmetric class."""
    return [garofalo_extend(MultiPoly.monomial(e, Fraction(1)), a) for e in x_monomial_basis(n, k)]


def extension_matrix_nullity(n: int, d: int, a) -> int:
    """Dimension of the even-in-y degree-d solutions with zero trace.

    Uniqueness of the extension means this is zero; computed by exact rank
    of the linear map (coefficients) -> (L_a q, q(x, 0)).
    """
    import sympy as sp

    monos = [m for m in _all_monomials(n + 1, d) if m[-1] % 2 == 0 and m[-1] > 0]
    if not monos:
        return 0
    rows: dict = {}
    for j, m in enumerate(monos):
        r = apply_La(MultiPoly.monomial(m, Fraction(1)), as_exact(a))
        for mm, c in r.terms.items():
            rows.setdefault(mm, {})[j] = c
    M = sp.zeros(len(rows), len(monos))
    for i, (mm, cols) in enumerate(sorted(rows.items())):
        for j, c in cols.items():
            M[i, j] = sp.Rational(c.numerator, c.denominator) if isinstance(c, Fraction) else c
    return len(monos) - M.rank()


def _all_monomials(nvars: int, d: int):
    for combo in itertools.product(range(d + 1), repeat=nvars):
        if sum(combo) == d:
            yield combo


# ---------------------------------------------------------------------------
# exact weighted moments


def _pochhammer(x, m):
    out = Fraction(1) if isinstance(x, Fraction) else 1
    for i in range(m):
        out = out * (x + i)
    return out


def sphere_moment_ratio(mono, a) -> Fraction:
    """Integral of |y|^a X^mono over S^n divided by the weighted sphere area."""
    if any(e % 2 for e in mono):
        return Fraction(0)
    a = as_exact(a)
    n = len(mono) - 1
    num = Fraction(1)
    for e in mono[:-1]:
        num *= _pochhammer(Fraction(1, 2), e // 2)
    num *= _pochhammer((a + 1) / 2, mono[-1] // 2)
    den = _pochhammer((n + 1 + a) / 2, sum(mono) // 2)
    return num / den


def weighted_moment(p: MultiPoly, r: float, a, kind: str = "sphere") -> float:
    """Integral of |y|^a p over the sphere (or ball) of radius r about 0."""
    from .quadrature import sphere_measure_const

    n = p.n
    S = sphere_measure_const(n, float(a))
    tot = 0.0
    for m, c in p:
        ratio = sphere_moment_ratio(m, a)
        if ratio == 0:
            continue
        d = sum(m)
        if kind == "sphere":
            scale = r ** (n + float(a) + d)
        elif kind == "ball":
            scale = r ** (n + float(a) + d + 1) / (n + float(a) + d + 1)
        else:
            raise ValueError(kind)
        tot += float(c) * float(ratio) * scale
    return tot * S


# ---------------------------------------------------------------------------
# hypergeometric cross-check


def hyp2f1_terminating(a1: float, b1: float, c1: float, z: float, nterms: int) -> float:
    """Partial sum of 2F1 with ``nterms`` terms (exact when a1 = -(nterms-1))."""
    term, tot = 1.0, 1.0
    for j in range(nterms - 1):
        term *= (a1 + j) * (b1 + j) / ((c1 + j) * (j + 1)) * z
        tot += term
    return tot


def planar_hypergeometric(k: int, a: float, x, y):
    """Closed form of the planar family through a terminating 2F1, as a float.

    The series is evaluated in homogenised form so that y = 0 is allowed.
    """
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    if k % 2 == 0:
        m = k // 2
        pref = ((-1) ** m * math.gamma(0.5 + a / 2)
                / (2**k * math.gamma(1 + k / 2) * math.gamma(0.5 + a / 2 + k / 2)))
        a1, b1, c1 = -k / 2, -k / 2 - a / 2 + 0.5, 0.5
        lead_x, ypow = 0, k
    else:
        m = (k - 1) // 2
        pref = -((-1) ** ((k + 1) // 2) * math.gamma(0.5 + a / 2)
                 / (2 ** (k - 1) * math.gamma(0.5 + k / 2) * math.gamma(a / 2 + k / 2)))
        a1, b1, c1 = 0.5 - k / 2, 1 - k / 2 - a / 2, 1.5
        lead_x, ypow = 1, k - 1
    tot = np.zeros(np.broadcast(x, y).shape)
    term = 1.0
    for j in range(m + 1):
        # (-x^2/y^2)^j y^ypow
        tot = tot + term * (-1) ** j * x ** (2 * j + lead_x) * y ** (ypow - 2 * j)
        term *= (a1 + j) * (b1 + j) / ((c1 + j) * (j + 1))
    return pref * tot
