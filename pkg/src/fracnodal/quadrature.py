"""Quadrature against the weight |y|^a on spheres and balls of R^{n+1}.

Points are written X = (x_1, ..., x_n, y); the last coordinate is the
direction orthogonal to the characteristic hyperplane {y = 0}.

Sphere rules are built recursively.  Writing t = y on S^n,

    dsigma_n = (1 - t^2)^{(n-2)/2} dt dsigma_{n-1},

and substituting u = t^2 turns |t|^a (1 - t^2)^{(n-2)/2} into a Jacobi
weight on [0, 1].  The only non-smoothness of the integrand (the power of
|y| at the equator) is thus absorbed into the Gauss-Jacobi nodes.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

DEFAULT_DEGREE = 30


class NonIntegrableWeight(ValueError):
    """Raised when |y|^a is not locally integrable (a <= -1)."""


@dataclass(frozen=True)
class WeightParam:
    """Weight |y|^a on R^{n+1} = R^n_x x R_y."""

    a: float
    n: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"dimension n must be >= 1, got {self.n}")
        if self.a <= -1:
            raise NonIntegrableWeight(f"|y|^a is not integrable for a={self.a}")

    @property
    def in_main_range(self) -> bool:
        return -1 < self.a < 1

    @property
    def dim(self) -> int:
        return self.n + 1

    def shifted(self, a: float) -> "WeightParam":
        return WeightParam(float(a), self.n)


def sphere_measure_const(n: int, a: float) -> float:
    """Weighted area of the unit sphere, the integral of |y|^a over S^n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if a <= -1:
        raise NonIntegrableWeight(f"|y|^a is not integrable for a={a}")
    return 2.0 * math.pi ** (n / 2) * math.gamma((a + 1) / 2) / math.gamma((n + 1 + a) / 2)


def ball_measure_const(n: int, a: float, r: float = 1.0) -> float:
    return r ** (n + a + 1) / (n + a + 1) * sphere_measure_const(n, a)


def _half_jacobi(npts: int, alpha: float, beta: float):
    """Nodes/weights on [0, 1] for u^alpha (1 - u)^beta."""
    x, w = roots_jacobi(npts, beta, alpha)
    u = 0.5 * (1.0 + x)
    w = w * 0.5 ** (alpha + beta + 1)
    return u, w


@dataclass(frozen=True)
class SphereRule:
    """Nodes on the unit sphere S^n with weights for |y|^a dsigma."""

    nodes: np.ndarray
    weights: np.ndarray
    degree: int
    a: float
    n: int

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


@dataclass(frozen=True)
class BallRule:
    """Radial Gauss-Jacobi (weight rho^{n+a}) times a SphereRule, unit ball."""

    radii: np.ndarray
    radial_weights: np.ndarray
    sphere: SphereRule

    @property
    def nodes(self) -> np.ndarray:
        return (self.radii[:, None, None] * self.sphere.nodes[None, :, :]).reshape(-1, self.sphere.n + 1)

    @property
    def weights(self) -> np.ndarray:
        return np.outer(self.radial_weights, self.sphere.weights).ravel()


def _freeze(arr):
    arr = np.ascontiguousarray(arr, dtype=float)
    arr.setflags(write=False)
    return arr


@lru_cache(maxsize=None)
def sphere_rule(n: int, a: float, degree: int = DEFAULT_DEGREE) -> SphereRule:
    """Product rule on S^n exact for polynomials of total degree <= degree."""
    if a <= -1:
        raise NonIntegrableWeight(f"|y|^a is not integrable for a={a}")
    if n == 0:
        return SphereRule(_freeze([[-1.0], [1.0]]), _freeze([1.0, 1.0]), degree, a, 0)
    npts = degree // 4 + 1
    u, wu = _half_jacobi(npts, (a - 1) / 2, (n - 2) / 2)
    t = np.sqrt(u)
    inner = sphere_rule(n - 1, 0.0, degree)
    nodes, weights = [], []
    for sign in (-1.0, 1.0):
        for ti, wi in zip(t, wu):
            rho = math.sqrt(max(1.0 - ti * ti, 0.0))
            pts = np.hstack([rho * inner.nodes, np.full((len(inner.weights), 1), sign * ti)])
            nodes.append(pts)
            weights.append(0.5 * wi * inner.weights)
    return SphereRule(_freeze(np.vstack(nodes)), _freeze(np.concatenate(weights)), degree, a, n)


@lru_cache(maxsize=None)
def ball_rule(n: int, a: float, degree: int = DEFAULT_DEGREE) -> BallRule:
    if n + a + 1 <= 0:
        raise NonIntegrableWeight(f"rho^(n+a) not integrable for n={n}, a={a}")
    npts = degree // 2 + 1
    x, w = roots_jacobi(npts, 0.0, n + a)
    rho = 0.5 * (1.0 + x)
    w = w * 0.5 ** (n + a + 1)
    return BallRule(_freeze(rho), _freeze(w), sphere_rule(n, a, degree))


def _check_weight(w: WeightParam):
    if not w.in_main_range:
        warnings.warn(f"weight exponent a={w.a} lies outside (-1, 1)", stacklevel=3)


def _center(X0, n):
    X0 = np.zeros(n + 1) if X0 is None else np.asarray(X0, dtype=float)
    if X0.shape != (n + 1,):
        raise ValueError(f"center must have {n + 1} coordinates")
    if X0[-1] != 0.0:
        raise ValueError("center must lie on the hyperplane y = 0")
    return X0


def _eval(f, pts):
    vals = np.asarray(f(pts), dtype=float)
    if not np.all(np.isfinite(vals)):
        raise FloatingPointError("integrand returned non-finite values")
    return vals


def _sphere_value(f, X0, r, w, degree):
    rule = sphere_rule(w.n, w.a, degree)
    vals = _eval(f, X0 + r * rule.nodes)
    return r ** (w.n + w.a) * float(np.dot(rule.weights, vals))


def _ball_value(f, X0, r, w, degree):
    rule = ball_rule(w.n, w.a, degree)
    vals = _eval(f, X0 + r * rule.nodes)
    return r ** (w.n + w.a + 1) * float(np.dot(rule.weights, vals))


def integrate_sphere(f, X0, r, w: WeightParam, degree=DEFAULT_DEGREE, with_error=False):
    """Integral of |y|^a f over the sphere of radius r centred at X0 on {y=0}.

    ``f`` takes an (m, n+1) array of points and returns m values.  With
    ``with_error`` the result is ``(value, estimate)`` where the estimate is
    the change under a refined rule.
    """
    if r <= 0:
        raise ValueError("radius must be positive")
    _check_weight(w)
    X0 = _center(X0, w.n)
    val = _sphere_value(f, X0, r, w, degree)
    if not with_error:
        return val
    fine = _sphere_value(f, X0, r, w, degree + degree // 2 + 4)
    return fine, abs(fine - val)


def integrate_ball(f, X0, r, w: WeightParam, degree=DEFAULT_DEGREE, with_error=False):
    """Integral of |y|^a f over the ball of radius r centred at X0 on {y=0}."""
    if r <= 0:
        raise ValueError("radius must be positive")
    _check_weight(w)
    X0 = _center(X0, w.n)
    val = _ball_value(f, X0, r, w, degree)
    if not with_error:
        return val
    fine = _ball_value(f, X0, r, w, degree + degree // 2 + 4)
    return fine, abs(fine - val)


def segment_rule(npts: int = 20):
    """Gauss-Legendre nodes/weights on [0, 1] for integrals along segments of {y=0}."""
    x, w = np.polynomial.legendre.leggauss(npts)
    return 0.5 * (x + 1.0), 0.5 * w


def integrate_segment(f, p0, p1, npts: int = 20) -> float:
    p0 = np.asarray(p0, float)
    p1 = np.asarray(p1, float)
    t, w = segment_rule(npts)
    pts = p0[None, :] + t[:, None] * (p1 - p0)[None, :]
    return float(np.linalg.norm(p1 - p0) * np.dot(w, _eval(f, pts)))
