"""Nodal sets of planar fields (one tangential variable x and y).

Nodal lines are extracted by marching squares on a sampled grid.  Length in
a disk is measured three ways: exact clipping of the polyline, the Minkowski
content of a thin buffer (shapely), and the Crofton formula
    length = 1/2 int_0^pi int_R #(line(p, theta) cap Gamma) dp dtheta
evaluated by counting sign changes along families of parallel chords.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dfield

import numpy as np
import shapely
from skimage import measure

from .fields import LaField, as_field
from .monotonicity import almgren
from .poly import MultiPoly, QuasiPoly
from .solver import GridField, conormal_derivative


def _evaluator(field, a=None):
    if isinstance(field, GridField):
        f = field.as_field()
        return f.value
    if isinstance(field, (LaField, QuasiPoly)):
        return as_field(field).value
    if isinstance(field, MultiPoly):
        p = field.to_float()
        return lambda X: p(X)
    if callable(field):
        return lambda X: np.asarray(field(X), float)
    raise TypeError(f"cannot evaluate {type(field).__name__}")


def sample_plane(field, R=1.0, N=401, center=(0.0, 0.0)):
    """Values on an N x N vertex grid covering [cx-R, cx+R] x [cy-R, cy+R]."""
    xs = np.linspace(center[0] - R, center[0] + R, N)
    ys = np.linspace(center[1] - R, center[1] + R, N)
    if isinstance(field, GridField) and field.n == 1:
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        vals = field.as_field().value(np.column_stack([X.ravel(), Y.ravel()])).reshape(N, N)
        return xs, ys, vals
    f = _evaluator(field)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    return xs, ys, f(np.column_stack([X.ravel(), Y.ravel()])).reshape(N, N)


@dataclass
class NodalSet:
    segments: np.ndarray  # (m, 2, 2): segment endpoints (x, y)
    lines: list  # polylines, each (k, 2)
    resolution: float
    zero_tol: float
    perturbed_nodes: int = 0
    source: object = dfield(default=None, repr=False)

    @property
    def empty(self):
        return len(self.segments) == 0

    def vertices(self):
        return np.concatenate(self.lines) if self.lines else np.zeros((0, 2))

    def length_in_disk(self, R=1.0, center=(0.0, 0.0)):
        return float(sum(_segment_disk_length(s, R, center) for s in self.segments))

    def to_csv(self, path):
        np.savetxt(path, self.segments.reshape(-1, 4), delimiter=",", header="x1,y1,x2,y2",
                   comments="", fmt="%.17g")

    def to_gnuplot(self, path):
        with open(path, "w") as fh:
            for line in self.lines:
                for x, y in line:
                    fh.write(f"{x:.17g} {y:.17g}\n")
                fh.write("\n")


def extract_nodal(field, R=1.0, N=401, zero_tol=1e-12, center=(0.0, 0.0)) -> NodalSet:
    """Zero level set on an N x N grid over the square of half-width R.

    Grid values with |v| <= zero_tol * max|v| are moved to +zero_tol/2 times
    the scale so that contour topology does not depend on exact zeros.
    """
    xs, ys, V = sample_plane(field, R, N, center)
    scale = float(np.max(np.abs(V)))
    if scale == 0:
        return NodalSet(np.zeros((0, 2, 2)), [], xs[1] - xs[0], zero_tol, V.size, field)
    tol = zero_tol * scale
    small = np.abs(V) <= tol
    V = np.where(small, 0.5 * tol, V)
    lines = []
    segs = []
    h = xs[1] - xs[0]
    for c in measure.find_contours(V, 0.0):
        pts = np.column_stack([xs[0] + c[:, 0] * h, ys[0] + c[:, 1] * (ys[1] - ys[0])])
        lines.append(pts)
        segs.append(np.stack([pts[:-1], pts[1:]], axis=1))
    segs = np.concatenate(segs) if segs else np.zeros((0, 2, 2))
    return NodalSet(segs, lines, h, zero_tol, int(small.sum()), field)


def _segment_disk_length(seg, R, center):
    """Length of the part of a segment inside the closed disk."""
    p, q = np.asarray(seg[0]) - center, np.asarray(seg[1]) - center
    d = q - p
    A = float(d @ d)
    if A == 0:
        return 0.0
    B = 2 * float(p @ d)
    C = float(p @ p) - R * R
    disc = B * B - 4 * A * C
    if disc <= 0:
        return 0.0
    sq = math.sqrt(disc)
    t0, t1 = max((-B - sq) / (2 * A), 0.0), min((-B + sq) / (2 * A), 1.0)
    return max(t1 - t0, 0.0) * math.sqrt(A)


@dataclass
class MeasureEstimate:
    method: str
    value: float
    resolutions: np.ndarray
    values: np.ndarray
    extrapolated: float
    error: float
    extra: dict = dfield(default_factory=dict)


def minkowski_length(nodal: NodalSet, R=1.0, eps=None, center=(0.0, 0.0)):
    """Area of the eps-neighbourhood inside the disk divided by 2 eps."""
    if nodal.empty:
        return 0.0
    eps = 2 * nodal.resolution if eps is None else eps
    geom = shapely.MultiLineString([ln for ln in nodal.lines if len(ln) > 1])
    disk = shapely.Point(*center).buffer(R, quad_segs=256)
    return float(geom.buffer(eps, quad_segs=32).intersection(disk).area / (2 * eps))


def measure_boxcount(field, R=1.0, Ns=(101, 201, 401), center=(0.0, 0.0), zero_tol=1e-12) -> MeasureEstimate:
    """Nodal length in the disk of radius R from cell-wise contour pieces.

    Each grid cell contributes the length of its marching-squares chord, so
    the sum is the clipped polyline length; it is computed over a
    resolution ladder and Richardson-extrapolated assuming first order.
    The Minkowski content at the finest level is reported alongside.
    """
    hs, vals = [], []
    finest = None
    for N in Ns:
        ns = extract_nodal(field, R * 1.02, N, zero_tol, center)
        hs.append(ns.resolution)
        vals.append(ns.length_in_disk(R, center))
        finest = ns
    vals = np.array(vals)
    hs = np.array(hs)
    if len(vals) >= 2:
        r = hs[-2] / hs[-1]
        extrap = vals[-1] + (vals[-1] - vals[-2]) / (r - 1)
        err = abs(extrap - vals[-1])
    else:
        extrap, err = vals[-1], float("nan")
    mink = minkowski_length(finest, R, center=center)
    return MeasureEstimate("box-count", float(vals[-1]), hs, vals, float(extrap), float(err),
                           {"minkowski": mink, "perturbed_nodes": finest.perturbed_nodes})


def crossing_count(field, R=1.0, directions=64, lines=200, samples=2001, center=(0.0, 0.0),
                   angles=None) -> MeasureEstimate:
    """Crofton estimate of nodal length in the disk from chord sign changes.

    Lines are taken at ``lines`` equispaced offsets for each direction in
    [0, pi); the count on each chord is the number of strict sign changes.
    """
    f = _evaluator(field)
    thetas = np.pi * (np.arange(directions) + 0.5) / directions if angles is None else np.asarray(angles, float)
    dp = 2 * R / lines
    offsets = -R + dp * (np.arange(lines) + 0.5)
    t = np.linspace(-1.0, 1.0, samples)
    per_dir = []
    max_count = 0
    counts_all = []
    for th in thetas:
        nu = np.array([-math.sin(th), math.cos(th)])
        tau = np.array([math.cos(th), math.sin(th)])
        half = np.sqrt(R * R - offsets**2)
        P = (center + offsets[:, None, None] * nu + (half[:, None] * t)[:, :, None] * tau)
        vals = f(P.reshape(-1, 2)).reshape(lines, samples)
        sgn = np.where(vals >= 0, 1, -1)
        counts = np.sum(sgn[:, 1:] != sgn[:, :-1], axis=1)
        counts_all.append(counts)
        max_count = max(max_count, int(counts.max()))
        per_dir.append(counts.sum() * dp)
    per_dir = np.array(per_dir)
    value = 0.5 * (math.pi / len(thetas)) * per_dir.sum() if angles is None else 0.5 * math.pi * per_dir.mean()
    return MeasureEstimate("crossing-count", float(value), np.array([dp]), np.array([value]), float(value),
                           float(0.5 * math.pi * per_dir.std() / math.sqrt(len(per_dir))),
                           {"max_per_line": max_count, "per_direction": per_dir, "angles": thetas,
                            "counts": np.array(counts_all)})


def gradient_criterion(field, points, a=None, sigma_tol=1e-9):
    """|grad_x u|^2 + |d^a_y u|^2 on y = 0 and |grad u|^2 elsewhere."""
    P = np.atleast_2d(np.asarray(points, float))
    on = np.abs(P[:, -1]) < sigma_tol
    P[on, -1] = 0.0
    out = np.empty(len(P))
    if isinstance(field, GridField):
        u = field.as_field()
        g = u.grad(P)
        out[~on] = np.sum(g[~on] ** 2, axis=1)
        for i in np.flatnonzero(on):
            gx = u.grad(P[i : i + 1])[0, :-1]
            out[i] = float(gx @ gx) + conormal_derivative(field, P[i, :-1]) ** 2
        return out
    u = as_field(field, a)
    if np.any(~on):
        g = u.grad(P[~on])
        out[~on] = np.sum(g**2, axis=1)
    if np.any(on):
        X = P[on]
        gx = u.even.grad(X)[:, :-1] if u.even is not None else np.zeros((len(X), u.n))
        out[on] = np.sum(gx**2, axis=1) + u.conormal(X) ** 2
    return out


def split_regular_singular(field, points=None, grad_tol=1e-6, a=None, **extract_kw):
    """Label nodal points regular (criterion above grad_tol^2) or singular."""
    if points is None:
        points = extract_nodal(field, **extract_kw).vertices()
    points = np.atleast_2d(np.asarray(points, float))
    crit = gradient_criterion(field, points, a)
    reg = crit > grad_tol**2
    return points[reg], points[~reg]


def real_root_count(p: MultiPoly, tol=1e-9) -> int:
    """Number of distinct real roots of t -> p(t, 1) for a planar polynomial."""
    deg = max(m[0] for m, _ in p)
    c = np.zeros(deg + 1)
    for m, v in p:
        c[m[0]] += float(v)
    roots = np.roots(c[::-1])
    real = np.sort(roots[np.abs(roots.imag) < tol * max(1.0, np.max(np.abs(roots)))].real)
    if len(real) == 0:
        return 0
    return int(1 + np.sum(np.diff(real) > 1e-7))


def measure_vs_frequency(field, X0=(0.0, 0.0), R=0.5, Ns=(101, 201, 401), a=None):
    """(nodal length in B_R(X0), N(X0, u, 1)) and their ratio."""
    m = measure_boxcount(field, R, Ns, center=X0)
    u = field.as_field() if isinstance(field, GridField) else as_field(field, a)
    N = float(almgren(u, np.asarray(X0, float), [1.0]).N[0]) if not isinstance(field, GridField) else \
        float(almgren(u, np.asarray(X0, float), [min(1.0, 0.9 * field.domain.H)]).N[0])
    return {"measure": m.value, "N": N, "ratio": m.value / N if N > 0 else math.inf, "estimate": m}


def linear_fit_report(Ns, measures):
    """Least-squares line through (N, measure); max relative deviation from it."""
    Ns, measures = np.asarray(Ns, float), np.asarray(measures, float)
    slope, icpt = np.polyfit(Ns, measures, 1)
    fit = slope * Ns + icpt
    dev = float(np.max(np.abs(measures - fit) / np.abs(fit)))
    return {"slope": float(slope), "intercept": float(icpt), "max_rel_deviation": dev}


@dataclass
class ProbeResult:
    passed: bool
    degenerate: bool
    zero_patches: int
    zero_fraction: float

    def __bool__(self):
        return self.passed


def unique_continuation_probe(field, R=1.0, N=201, patch=3, zero_tol=1e-12) -> ProbeResult:
    """No patch x patch block of grid nodes may lie entirely below zero_tol."""
    _, _, V = sample_plane(field, R, N)
    scale = float(np.max(np.abs(V)))
    if scale == 0:
        return ProbeResult(False, True, (N - patch + 1) ** 2, 1.0)
    small = (np.abs(V) <= zero_tol * scale).astype(int)
    win = np.lib.stride_tricks.sliding_window_view(small, (patch, patch)).sum(axis=(-1, -2))
    bad = int(np.sum(win == patch * patch))
    return ProbeResult(bad == 0, False, bad, float(small.mean()))
