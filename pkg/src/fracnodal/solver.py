"""Conservative finite-volume solver for div(|y|^a grad v) = 0 on a half box.

The box is [-L, L]^n x [0, H] with a vertex grid whose first row sits on
y = 0.  Rows on y = 0 own half cells.  Symmetric problems impose zero flux
through y = 0; antisymmetric problems impose v = 0 there.  All other faces
of the box carry Dirichlet data.

Conductances between neighbouring nodes are the weighted face areas over the
node distance, so the matrix is a weighted graph Laplacian: symmetric,
positive definite after Dirichlet elimination, and monotone.  The latter
gives the discrete maximum principle.
"""
from __future__ import annotations

import json
import numbers
from dataclasses import dataclass, field as dfield
from pathlib import Path

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy import interpolate, ndimage

from .fields import FuncPart, LaField
from .poly import MultiPoly, QuasiPoly

FACE_WEIGHTS = ("midpoint", "average", "harmonic")
# midpoint sampling is exact on even quadratics, harmonic averaging on c + b y^{1-a}
AUTO_WEIGHT = {"symmetric": "midpoint", "antisymmetric": "harmonic", "none": "midpoint"}


class IterativeFailure(RuntimeError):
    def __init__(self, msg, history):
        super().__init__(msg)
        self.history = history


@dataclass(frozen=True)
class GridDomain:
    L: float
    H: float
    shape: tuple  # nodes per axis, y last

    def __post_init__(self):
        if self.L <= 0 or self.H <= 0 or min(self.shape) < 3:
            raise ValueError("extents must be positive and every axis needs >= 3 nodes")

    @classmethod
    def square(cls, N, n=1, L=1.0, H=1.0):
        return cls(float(L), float(H), (N,) * n + (N,))

    @property
    def n(self):
        return len(self.shape) - 1

    @property
    def spacing(self):
        return tuple(2 * self.L / (m - 1) for m in self.shape[:-1]) + (self.H / (self.shape[-1] - 1),)

    @property
    def h(self):
        return max(self.spacing)

    def axes(self):
        xs = [np.linspace(-self.L, self.L, m) for m in self.shape[:-1]]
        return xs + [np.linspace(0.0, self.H, self.shape[-1])]

    def points(self):
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def refined(self):
        return GridDomain(self.L, self.H, tuple(2 * m - 1 for m in self.shape))

    def to_json(self):
        return {"L": self.L, "H": self.H, "shape": list(self.shape)}


def _power_integral(lo, hi, p):
    """int_lo^hi y^p dy for 0 <= lo <= hi."""
    return (hi ** (1 + p) - lo ** (1 + p)) / (1 + p)


def y_face_weights(y, a, kind="midpoint"):
    """Weight on the horizontal faces between consecutive y nodes."""
    lo, hi = y[:-1], y[1:]
    dy = hi - lo
    if kind == "midpoint":
        return (0.5 * (lo + hi)) ** a
    if kind == "average":
        return _power_integral(lo, hi, a) / dy
    if kind == "harmonic":
        return dy / _power_integral(lo, hi, -a)
    raise ValueError(f"unknown face weight {kind!r}")


def y_cell_weights(y, a):
    """int of y^a over each node's dual cell, clipped to [0, H]."""
    mid = 0.5 * (y[:-1] + y[1:])
    lo = np.concatenate([[y[0]], mid])
    hi = np.concatenate([mid, [y[-1]]])
    return _power_integral(lo, hi, a)


def _dirichlet_mask(dom: GridDomain, parity):
    mask = np.zeros(dom.shape, bool)
    for k in range(dom.n):
        idx = [slice(None)] * (dom.n + 1)
        idx[k] = 0
        mask[tuple(idx)] = True
        idx[k] = -1
        mask[tuple(idx)] = True
    mask[..., -1] = True
    if parity == "antisymmetric":
        mask[..., 0] = True
    return mask


def assemble(dom: GridDomain, a, face_weight="midpoint"):
    """Weighted graph Laplacian on all nodes (no boundary conditions yet)."""
    sh = dom.shape
    N = int(np.prod(sh))
    ids = np.arange(N).reshape(sh)
    sp_ = dom.spacing
    y = dom.axes()[-1]
    cell_y = y_cell_weights(y, a)
    face_y = y_face_weights(y, a, face_weight)
    # transverse cell widths for x directions: half width at the box ends
    widths = []
    for k in range(dom.n):
        w = np.full(sh[k], sp_[k])
        w[0] = w[-1] = sp_[k] / 2
        widths.append(w)
    rows, cols, vals = [], [], []
    nd = dom.n + 1
    for k in range(nd):
        lo = [slice(None)] * nd
        hi = [slice(None)] * nd
        lo[k], hi[k] = slice(0, -1), slice(1, None)
        p, q = ids[tuple(lo)], ids[tuple(hi)]
        # face measure: transverse widths times the y-weight (cell integral or face value)
        G = np.ones(sh)
        for j in range(dom.n):
            if j != k:
                G = G * _bcast(widths[j], j, nd)
        if k == dom.n:
            G = G[tuple(lo)] * _bcast(face_y, k, nd) / sp_[k]
        else:
            G = (G * _bcast(cell_y, dom.n, nd))[tuple(lo)] / sp_[k]
        G = np.broadcast_to(G, p.shape)
        rows += [p.ravel(), q.ravel()]
        cols += [q.ravel(), p.ravel()]
        vals += [-G.ravel(), -G.ravel()]
    rows = np.concatenate(rows)
    cols = np.concatenate(cols)
    vals = np.concatenate(vals)
    off = sp.csr_matrix((vals, (rows, cols)), shape=(N, N))
    diag = -np.asarray(off.sum(axis=1)).ravel()
    return (off + sp.diags(diag)).tocsr()


def _bcast(v, axis, ndim):
    shp = [1] * ndim
    shp[axis] = -1
    return np.asarray(v).reshape(shp)


def _evaluator(data, a):
    """Callable X -> values for a boundary datum."""
    if isinstance(data, MultiPoly):
        p = data.to_float()
        return lambda X: p(X)
    if isinstance(data, QuasiPoly):
        return lambda X: data(X)
    if isinstance(data, LaField):
        return data.value
    if callable(data):
        return lambda X: np.asarray(data(X), float)
    if isinstance(data, numbers.Real):
        return lambda X: np.full(len(X), float(data))
    raise TypeError("boundary data must be callable, a polynomial or a constant")


@dataclass(frozen=True)
class GridField:
    values: np.ndarray
    domain: GridDomain
    a: float
    parity: str = "symmetric"
    face_weight: str = "midpoint"
    history: tuple = dfield(default=(), compare=False)

    def __post_init__(self):
        v = np.array(self.values, float)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self):
        return self.domain.n

    # ------------------------------------------------------------------
    def reflected(self):
        """Axes and values on [-H, H] using the parity across y = 0."""
        y = self.domain.axes()[-1]
        sign = -1.0 if self.parity == "antisymmetric" else 1.0
        yy = np.concatenate([-y[:0:-1], y])
        vv = np.concatenate([sign * self.values[..., :0:-1], self.values], axis=-1)
        return self.domain.axes()[:-1] + [yy], vv

    def _smooth_factor(self):
        """Grid values of the smooth factor: v itself, or v / y^{1-a}."""
        if self.parity != "antisymmetric":
            return self.values
        y = self.domain.axes()[-1]
        o = np.empty_like(self.values)
        o[..., 1:] = self.values[..., 1:] / y[1:] ** (1 - self.a)
        # o is even in y: quadratic extrapolation in y^2 from the next three rows
        Y = y[1:4] ** 2
        V = np.stack([np.ones(3), Y, Y**2], axis=1)
        w = np.linalg.solve(V.T, np.array([1.0, 0.0, 0.0]))
        o[..., 0] = np.tensordot(o[..., 1:4], w, axes=([-1], [0]))
        return o

    def interpolant(self):
        """Part (value + gradient) of the smooth factor, reflected evenly."""
        axes = self.domain.axes()
        o = self._smooth_factor()
        y = axes[-1]
        yy = np.concatenate([-y[:0:-1], y])
        oo = np.concatenate([o[..., :0:-1], o], axis=-1)
        if self.n == 1:
            spl = interpolate.RectBivariateSpline(axes[0], yy, oo, kx=3, ky=3)

            def val(X):
                return spl.ev(X[:, 0], X[:, 1])

            def grad(X):
                return np.stack([spl.ev(X[:, 0], X[:, 1], dx=1), spl.ev(X[:, 0], X[:, 1], dy=1)], axis=1)

            return FuncPart(val, 2, grad)
        grid_axes = axes[:-1] + [yy]
        lo = np.array([g[0] for g in grid_axes])
        step = np.array([g[1] - g[0] for g in grid_axes])
        coeffs = ndimage.spline_filter(oo, order=3, mode="mirror")

        def val(X):
            idx = ((np.atleast_2d(X) - lo) / step).T
            return ndimage.map_coordinates(coeffs, idx, order=3, mode="mirror", prefilter=False)

        return FuncPart(val, self.n + 1, h=0.25 * float(np.min(step)))

    def as_field(self) -> LaField:
        part = self.interpolant()
        if self.parity == "antisymmetric":
            f = LaField(self.a, self.n, odd=part, name="grid")
        else:
            f = LaField(self.a, self.n, even=part, name="grid")
        f.provenance = "grid"
        return f

    # ------------------------------------------------------------------
    def header(self):
        return {**self.domain.to_json(), "a": self.a, "parity": self.parity, "face_weight": self.face_weight}

    def save(self, path, fmt="csv"):
        """Write data plus a JSON header next to it (``path`` + '.json')."""
        path = Path(path)
        pts = self.domain.points()
        table = np.column_stack([pts, self.values.ravel()])
        if fmt == "csv":
            cols = ",".join([f"x{i + 1}" for i in range(self.n)] + ["y", "value"])
            np.savetxt(path, table, delimiter=",", header=cols, comments="", fmt="%.17g")
        elif fmt == "bin":
            table.astype("<f8").tofile(path)
        else:
            raise ValueError(f"unknown format {fmt!r}")
        Path(str(path) + ".json").write_text(json.dumps({**self.header(), "format": fmt}, indent=1))
        return path

    @classmethod
    def load(cls, path):
        path = Path(path)
        hdr = json.loads(Path(str(path) + ".json").read_text())
        dom = GridDomain(hdr["L"], hdr["H"], tuple(hdr["shape"]))
        ncol = dom.n + 2
        if hdr.get("format", "csv") == "csv":
            table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        else:
            table = np.fromfile(path, dtype="<f8").reshape(-1, ncol)
        return cls(table[:, -1].reshape(dom.shape), dom, hdr["a"], hdr["parity"], hdr.get("face_weight", "midpoint"))


def sample(field_or_fn, dom: GridDomain, a, parity="symmetric") -> GridField:
    """Grid field holding exact values of a given function."""
    f = _evaluator(field_or_fn, a)
    return GridField(f(dom.points()).reshape(dom.shape), dom, a, parity)


def solve_extension(data, parity="symmetric", a=0.0, grid: GridDomain | None = None, tol=1e-10,
                    face_weight="auto", method="cg", maxiter=None) -> GridField:
    """Solve div(|y|^a grad v) = 0 with Dirichlet data on the outer faces.

    ``tol`` bounds the max-norm residual normalised by the diagonal and the
    data scale (see :func:`residual_norm`).
    """
    a = float(getattr(a, "a", a))
    if not -1 < a < 1:
        raise ValueError("a must lie in (-1, 1)")
    if parity not in ("symmetric", "antisymmetric"):
        raise ValueError("parity must be 'symmetric' or 'antisymmetric'")
    dom = grid or GridDomain.square(65)
    if face_weight == "auto":
        face_weight = AUTO_WEIGHT[parity]
    A = assemble(dom, a, face_weight)
    mask = _dirichlet_mask(dom, parity).ravel()
    pts = dom.points()
    u = np.zeros(len(pts))
    g = _evaluator(data, a)
    bvals = g(pts[mask])
    if parity == "antisymmetric":
        bvals = np.where(pts[mask][:, -1] == 0, 0.0, bvals)
    u[mask] = bvals
    free = ~mask
    Aff = A[free][:, free]
    rhs = -A[free][:, mask] @ u[mask]
    scale = max(float(np.max(np.abs(bvals))), 1e-300)
    d = Aff.diagonal()
    history = []
    if method == "direct":
        u[free] = spla.spsolve(Aff.tocsc(), rhs)
    elif method == "cg":
        M = sp.diags(1.0 / d)

        it = [0]

        def cb(xk):
            it[0] += 1
            if it[0] % 100 == 0:
                history.append(float(np.max(np.abs(Aff @ xk - rhs) / d)) / scale)

        sol, info = spla.cg(Aff, rhs, M=M, rtol=min(1e-3, tol * 1e-3), atol=0.0,
                            maxiter=maxiter or 200 * int(np.max(dom.shape)), callback=cb)
        u[free] = sol
    else:
        raise ValueError(f"unknown method {method!r}")
    res = float(np.max(np.abs(Aff @ u[free] - rhs) / d)) / scale if free.any() else 0.0
    history.append(res)
    if res > tol:
        raise IterativeFailure(f"residual {res:.3e} above tolerance {tol:.1e}", history)
    return GridField(u.reshape(dom.shape), dom, a, parity, face_weight, tuple(history))


def residual_norm(field: GridField, face_weight=None) -> float:
    """Max of |A v| / diag over free nodes, relative to the field's max."""
    dom = field.domain
    A = assemble(dom, field.a, face_weight or field.face_weight)
    free = ~_dirichlet_mask(dom, field.parity).ravel()
    v = field.values.ravel()
    r = (A @ v)[free] / A.diagonal()[free]
    return float(np.max(np.abs(r))) / max(float(np.max(np.abs(v))), 1e-300)


def max_error(field: GridField, exact) -> float:
    f = _evaluator(exact, field.a)
    return float(np.max(np.abs(field.values.ravel() - f(field.domain.points()))))


def convergence_study(exact, a, Ns=(17, 33, 65, 129), parity="symmetric", face_weight="auto",
                      L=1.0, H=1.0, n=1, method="cg", tol=1e-11):
    """Max errors against an exact solution over grids with doubling resolution."""
    errs, hs, fields = [], [], []
    for N in Ns:
        dom = GridDomain(L, H, (N,) * n + (N,))
        fld = solve_extension(exact, parity, a, dom, tol=tol, face_weight=face_weight, method=method)
        errs.append(max_error(fld, exact))
        hs.append(dom.h)
        fields.append(fld)
    errs, hs = np.array(errs), np.array(hs)
    orders = np.log(errs[:-1] / errs[1:]) / np.log(hs[:-1] / hs[1:])
    return {"h": hs, "errors": errs, "orders": orders, "fields": fields}


def max_principle_holds(field: GridField, slack=1e-12) -> bool:
    """Interior values lie within the range of the Dirichlet data."""
    mask = _dirichlet_mask(field.domain, field.parity)
    b = field.values[mask]
    lo, hi = float(b.min()), float(b.max())
    span = max(hi - lo, abs(hi), abs(lo), 1e-300)
    v = field.values[~mask]
    return bool(v.size == 0 or (v.min() >= lo - slack * span and v.max() <= hi + slack * span))


def conormal_derivative(field: GridField, x, rows=6) -> float:
    """lim_{y->0} |y|^a d_y v at the Sigma point x.

    A generic solution behaves like e0 + o0 y^{1-a} + e2 y^2 + o2 y^{3-a}
    near y = 0 (even factor e, odd factor o).  Those four powers are fitted
    to the first grid rows; the conormal derivative is (1 - a) o0.
    """
    dom = field.domain
    axes = dom.axes()
    y = axes[-1][: rows + 1]
    a = field.a
    x = np.atleast_1d(np.asarray(x, float))
    if field.n == 1:
        col = np.array([interpolate.CubicSpline(axes[0], field.values[:, j])(x[0]) for j in range(rows + 1)])
    else:
        col = np.array([interpolate.RegularGridInterpolator(axes[:-1], field.values[..., j], method="cubic")(x)[0]
                        for j in range(rows + 1)])
    A = np.stack([np.ones_like(y), y ** (1 - a), y**2, y ** (3 - a)], axis=1)
    coef, *_ = np.linalg.lstsq(A, col, rcond=None)
    return float((1 - a) * coef[1])
