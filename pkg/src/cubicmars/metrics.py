"""Cell-wise phase areas, interface-tracking errors and convergence rates.

Areas come from Green's theorem with ``G(x, y) = 1_col(x) (clamp(y, y_j, y_j + h) - y_j)``:
``|P ∩ C_ij| = -∮_{∂P} G dx``. Each boundary curve is split at its x/y
extrema and at every grid line it crosses; a sub-piece inside cell
``(i, r)`` adds ``-∫ (y - y_r) dx`` to that cell and ``-h Δx`` to every
cell below it in the same column. Cubic pieces are integrated exactly by
3-point Gauss-Legendre; analytic reference curves by 20-point rules on
sub-pieces no longer than a cell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from ._jit import njit
from .errors import ConfigError
from .scenes import EdgeGeometry, Scene
from .spline import CubicSpline
from .topology import Phase

# --------------------------------------------------------------------------
# grid


@dataclass(frozen=True)
class Grid:
    """Uniform grid of square cells on ``[x0, x0 + nx h] x [y0, y0 + ny h]``."""

    h: float
    nx: int
    ny: int
    x0: float = 0.0
    y0: float = 0.0

    @classmethod
    def unit(cls, h: float) -> "Grid":
        n = round(1.0 / h)
        if n < 1 or not math.isclose(n * h, 1.0, rel_tol=1e-12):
            raise ConfigError(f"1/h must be an integer, got h = {h}")
        return cls(1.0 / n, n, n)

    @property
    def cell_area(self) -> float:
        return self.h * self.h

    @property
    def shape(self) -> tuple[int, int]:
        return (self.nx, self.ny)


@dataclass
class CellIntegrals:
    """Linear accumulators from which per-cell areas of closed chains follow."""

    partial: np.ndarray
    full: np.ndarray

    @classmethod
    def zeros(cls, grid: Grid) -> "CellIntegrals":
        return cls(np.zeros((grid.nx, grid.ny + 1)), np.zeros((grid.nx, grid.ny + 1)))

    def __iadd__(self, other: "CellIntegrals"):
        self.partial += other.partial
        self.full += other.full
        return self

    def scaled(self, s: float) -> "CellIntegrals":
        return CellIntegrals(s * self.partial, s * self.full)

    def areas(self) -> np.ndarray:
        """Signed areas enclosed by the accumulated closed chains, shape (nx, ny)."""
        below = np.cumsum(self.full[:, ::-1], axis=1)[:, ::-1]
        return self.partial[:, :-1] + below[:, 1:]


# --------------------------------------------------------------------------
# kernels for polynomial pieces

_GL3_X = np.array([-math.sqrt(0.6), 0.0, math.sqrt(0.6)])
_GL3_W = np.array([5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0])


@njit(cache=True)
def _poly(c, t):
    return c[0] + t * (c[1] + t * (c[2] + t * c[3]))


@njit(cache=True)
def _dpoly(c, t):
    return c[1] + t * (2.0 * c[2] + 3.0 * t * c[3])


@njit(cache=True)
def _deriv_roots(c, a, b, out, n):
    """Append roots of the derivative of cubic ``c`` strictly inside (a, b)."""
    qa = 3.0 * c[3]
    qb = 2.0 * c[2]
    qc = c[1]
    scale = abs(qa) * (b - a) * (b - a) + abs(qb) * (b - a) + abs(qc)
    if scale == 0.0:
        return n
    if abs(qa) * (b - a) * (b - a) <= 1e-15 * scale:
        if qb != 0.0:
            t = -qc / qb
            if a < t < b:
                out[n] = t
                n += 1
        return n
    disc = qb * qb - 4.0 * qa * qc
    if disc < 0.0:
        return n
    sq = math.sqrt(disc)
    q = -0.5 * (qb + sq) if qb >= 0.0 else -0.5 * (qb - sq)
    r1 = q / qa
    r2 = qc / q if q != 0.0 else r1
    for t in (r1, r2):
        if a < t < b:
            out[n] = t
            n += 1
    return n


@njit(cache=True)
def _solve_monotone(c, a, b, target):
    """Root of ``poly(c) = target`` on [a, b] where the cubic is monotone."""
    fa = _poly(c, a) - target
    if fa == 0.0:
        return a
    lo, hi = a, b
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = _poly(c, mid) - target
        if fm == 0.0:
            return mid
        if (fm > 0.0) == (fa > 0.0):
            lo = mid
            fa = fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


@njit(cache=True)
def _insert_sorted(buf, n, t):
    i = n
    while i > 0 and buf[i - 1] > t:
        buf[i] = buf[i - 1]
        i -= 1
    buf[i] = t
    return n + 1


@njit(cache=True)
def _accumulate(cx, cy, tend, signs, x0, y0, h, nx, ny, partial, full):
    """Add the Green contributions of polynomial pieces to the cell accumulators.

    Piece ``p`` is ``(poly(cx[p], t), poly(cy[p], t))`` for ``t`` in ``[0, tend[p]]``,
    traversed forward when ``signs[p] > 0`` and backward otherwise.
    """
    gx = np.array([-math.sqrt(0.6), 0.0, math.sqrt(0.6)])
    gw = np.array([5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0])
    brk = np.empty(8)
    cut = np.empty(nx + ny + 8)
    for p in range(cx.shape[0]):
        X = cx[p]
        Y = cy[p]
        T = tend[p]
        sg = signs[p]
        nb = 0
        brk[nb] = 0.0
        nb += 1
        nd = _deriv_roots(X, 0.0, T, brk, nb)
        nd = _deriv_roots(Y, 0.0, T, brk, nd)
        brk[nd] = T
        nd += 1
        # sort breakpoints (at most six)
        for i in range(1, nd):
            v = brk[i]
            j = i
            while j > 0 and brk[j - 1] > v:
                brk[j] = brk[j - 1]
                j -= 1
            brk[j] = v
        for k in range(nd - 1):
            a = brk[k]
            b = brk[k + 1]
            if b <= a:
                continue
            nc = 0
            cut[nc] = a
            nc += 1
            xa = _poly(X, a)
            xb = _poly(X, b)
            lo_x = min(xa, xb)
            hi_x = max(xa, xb)
            i0 = max(int(math.floor((lo_x - x0) / h)) + 1, 0)
            i1 = min(int(math.ceil((hi_x - x0) / h)) - 1, nx)
            for i in range(i0, i1 + 1):
                xl = x0 + i * h
                if lo_x < xl < hi_x:
                    nc = _insert_sorted(cut, nc, _solve_monotone(X, a, b, xl))
            ya = _poly(Y, a)
            yb = _poly(Y, b)
            lo_y = min(ya, yb)
            hi_y = max(ya, yb)
            j0 = max(int(math.floor((lo_y - y0) / h)) + 1, 0)
            j1 = min(int(math.ceil((hi_y - y0) / h)) - 1, ny)
            for j in range(j0, j1 + 1):
                yl = y0 + j * h
                if lo_y < yl < hi_y:
                    nc = _insert_sorted(cut, nc, _solve_monotone(Y, a, b, yl))
            nc = _insert_sorted(cut, nc, b)
            for m in range(nc - 1):
                u = cut[m]
                v = cut[m + 1]
                if v <= u:
                    continue
                tm = 0.5 * (u + v)
                ci = int(math.floor((_poly(X, tm) - x0) / h))
                if ci < 0 or ci >= nx:
                    continue
                r = int(math.floor((_poly(Y, tm) - y0) / h))
                if r < 0:
                    continue
                if r > ny:
                    r = ny
                yr = y0 + r * h
                half = 0.5 * (v - u)
                acc = 0.0
                for q in range(3):
                    t = tm + half * gx[q]
                    acc += gw[q] * (_poly(Y, t) - yr) * _dpoly(X, t)
                acc *= half
                dx = _poly(X, v) - _poly(X, u)
                partial[ci, r] -= sg * acc
                full[ci, r] -= sg * h * dx
    return partial, full


def _pieces_integrals(grid: Grid, cx: np.ndarray, cy: np.ndarray, tend: np.ndarray, signs: np.ndarray) -> CellIntegrals:
    ci = CellIntegrals.zeros(grid)
    if len(tend):
        _accumulate(np.ascontiguousarray(cx, dtype=float), np.ascontiguousarray(cy, dtype=float),
                    np.ascontiguousarray(tend, dtype=float), np.ascontiguousarray(signs, dtype=float),
                    float(grid.x0), float(grid.y0), float(grid.h), int(grid.nx), int(grid.ny), ci.partial, ci.full)
    return ci


def spline_range_integrals(grid: Grid, spline: CubicSpline, l_start: float, l_end: float) -> CellIntegrals:
    """Cell accumulators for the spline traversed from ``l_start`` to ``l_end``.

    Both ends must be knots (edge pieces always start and end at markers).
    """
    kn = spline.knots
    lo, hi = min(l_start, l_end), max(l_start, l_end)
    i0 = int(np.searchsorted(kn, lo, side="left"))
    i1 = int(np.searchsorted(kn, hi, side="left"))
    if not (kn[i0] == lo and i1 < len(kn) and kn[i1] == hi):
        raise ValueError("spline range must start and end at knots")
    coef = spline.coefficients()[i0:i1]
    sign = 1.0 if l_end >= l_start else -1.0
    return _pieces_integrals(grid, coef[:, :, 0], coef[:, :, 1], np.diff(kn)[i0:i1], np.full(i1 - i0, sign))


def polygon_integrals(grid: Grid, polygon: np.ndarray) -> CellIntegrals:
    """Cell accumulators of a closed polygon (last vertex joins the first)."""
    p = np.asarray(polygon, float)
    q = np.roll(p, -1, axis=0)
    n = len(p)
    cx = np.zeros((n, 4))
    cy = np.zeros((n, 4))
    cx[:, 0], cx[:, 1] = p[:, 0], q[:, 0] - p[:, 0]
    cy[:, 0], cy[:, 1] = p[:, 1], q[:, 1] - p[:, 1]
    keep = np.hypot(cx[:, 1], cy[:, 1]) > 0
    return _pieces_integrals(grid, cx[keep], cy[keep], np.ones(int(keep.sum())), np.ones(int(keep.sum())))


def polygon_cell_areas(grid: Grid, polygon: np.ndarray) -> np.ndarray:
    """Signed area of ``polygon ∩ cell`` for every cell (positive for counterclockwise)."""
    return polygon_integrals(grid, polygon).areas()


# --------------------------------------------------------------------------
# exact geometry (reference solution)

_GL_N = 20
_GL_X, _GL_W = np.polynomial.legendre.leggauss(_GL_N)


def _monotone_breaks(g: EdgeGeometry, samples: int = 2048) -> np.ndarray:
    bps = g.breakpoints()
    out = [bps]
    for a, b in zip(bps[:-1], bps[1:]):
        s = np.linspace(a, b, samples + 1)
        s_in = s[1:-1]
        d = g.derivative(s, 1)
        for comp in range(2):
            f = d[:, comp]
            scale = np.abs(f).max()
            if scale == 0:
                continue
            # exact zeros at interior samples
            out.append(s_in[f[1:-1] == 0.0])
            idx = np.flatnonzero(f[:-1] * f[1:] < 0)
            for i in idx:
                out.append([brentq(lambda t: g.derivative(np.array([t]), 1)[0, comp], s[i], s[i + 1], xtol=1e-16)])
    return np.unique(np.concatenate([np.atleast_1d(np.asarray(o, float)) for o in out]))


def geometry_integrals(grid: Grid, g: EdgeGeometry) -> CellIntegrals:
    """Cell accumulators of an exact edge geometry traversed from s=0 to s=1."""
    brk = _monotone_breaks(g)
    cuts = [brk]
    for a, b in zip(brk[:-1], brk[1:]):
        pa, pb = g.point(np.array([a, b]))
        for comp, origin, n in ((0, grid.x0, grid.nx), (1, grid.y0, grid.ny)):
            lo, hi = sorted((pa[comp], pb[comp]))
            k0 = max(int(math.floor((lo - origin) / grid.h)) + 1, 0)
            k1 = min(int(math.ceil((hi - origin) / grid.h)) - 1, n)
            for k in range(k0, k1 + 1):
                line = origin + k * grid.h
                if lo < line < hi:
                    f = lambda t, c=comp, L=line: g.point(np.array([t]))[0, c] - L  # noqa: E731
                    cuts.append([brentq(f, a, b, xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=200)])
    s = np.unique(np.concatenate([np.atleast_1d(np.asarray(c, float)) for c in cuts]))
    u, v = s[:-1], s[1:]
    keep = v > u
    u, v = u[keep], v[keep]
    mid = g.point(0.5 * (u + v))
    ci = np.floor((mid[:, 0] - grid.x0) / grid.h).astype(int)
    r = np.floor((mid[:, 1] - grid.y0) / grid.h).astype(int)
    ok = (ci >= 0) & (ci < grid.nx) & (r >= 0)
    u, v, ci, r = u[ok], v[ok], ci[ok], np.minimum(r[ok], grid.ny)
    half = 0.5 * (v - u)
    t = (0.5 * (u + v))[:, None] + half[:, None] * _GL_X[None, :]
    pts = g.point(t.ravel()).reshape(len(u), _GL_N, 2)
    dx = g.derivative(t.ravel(), 1)[:, 0].reshape(len(u), _GL_N)
    yr = grid.y0 + r * grid.h
    integral = half * (((pts[:, :, 1] - yr[:, None]) * dx) @ _GL_W)
    ends = g.point(np.concatenate([u, v]))
    delta_x = ends[len(u):, 0] - ends[: len(u), 0]
    out = CellIntegrals.zeros(grid)
    np.add.at(out.partial, (ci, r), -integral)
    np.add.at(out.full, (ci, r), -grid.h * delta_x)
    return out


# --------------------------------------------------------------------------
# phase areas


@dataclass
class PhaseAreaField:
    grid: Grid
    names: list[str]
    areas: np.ndarray  # (n_phases, nx, ny)

    def partition_defect(self) -> float:
        """Largest deviation of the per-cell sum of phase areas from h^2."""
        return float(np.abs(self.areas.sum(axis=0) - self.grid.cell_area).max())


def _is_unbounded(component) -> bool:
    return all(c.sign < 0 for c in component)


def _phase_areas(grid: Grid, phases: Sequence[Phase], edge_ci: dict[int, CellIntegrals]) -> PhaseAreaField:
    out = np.zeros((len(phases), grid.nx, grid.ny))
    for k, ph in enumerate(phases):
        acc = CellIntegrals.zeros(grid)
        base = 0.0
        for comp in ph.components:
            if _is_unbounded(comp):
                base += grid.cell_area
            for cyc in comp:
                for oe in cyc.edges:
                    acc += edge_ci[oe.edge].scaled(1.0 if oe.forward else -1.0)
        out[k] = base + acc.areas()
    return PhaseAreaField(grid, [p.name for p in phases], out)


def reference_areas(scene: Scene, grid: Grid) -> PhaseAreaField:
    """Exact per-cell phase areas of the scene's own geometry."""
    edge_ci = {i: geometry_integrals(grid, g) for i, g in enumerate(scene.geometries)}
    return _phase_areas(grid, scene.phases, edge_ci)


def tracked_areas(state, grid: Grid) -> PhaseAreaField:
    """Per-cell phase areas enclosed by the tracked splines (exact cubic integration)."""
    pieces = state.edge_pieces()
    edge_ci = {e: spline_range_integrals(grid, state.splines[pc.curve], pc.l0, pc.l1).scaled(1.0 if pc.forward else -1.0)
               for e, pc in pieces.items()}
    return _phase_areas(grid, state.scene.phases, edge_ci)


def sample_boundary(state, max_spacing: float) -> list[list[np.ndarray]]:
    """Per phase, oriented polygons sampled on the splines with parameter spacing <= ``max_spacing``."""
    from .driver import phase_boundaries

    out = []
    for cycles in phase_boundaries(state):
        polys = []
        for segs in cycles:
            chunks = []
            for s, a, b in segs:
                kn = s.knots
                lo, hi = min(a, b), max(a, b)
                sel = kn[(kn >= lo) & (kn <= hi)]
                parts = [np.linspace(x0, x1, max(int(math.ceil((x1 - x0) / max_spacing)), 1), endpoint=False)
                         for x0, x1 in zip(sel[:-1], sel[1:])]
                ls = np.concatenate(parts + [[hi]])
                pts = s(ls)
                chunks.append((pts if a <= b else pts[::-1])[:-1])
            polys.append(np.vstack(chunks))
        out.append(polys)
    return out


def cell_areas(grid: Grid, polygons: list[list[np.ndarray]], phases: Sequence[Phase]) -> PhaseAreaField:
    """Per-cell phase areas from oriented polygons (one list of cycle polygons per phase)."""
    out = np.zeros((len(phases), grid.nx, grid.ny))
    for k, (ph, polys) in enumerate(zip(phases, polygons)):
        base = sum(grid.cell_area for comp in ph.components if _is_unbounded(comp))
        acc = CellIntegrals.zeros(grid)
        for poly in polys:
            acc += polygon_integrals(grid, poly)
        out[k] = base + acc.areas()
    return PhaseAreaField(grid, [p.name for p in phases], out)


# --------------------------------------------------------------------------
# errors


@dataclass
class ErrorReport:
    h: float
    names: list[str]
    errors: np.ndarray
    params: dict = field(default_factory=dict)

    @property
    def total(self) -> float:
        return float(self.errors.sum())


def it_error(reference: PhaseAreaField, computed: PhaseAreaField) -> ErrorReport:
    """``E_i = sum_j | |M_i ∩ C_j| - |M_i^n ∩ C_j| |`` per phase."""
    if reference.grid != computed.grid or reference.areas.shape != computed.areas.shape:
        raise ConfigError("reference and computed areas live on different grids")
    e = np.abs(reference.areas - computed.areas).sum(axis=(1, 2))
    return ErrorReport(reference.grid.h, list(reference.names), e)


def convergence_rates(errors: Sequence[tuple[float, float]]) -> list[float]:
    """``log(E_h / E_h') / log(h / h')`` for consecutive grids; NaN where undefined."""
    out = []
    for (h0, e0), (h1, e1) in zip(errors[:-1], errors[1:]):
        if e0 <= 0 or e1 <= 0 or not (h0 > h1 > 0):
            out.append(float("nan"))
        else:
            out.append(math.log(e0 / e1) / math.log(h0 / h1))
    return out


__all__ = [
    "CellIntegrals",
    "ErrorReport",
    "Grid",
    "PhaseAreaField",
    "cell_areas",
    "convergence_rates",
    "geometry_integrals",
    "it_error",
    "polygon_cell_areas",
    "polygon_integrals",
    "reference_areas",
    "sample_boundary",
    "spline_range_integrals",
    "tracked_areas",
]
