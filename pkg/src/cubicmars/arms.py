"""Adding and removing markers (ARMS) to keep a marker chain regular.

A chain is ``(r, h)``-regular when every chord length lies in ``[r h, h]``.
One ARMS step maps the breakpoints of a spline with the discrete flow map,
subdivides long chords on the preimage spline, removes short chords while
keeping characteristic markers (graph vertices), repairs not-a-knot ends so
the first chord is shorter than the second by a factor ``r_b*``, and refits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._jit import njit
from .errors import PreconditionError, ResolutionError
from .spline import CubicSpline

SIGMAS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "linear": lambda x: x,
    "square": lambda x: x * x,
    "sqrt": np.sqrt,
}

_MAX_REFINE_PASSES = 64
_MAX_BISECTIONS = 200


@dataclass(frozen=True)
class CurvatureBased:
    """Maximum chord length as a non-decreasing function of the curvature radius."""

    hl_c: float
    rho_min: float
    rho_max: float
    r_min_c: float
    sigma: str = "linear"

    def __post_init__(self):
        if not (self.hl_c > 0 and 0 < self.rho_min < self.rho_max and 0 < self.r_min_c <= 1):
            raise PreconditionError("need hl_c > 0, 0 < rho_min < rho_max and r_min_c in (0, 1]")
        if self.sigma not in SIGMAS:
            raise PreconditionError(f"unknown sigma {self.sigma!r}; choose from {sorted(SIGMAS)}")

    @property
    def r_min(self) -> float:
        return max(self.r_min_c, self.rho_min / self.rho_max)

    def __call__(self, rho):
        rho = np.asarray(rho, dtype=float)
        x = np.clip((rho - self.rho_min) / (self.rho_max - self.rho_min), 0.0, 1.0)
        rm = self.r_min
        out = rm * self.hl_c + (1.0 - rm) * self.hl_c * SIGMAS[self.sigma](x)
        out = np.where(rho <= self.rho_min, rm * self.hl_c, out)
        return np.where(rho >= self.rho_max, self.hl_c, out)


@dataclass(frozen=True)
class ArmsParams:
    r_tiny: float
    hl: float | CurvatureBased
    r_b_star: float = 1.5
    # open ends whose ratio ||p2-p1|| / ||p1-p0|| already reaches this skip adjust_ends
    r_b_trigger: float = math.inf

    def __post_init__(self):
        if not 0 < self.r_tiny < 1 / 3:
            raise PreconditionError("r_tiny must lie in (0, 1/3)")
        if not self.r_b_trigger > 0:
            raise PreconditionError("r_b_trigger must be positive")
        if isinstance(self.hl, CurvatureBased):
            return
        if not (isinstance(self.hl, (int, float)) and self.hl > 0 and math.isfinite(self.hl)):
            raise PreconditionError("h_L must be a positive number or a CurvatureBased rule")

    @property
    def curvature_based(self) -> bool:
        return isinstance(self.hl, CurvatureBased)

    @property
    def nominal_hl(self) -> float:
        return self.hl.hl_c if isinstance(self.hl, CurvatureBased) else float(self.hl)

    def hl_of(self, rho) -> np.ndarray:
        if isinstance(self.hl, CurvatureBased):
            return self.hl(rho)
        return np.full(np.shape(rho), float(self.hl))

    def check_adjust_ends(self) -> None:
        rb, r = self.r_b_star, self.r_tiny
        if not (1 < rb < 1 / (2 * r) and r < min(1 / 6, 1 / (2 * rb))):
            raise PreconditionError(
                f"adjustEnds needs r_b* in (1, 1/(2 r_tiny)) and r_tiny < min(1/6, 1/(2 r_b*)); got r_b*={rb}, r_tiny={r}"
            )


def h_L_of_radius(params: ArmsParams, rho):
    out = params.hl_of(rho)
    return float(out) if np.ndim(rho) == 0 else out


@dataclass
class MarkerChain:
    """Markers with their preimage parameters on the previous spline."""

    markers: np.ndarray
    params: np.ndarray
    characteristic: np.ndarray
    closed: bool

    def __post_init__(self):
        n = len(self.markers)
        if len(self.params) != n or len(self.characteristic) != n:
            raise ValueError("markers, params and flags must have equal length")

    def chords(self) -> np.ndarray:
        return _chords(self.markers, self.closed)


@dataclass
class ArmsDiagnostics:
    n_added: int = 0
    n_removed: int = 0
    n_markers: int = 0
    length: float = 0.0
    mu_variation: float = 0.0
    warnings: list[str] = field(default_factory=list)


def _chords(p: np.ndarray, closed: bool) -> np.ndarray:
    q = np.vstack([p, p[:1]]) if closed else p
    return np.hypot(*np.diff(q, axis=0).T)


def is_regular(points: np.ndarray, r: float, h, closed: bool = False, rtol: float = 1e-12) -> bool:
    """True iff every chord lies in ``[r h, h]``; ``h`` may be per chord."""
    d = _chords(np.asarray(points, float), closed)
    h = np.broadcast_to(np.asarray(h, float), d.shape)
    return bool(np.all(d >= r * h * (1 - rtol)) and np.all(d <= h * (1 + rtol)))


def mu_variation(points: np.ndarray, hl: float, closed: bool = False, mu: float = 1 / 3) -> float:
    """Total mu-variation ``sum |chord - mu h_L|``."""
    return float(np.abs(_chords(np.asarray(points, float), closed) - mu * hl).sum())


# --------------------------------------------------------------------------
# adjustEnds


def bisection_search(S: Callable[[float], np.ndarray], l_l: float, l_r: float, low: float, high: float,
                     p_l: np.ndarray | None = None, p_r: np.ndarray | None = None) -> float:
    """Find ``l`` between ``l_l`` and ``l_r`` with ``|S(l) - S(l_l)|`` in ``[low, high]``.

    Bisects on the parameter, keeping ``S(l_l)`` as the fixed reference point.
    """
    p_l = np.asarray(S(l_l) if p_l is None else p_l, float)
    p_r = np.asarray(S(l_r) if p_r is None else p_r, float)
    if not (0 <= low < high <= np.hypot(*(p_r - p_l)) * (1 + 1e-14)):
        raise PreconditionError(f"bisection needs 0 <= low < high <= |S(l_r) - S(l_l)|; got [{low}, {high}]")
    l = 0.5 * (l_l + l_r)
    for _ in range(_MAX_BISECTIONS):
        d = float(np.hypot(*(np.asarray(S(l)) - p_l)))
        if low <= d <= high:
            return l
        if d < low:
            l_l = l
        else:
            l_r = l
        nxt = 0.5 * (l_l + l_r)
        if nxt in (l_l, l_r):
            # window narrower than the parameter resolution
            if low * (1 - 1e-12) <= d <= high * (1 + 1e-12):
                return l
            break
        l = nxt
    raise PreconditionError("bisection did not converge; is S continuous and injective?")


def adjust_ends(S: Callable[[float], np.ndarray], l0: float, l1: float, r_tiny: float, hl: float,
                r_b_star: float = 1.5, p0: np.ndarray | None = None, p1: np.ndarray | None = None
                ) -> tuple[np.ndarray, np.ndarray]:
    """Resequence the end chord ``S(l0) -> S(l1)`` so the first chord is short.

    Returns preimage parameters and points ``q_0..q_M`` with ``q_0 = S(l0)``,
    ``q_M = S(l1)``, all chords in ``[r_tiny h_L, h_L]`` and
    ``r_b* |q_1 - q_0| <= |q_2 - q_1|``. ``l1 < l0`` is allowed and walks the
    curve backwards, which serves the right end of a chain.
    """
    ArmsParams(r_tiny, hl, r_b_star).check_adjust_ends()
    p0 = np.asarray(S(l0) if p0 is None else p0, float)
    p1 = np.asarray(S(l1) if p1 is None else p1, float)
    d01 = float(np.hypot(*(p1 - p0)))
    if not d01 > (1 + r_b_star) * r_tiny * hl:
        raise PreconditionError("adjustEnds needs |p1 - p0| > (1 + r_b*) r_tiny h_L; drop p1 first")
    ls = [l0]
    qs = [p0]
    l = bisection_search(S, l0, l1, r_tiny * hl, min(hl / (2 * r_b_star), d01 / (1 + r_b_star)), p0, p1)
    ls.append(l)
    qs.append(np.asarray(S(l), float))
    while float(np.hypot(*(p1 - qs[-1]))) > hl:
        gap = float(np.hypot(*(p1 - qs[-1])))
        l = bisection_search(S, l, l1, 0.5 * hl, min(hl, 0.5 * gap), qs[-1], p1)
        ls.append(l)
        qs.append(np.asarray(S(l), float))
    ls.append(l1)
    qs.append(p1)
    return np.asarray(ls), np.vstack(qs)


# --------------------------------------------------------------------------
# removal sweep


@njit(cache=True)
def _unlink(x, nxt, prv, alive):
    a = prv[x]
    b = nxt[x]
    if a != -1:
        nxt[a] = b
    if b != -1:
        prv[b] = a
    alive[x] = False


@njit(cache=True)
def _removal_sweep(p, flags, hl, r, closed):
    """Remove markers closer than ``r * min(hl_j, hl_{j+1})`` to their neighbour.

    Neighbours of characteristic markers go first, then a left-to-right sweep.
    A characteristic marker is never removed: if the short chord ends at one,
    the ordinary marker before it is dropped instead. Returns the survivor
    mask, the number removed and the number of short chords left between two
    protected markers.
    """
    n = p.shape[0]
    nxt = np.empty(n, dtype=np.int64)
    prv = np.empty(n, dtype=np.int64)
    for i in range(n):
        nxt[i] = i + 1
        prv[i] = i - 1
    if closed:
        nxt[n - 1] = 0
        prv[0] = n - 1
    else:
        nxt[n - 1] = -1
    alive = np.ones(n, dtype=np.bool_)
    removed = 0
    warn = 0

    for j in range(n):
        if not flags[j] or not alive[j]:
            continue
        for direction in range(2):
            while True:
                q = nxt[j] if direction == 0 else prv[j]
                if q == -1 or q == j:
                    break
                d = math.hypot(p[q, 0] - p[j, 0], p[q, 1] - p[j, 1])
                if d >= r * min(hl[j], hl[q]):
                    break
                if flags[q]:
                    warn += 1
                    break
                _unlink(q, nxt, prv, alive)
                removed += 1

    start = 0
    j = start
    while True:
        while True:
            q = nxt[j]
            if q == -1 or q == j:
                break
            d = math.hypot(p[q, 0] - p[j, 0], p[q, 1] - p[j, 1])
            if d >= r * min(hl[j], hl[q]):
                break
            if flags[q] or (closed and q == start):
                pj = prv[j]
                if flags[j] or j == start or pj == -1:
                    warn += 1
                    break
                _unlink(j, nxt, prv, alive)
                removed += 1
                j = pj
                continue
            _unlink(q, nxt, prv, alive)
            removed += 1
        q = nxt[j]
        if q == -1 or q == start:
            break
        j = q
    return alive, removed, warn


# --------------------------------------------------------------------------
# one step


@dataclass
class ArmsResult:
    spline: CubicSpline
    char_idx: np.ndarray
    diagnostics: ArmsDiagnostics


def _refine(chain: MarkerChain, hl_m: np.ndarray, spline: CubicSpline, flow, params: ArmsParams, end_param: float):
    """Subdivide preimage intervals of long chords until none exceeds (1 - 2 r_tiny) h_L."""
    added = 0
    for _ in range(_MAX_REFINE_PASSES):
        p, ls = chain.markers, chain.params
        d = chain.chords()
        hnext = np.roll(hl_m, -1) if chain.closed else hl_m[1:]
        hstar = (1 - 2 * params.r_tiny) * np.minimum(hl_m[: len(d)], hnext)
        long = np.flatnonzero(d > hstar)
        if long.size == 0:
            return chain, hl_m, added
        lnext = np.append(ls[1:], end_param) if chain.closed else ls[1:]
        pos, new_l = [], []
        for j in long:
            m = int(math.ceil(d[j] / hstar[j]))
            t = np.arange(1, m) / m
            new_l.append(ls[j] + (lnext[j] - ls[j]) * t)
            pos.append(np.full(m - 1, j + 1))
        new_l = np.concatenate(new_l)
        pos = np.concatenate(pos)
        x_new = spline(new_l)
        p_new = np.atleast_2d(flow(x_new))
        if not np.all(np.isfinite(p_new)):
            raise ResolutionError("flow map produced non-finite markers")
        chain = MarkerChain(
            np.insert(p, pos, p_new, axis=0),
            np.insert(ls, pos, new_l),
            np.insert(chain.characteristic, pos, False),
            chain.closed,
        )
        hl_new = params.hl_of(spline.curvature_radius(new_l)) if params.curvature_based else np.full(len(new_l), params.nominal_hl)
        hl_m = np.insert(hl_m, pos, hl_new)
        added += len(new_l)
    raise ResolutionError("marker insertion did not converge; the flow map may be too rough for h_L")


def _end_hl(params: ArmsParams, spline: CubicSpline, la: float, lb: float, ha: float, hb: float) -> float:
    if not params.curvature_based:
        return params.nominal_hl
    ls = np.linspace(la, lb, 9)
    return float(min(ha, hb, params.hl_of(spline.curvature_radius(ls)).min()))


def _repair_end(chain: MarkerChain, hl_m: np.ndarray, spline: CubicSpline, flow, params: ArmsParams,
                diag: ArmsDiagnostics, right: bool):
    """Drop near markers at one open end, then resequence the end chord with adjust_ends."""
    rev = (lambda a: a[::-1]) if right else (lambda a: a)
    p, ls, fl, hm = rev(chain.markers), rev(chain.params), rev(chain.characteristic), rev(hl_m)
    r, rb = params.r_tiny, params.r_b_star
    if len(p) >= 3 and np.hypot(*(p[2] - p[1])) >= params.r_b_trigger * np.hypot(*(p[1] - p[0])):
        return chain, hl_m
    drop = 0
    while len(p) - drop > 2:
        i = 1 + drop
        h = _end_hl(params, spline, ls[0], ls[i], hm[0], hm[i])
        if np.hypot(*(p[i] - p[0])) > (1 + rb) * r * h:
            break
        if fl[i]:
            diag.warnings.append("characteristic marker too close to a trail end for adjustEnds")
            return chain, hl_m
        drop += 1
    keep = np.ones(len(p), bool)
    keep[1 : 1 + drop] = False
    p, ls, fl, hm = p[keep], ls[keep], fl[keep], hm[keep]
    diag.n_removed += drop
    if len(p) < 2:
        raise ResolutionError("open chain collapsed while repairing its end")
    h = _end_hl(params, spline, ls[0], ls[1], hm[0], hm[1])
    if not np.hypot(*(p[1] - p[0])) > (1 + rb) * r * h:
        diag.warnings.append("end chord too short for adjustEnds")
        out = MarkerChain(rev(p), rev(ls), rev(fl), False)
        return out, rev(hm)

    def S(l):
        return np.asarray(flow(spline(l)), float)

    ql, qp = adjust_ends(S, float(ls[0]), float(ls[1]), r, h, rb, p[0], p[1])
    mid = slice(1, len(ql) - 1)
    p = np.vstack([p[:1], qp[mid], p[1:]])
    ls = np.concatenate([ls[:1], ql[mid], ls[1:]])
    fl = np.concatenate([fl[:1], np.zeros(len(ql) - 2, bool), fl[1:]])
    hnew = np.full(len(ql) - 2, h) if params.curvature_based else np.full(len(ql) - 2, params.nominal_hl)
    hm = np.concatenate([hm[:1], hnew, hm[1:]])
    diag.n_added += len(ql) - 2
    return MarkerChain(rev(p), rev(ls), rev(fl), False), rev(hm)


def arms_step(flow: Callable[[np.ndarray], np.ndarray], spline: CubicSpline, char_idx: np.ndarray,
              params: ArmsParams, char_images: np.ndarray | None = None) -> ArmsResult:
    """Advance one spline by one time step with marker regularisation.

    ``flow`` maps an (n, 2) array of points to their images. ``char_images``
    optionally overrides the images of the characteristic markers so shared
    vertices stay bitwise identical across splines.
    """
    closed = spline.closed
    knots = spline.knots
    x = spline.points[:-1] if closed else spline.points
    ls = knots[:-1] if closed else knots
    end_param = float(knots[-1])
    char_idx = np.asarray(char_idx, dtype=np.int64)
    if np.any(char_idx < 0) or np.any(char_idx >= len(x)) or np.any(np.diff(char_idx) <= 0):
        raise PreconditionError("characteristic indices must be sorted, unique and in range")
    if not closed and (len(char_idx) < 2 or char_idx[0] != 0 or char_idx[-1] != len(x) - 1):
        raise PreconditionError("both ends of an open chain must be characteristic")

    p = np.array(np.atleast_2d(flow(x)), dtype=float)
    if char_images is not None:
        p[char_idx] = np.asarray(char_images, float)
    if not np.all(np.isfinite(p)):
        raise ResolutionError("flow map produced non-finite markers")
    flags = np.zeros(len(x), bool)
    flags[char_idx] = True
    chain = MarkerChain(p, ls.copy(), flags, closed)
    if params.curvature_based:
        hl_m = params.hl_of(spline.curvature_radius(ls))
    else:
        hl_m = np.full(len(x), params.nominal_hl)

    diag = ArmsDiagnostics()
    chain, hl_m, diag.n_added = _refine(chain, hl_m, spline, flow, params, end_param)

    alive, removed, warn = _removal_sweep(chain.markers, chain.characteristic, hl_m, params.r_tiny, closed)
    diag.n_removed += int(removed)
    if warn:
        diag.warnings.append(f"{warn} short chord(s) between protected markers kept")
    chain = MarkerChain(chain.markers[alive], chain.params[alive], chain.characteristic[alive], closed)
    hl_m = hl_m[alive]

    if not closed:
        params.check_adjust_ends()
        chain, hl_m = _repair_end(chain, hl_m, spline, flow, params, diag, right=False)
        chain, hl_m = _repair_end(chain, hl_m, spline, flow, params, diag, right=True)

    if len(chain.markers) < 4:
        raise ResolutionError(f"only {len(chain.markers)} markers left; h_L is too coarse for this curve")
    if int(chain.characteristic.sum()) != len(char_idx):
        raise ResolutionError("a characteristic marker was lost")
    pts = np.vstack([chain.markers, chain.markers[:1]]) if closed else chain.markers
    if np.any(_chords(chain.markers, closed) < 1e-12):
        raise ResolutionError("markers collide within 1e-12")
    new = CubicSpline(pts, spline.kind)
    diag.n_markers = len(chain.markers)
    chords = _chords(chain.markers, closed)
    diag.length = float(chords.sum())
    diag.mu_variation = float(np.abs(chords - params.nominal_hl / 3).sum())
    return ArmsResult(new, np.flatnonzero(chain.characteristic), diag)


def chord_bounds(spline: CubicSpline, params: ArmsParams) -> np.ndarray:
    """Per-chord ``h_L``: the rule evaluated at the smaller endpoint radius."""
    ls = spline.knots
    if not params.curvature_based:
        return np.full(len(ls) - 1, params.nominal_hl)
    h = params.hl_of(spline.curvature_radius(ls))
    return np.minimum(h[:-1], h[1:])


__all__ = [
    "ArmsDiagnostics",
    "ArmsParams",
    "ArmsResult",
    "CurvatureBased",
    "MarkerChain",
    "SIGMAS",
    "adjust_ends",
    "arms_step",
    "bisection_search",
    "chord_bounds",
    "h_L_of_radius",
    "is_regular",
    "mu_variation",
]
