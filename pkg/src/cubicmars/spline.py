"""Chordal cubic splines for marker sequences.

A spline is stored by its knots ``l_0 < ... < l_N`` (cumulative chordal
lengths), the interpolated values ``f_i`` and the moments ``M_i = p''(l_i)``.
On interval ``i`` with local variable ``t = l - l_i`` and ``h = l_{i+1} - l_i``::

    p(t) = f_i + a1 t + M_i t^2 / 2 + (M_{i+1} - M_i) t^3 / (6 h)
    a1   = (f_{i+1} - f_i) / h - h (2 M_i + M_{i+1}) / 6

Two end conditions are supported. ``"periodic"`` closes the curve with C2
continuity at ``l_0 = l_N``; ``"not-a-knot"`` asks for continuous third
derivatives at ``l_1`` and ``l_{N-1}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from ._jit import njit
from .errors import DegenerateChordError, DegenerateParametrizationError, SplineDomainError

Kind = Literal["periodic", "not-a-knot"]
KINDS = ("periodic", "not-a-knot")

# relative slack accepted when evaluating just outside [l_0, l_N]
_DOMAIN_SLACK = 1e-12
# |x'y'' - y'x''| below this fraction of |p'|^3 reports an infinite radius
_FLAT_RATIO = 1e-14


# --------------------------------------------------------------------------
# kernels


@njit(cache=True)
def _thomas(sub, diag, sup, rhs):
    """Solve a tridiagonal system; ``sub[0]`` and ``sup[-1]`` are ignored."""
    n = diag.shape[0]
    cp = np.empty(n)
    dp = np.empty(n)
    cp[0] = sup[0] / diag[0]
    dp[0] = rhs[0] / diag[0]
    for i in range(1, n):
        m = diag[i] - sub[i] * cp[i - 1]
        cp[i] = sup[i] / m
        dp[i] = (rhs[i] - sub[i] * dp[i - 1]) / m
    x = np.empty(n)
    x[n - 1] = dp[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return x


@njit(cache=True)
def _cyclic_thomas(sub, diag, sup, rhs):
    """Cyclic tridiagonal solve by Sherman-Morrison.

    ``sub[0]`` multiplies ``x[n-1]`` in row 0 and ``sup[n-1]`` multiplies
    ``x[0]`` in row ``n-1``.
    """
    n = diag.shape[0]
    gamma = -diag[0]
    alpha = sup[n - 1]
    beta = sub[0]
    d = diag.copy()
    d[0] = diag[0] - gamma
    d[n - 1] = diag[n - 1] - alpha * beta / gamma
    y = _thomas(sub, d, sup, rhs)
    u = np.zeros(n)
    u[0] = gamma
    u[n - 1] = alpha
    z = _thomas(sub, d, sup, u)
    fact = (y[0] + beta * y[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma)
    return y - fact * z


@njit(cache=True)
def _interior_rows(knots, values):
    """mu_i, lambda_i and 6 f[l_{i-1}, l_i, l_{i+1}] for i = 1..N-1."""
    n = knots.shape[0] - 1
    mu = np.empty(n + 1)
    lam = np.empty(n + 1)
    rhs = np.zeros(n + 1)
    for i in range(1, n):
        h0 = knots[i] - knots[i - 1]
        h1 = knots[i + 1] - knots[i]
        mu[i] = h0 / (h0 + h1)
        lam[i] = h1 / (h0 + h1)
        rhs[i] = 6.0 * ((values[i + 1] - values[i]) / h1 - (values[i] - values[i - 1]) / h0) / (h0 + h1)
    return mu, lam, rhs


@njit(cache=True)
def _periodic_rows(knots, values):
    """Rows 0..N-1 of the cyclic moment system, with wrap-around neighbours."""
    n = knots.shape[0] - 1
    mu = np.empty(n)
    lam = np.empty(n)
    rhs = np.empty(n)
    for i in range(n):
        if i == 0:
            h0 = knots[n] - knots[n - 1]
            fm = values[n - 1]
        else:
            h0 = knots[i] - knots[i - 1]
            fm = values[i - 1]
        h1 = knots[i + 1] - knots[i]
        mu[i] = h0 / (h0 + h1)
        lam[i] = h1 / (h0 + h1)
        rhs[i] = 6.0 * ((values[i + 1] - values[i]) / h1 - (values[i] - fm) / h0) / (h0 + h1)
    return mu, lam, rhs


@njit(cache=True)
def _periodic_moments(knots, values):
    n = knots.shape[0] - 1
    mu, lam, rhs = _periodic_rows(knots, values)
    diag = np.full(n, 2.0)
    m = _cyclic_thomas(mu, diag, lam, rhs)
    out = np.empty(n + 1)
    out[:n] = m
    out[n] = m[0]
    return out


@njit(cache=True)
def _nak_moments(knots, values):
    """Not-a-knot moments through the reduced tridiagonal system.

    Eliminating ``M_0`` and ``M_N`` with the end rows leaves an (N-1)x(N-1)
    strictly diagonally dominant system for ``M_1..M_{N-1}``; afterwards
    ``M_0 = b_1 - M_1 - M_2`` and ``M_N = b_{N-1} - M_{N-2} - M_{N-1}``.
    """
    n = knots.shape[0] - 1
    mu, lam, rhs = _interior_rows(knots, values)
    k = n - 1
    sub = np.empty(k)
    diag = np.empty(k)
    sup = np.empty(k)
    b = np.empty(k)
    for r in range(k):
        i = r + 1
        sub[r] = mu[i]
        diag[r] = 2.0
        sup[r] = lam[i]
        b[r] = rhs[i]
    # 1 - mu_1 = lambda_1 and 1 - lambda_{N-1} = mu_{N-1}
    diag[0] = (2.0 - mu[1]) / lam[1]
    sup[0] = (lam[1] - mu[1]) / lam[1]
    diag[k - 1] = (2.0 - lam[n - 1]) / mu[n - 1]
    sub[k - 1] = (mu[n - 1] - lam[n - 1]) / mu[n - 1]
    inner = _thomas(sub, diag, sup, b)
    out = np.empty(n + 1)
    out[1:n] = inner
    out[0] = rhs[1] - out[1] - out[2]
    out[n] = rhs[n - 1] - out[n - 1] - out[n - 2]
    return out


@njit(cache=True)
def _locate(knots, ls, left):
    n = knots.shape[0] - 1
    idx = np.empty(ls.shape[0], dtype=np.int64)
    for k in range(ls.shape[0]):
        if left:
            i = np.searchsorted(knots, ls[k], side="left") - 1
        else:
            i = np.searchsorted(knots, ls[k], side="right") - 1
        if i < 0:
            i = 0
        elif i > n - 1:
            i = n - 1
        idx[k] = i
    return idx


@njit(cache=True)
def _evaluate(knots, values, moments, ls, order, left):
    idx = _locate(knots, ls, left)
    out = np.empty(ls.shape[0])
    for k in range(ls.shape[0]):
        i = idx[k]
        h = knots[i + 1] - knots[i]
        t = ls[k] - knots[i]
        m0 = moments[i]
        m1 = moments[i + 1]
        a1 = (values[i + 1] - values[i]) / h - h * (2.0 * m0 + m1) / 6.0
        a2 = 0.5 * m0
        a3 = (m1 - m0) / (6.0 * h)
        if order == 0:
            out[k] = values[i] + t * (a1 + t * (a2 + t * a3))
        elif order == 1:
            out[k] = a1 + t * (2.0 * a2 + 3.0 * t * a3)
        elif order == 2:
            out[k] = 2.0 * a2 + 6.0 * t * a3
        elif order == 3:
            out[k] = 6.0 * a3
        else:
            out[k] = 0.0
    return out


# --------------------------------------------------------------------------
# public helpers


def chordal_lengths(points: np.ndarray) -> np.ndarray:
    """Cumulative chordal lengths ``l_0 = 0, l_i = l_{i-1} + |X_i - X_{i-1}|``.

    Raises :class:`DegenerateChordError` if two consecutive points coincide.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError(f"expected an (n, 2) array of points, got shape {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("points contain non-finite values")
    chords = np.hypot(*np.diff(pts, axis=0).T)
    bad = np.flatnonzero(chords == 0.0)
    if bad.size:
        raise DegenerateChordError(f"zero-length chord between points {bad[0]} and {bad[0] + 1}")
    out = np.empty(len(pts))
    out[0] = 0.0
    np.cumsum(chords, out=out[1:])
    return out


@dataclass(frozen=True)
class MomentSystem:
    """The linear system ``A M = b`` satisfied by the moments of a spline.

    For ``"not-a-knot"`` the matrix is (N+1)x(N+1) with end rows
    ``(lambda_1, -1, mu_1)`` and ``(lambda_{N-1}, -1, mu_{N-1})`` and zero
    right-hand side there. For ``"periodic"`` it is the NxN cyclic matrix with
    diagonal 2, ``mu_i`` left of the diagonal and ``lambda_i`` right of it.
    """

    kind: str
    mu: np.ndarray
    lam: np.ndarray
    rhs: np.ndarray

    @classmethod
    def assemble(cls, knots: np.ndarray, values: np.ndarray, kind: Kind) -> "MomentSystem":
        knots = np.asarray(knots, dtype=float)
        values = np.asarray(values, dtype=float)
        if kind == "periodic":
            return cls(kind, *_periodic_rows(knots, values))
        if kind == "not-a-knot":
            mu, lam, rhs = _interior_rows(knots, values)
            mu[0] = mu[-1] = lam[0] = lam[-1] = np.nan
            return cls(kind, mu, lam, rhs)
        raise ValueError(f"unknown spline kind {kind!r}")

    def to_dense(self) -> np.ndarray:
        if self.kind == "periodic":
            n = len(self.mu)
            a = np.zeros((n, n))
            for i in range(n):
                a[i, i] = 2.0
                a[i, (i - 1) % n] += self.mu[i]
                a[i, (i + 1) % n] += self.lam[i]
            return a
        n = len(self.mu) - 1
        a = np.zeros((n + 1, n + 1))
        a[0, :3] = (self.lam[1], -1.0, self.mu[1])
        for i in range(1, n):
            a[i, i - 1 : i + 2] = (self.mu[i], 2.0, self.lam[i])
        a[n, n - 2 :] = (self.lam[n - 1], -1.0, self.mu[n - 1])
        return a

    def residual(self, moments: np.ndarray) -> float:
        """Relative residual ``|A M - b|_inf / max(|b|_inf, |A|_inf |M|_inf)``."""
        m = np.asarray(moments, dtype=float)
        if self.kind == "periodic":
            m = m[: len(self.mu)]
        a = self.to_dense()
        r = a @ m - self.rhs
        scale = max(np.abs(self.rhs).max(), np.abs(a).sum(axis=1).max() * np.abs(m).max(), np.finfo(float).tiny)
        return float(np.abs(r).max() / scale)


def _solve_moments(knots: np.ndarray, values: np.ndarray, kind: Kind) -> np.ndarray:
    if kind == "periodic":
        return _periodic_moments(knots, values)
    if kind == "not-a-knot":
        return _nak_moments(knots, values)
    raise ValueError(f"unknown spline kind {kind!r}; expected one of {KINDS}")


def _check_knots(knots: np.ndarray, kind: Kind) -> None:
    if kind not in KINDS:
        raise ValueError(f"unknown spline kind {kind!r}; expected one of {KINDS}")
    if knots.ndim != 1 or len(knots) < 4:
        raise ValueError("a cubic spline needs at least N = 3 intervals")
    if np.any(np.diff(knots) <= 0.0):
        raise DegenerateChordError("knots must be strictly increasing")


class SplineFunction:
    """Scalar cubic spline ``p(l)`` interpolating ``values`` at ``knots``."""

    def __init__(self, knots: np.ndarray, values: np.ndarray, kind: Kind):
        knots = np.ascontiguousarray(knots, dtype=float)
        values = np.ascontiguousarray(values, dtype=float)
        _check_knots(knots, kind)
        if values.shape != knots.shape:
            raise ValueError("knots and values must have the same length")
        if kind == "periodic" and values[0] != values[-1]:
            raise ValueError("periodic data must satisfy f_0 == f_N")
        self.knots = knots
        self.values = values
        self.kind: Kind = kind
        self.moments = _solve_moments(knots, values, kind)

    @property
    def n_intervals(self) -> int:
        return len(self.knots) - 1

    def moment_system(self) -> MomentSystem:
        return MomentSystem.assemble(self.knots, self.values, self.kind)

    def _params(self, l) -> np.ndarray:
        ls = np.atleast_1d(np.asarray(l, dtype=float)).ravel()
        lo, hi = self.knots[0], self.knots[-1]
        slack = _DOMAIN_SLACK * (hi - lo)
        if np.any(ls < lo - slack) or np.any(ls > hi + slack) or not np.all(np.isfinite(ls)):
            raise SplineDomainError(f"parameter outside [{lo}, {hi}]")
        return np.clip(ls, lo, hi)

    def __call__(self, l, order: int = 0, side: str = "right"):
        if order < 0:
            raise ValueError("derivative order must be non-negative")
        if side not in ("left", "right"):
            raise ValueError("side must be 'left' or 'right'")
        ls = self._params(l)
        out = _evaluate(self.knots, self.values, self.moments, ls, int(order), side == "left")
        return out[0] if np.ndim(l) == 0 else out.reshape(np.shape(l))

    def coefficients(self) -> np.ndarray:
        """Per-interval coefficients ``(a0, a1, a2, a3)`` in ``t = l - l_i``; shape (N, 4)."""
        h = np.diff(self.knots)
        m0, m1 = self.moments[:-1], self.moments[1:]
        a1 = np.diff(self.values) / h - h * (2.0 * m0 + m1) / 6.0
        return np.column_stack([self.values[:-1], a1, 0.5 * m0, (m1 - m0) / (6.0 * h)])


class CubicSpline:
    """Planar chordal cubic spline through a marker sequence.

    ``points`` holds ``X_0..X_N``; a periodic spline needs ``X_N == X_0``.
    Knots default to the cumulative chordal lengths of the points.
    """

    def __init__(self, points: np.ndarray, kind: Kind, knots: np.ndarray | None = None):
        pts = np.ascontiguousarray(points, dtype=float)
        if kind == "periodic" and pts.ndim == 2 and len(pts) and not np.array_equal(pts[0], pts[-1]):
            raise ValueError("periodic spline needs points[-1] == points[0]")
        knots = chordal_lengths(pts) if knots is None else np.ascontiguousarray(knots, dtype=float)
        self.points = pts
        self.kind: Kind = kind
        self.x = SplineFunction(knots, pts[:, 0], kind)
        self.y = SplineFunction(knots, pts[:, 1], kind)

    @property
    def knots(self) -> np.ndarray:
        return self.x.knots

    @property
    def n_intervals(self) -> int:
        return len(self.points) - 1

    @property
    def closed(self) -> bool:
        return self.kind == "periodic"

    @property
    def moments(self) -> np.ndarray:
        return np.column_stack([self.x.moments, self.y.moments])

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.knots[0]), float(self.knots[-1])

    def __call__(self, l, order: int = 0, side: str = "right") -> np.ndarray:
        x = np.asarray(self.x(l, order, side))
        y = np.asarray(self.y(l, order, side))
        return np.stack([x, y], axis=-1)

    def coefficients(self) -> np.ndarray:
        """Shape (N, 4, 2): coefficients of ``t^0..t^3`` for x and y on each interval."""
        return np.stack([self.x.coefficients(), self.y.coefficients()], axis=-1)

    def curvature_radius(self, l, side: str = "right"):
        """Radius ``|p'|^3 / |x'y'' - y'x''|``; ``inf`` where the curve is locally straight."""
        d1 = np.atleast_2d(self(l, 1, side))
        d2 = np.atleast_2d(self(l, 2, side))
        speed = np.hypot(d1[:, 0], d1[:, 1])
        if np.any(speed < 1e-12):
            raise DegenerateParametrizationError("curve speed vanishes; curvature radius undefined")
        cross = np.abs(d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])
        num = speed**3
        with np.errstate(divide="ignore"):
            rho = np.where(cross <= _FLAT_RATIO * num, np.inf, num / np.where(cross > 0, cross, 1.0))
        return float(rho[0]) if np.ndim(l) == 0 else rho.reshape(np.shape(l))

    def chord_lengths(self) -> np.ndarray:
        return np.diff(self.knots)

    def sample(self, per_interval: int = 8) -> np.ndarray:
        """Dense polyline through the spline, ``per_interval`` points per interval."""
        t = np.linspace(0.0, 1.0, per_interval, endpoint=False)
        k = self.knots
        ls = (k[:-1, None] + np.diff(k)[:, None] * t[None, :]).ravel()
        return np.vstack([self(ls), self.points[-1:]])


def fit_spline(points: np.ndarray, kind: Kind) -> CubicSpline:
    """Fit a chordal periodic or not-a-knot cubic spline through ``points``."""
    return CubicSpline(points, kind)


__all__ = [
    "KINDS",
    "CubicSpline",
    "MomentSystem",
    "SplineFunction",
    "chordal_lengths",
    "fit_spline",
]
