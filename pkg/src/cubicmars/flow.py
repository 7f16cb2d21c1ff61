"""Velocity fields, Butcher tableaus and the discrete flow map of one time step."""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal
from importlib import resources
from pathlib import Path
from typing import Callable

import numpy as np

from ._jit import njit
from .errors import ConfigError

# --------------------------------------------------------------------------
# velocity fields


class VelocityField:
    """Divergence-free velocity ``u(x, t)``; ``__call__`` maps (n, 2) points to (n, 2)."""

    name = "field"

    def __call__(self, points: np.ndarray, t: float) -> np.ndarray:
        raise NotImplementedError

    def to_dict(self) -> dict:
        return {"name": self.name}


@dataclass
class Vortex(VelocityField):
    """Single-vortex shear, reversed by ``cos(pi t / T)`` so the flow returns at ``t = T``.

    Stream function ``-(1/pi) sin^2(pi x) sin^2(pi y) cos(pi t / T)``.
    """

    T: float
    name = "vortex"

    def __call__(self, points, t):
        return _vortex(np.ascontiguousarray(points, dtype=float), float(t), float(self.T))

    def to_dict(self):
        return {"name": self.name, "T": self.T}


@dataclass
class Deformation(VelocityField):
    """Periodic array of ``n`` x ``n`` vortices, reversed by ``cos(pi t / T)``."""

    T: float
    n: int = 4
    name = "deformation"

    def __call__(self, points, t):
        return _deformation(np.ascontiguousarray(points, dtype=float), float(t), float(self.T), float(self.n))

    def to_dict(self):
        return {"name": self.name, "T": self.T, "n": self.n}


@dataclass
class Zero(VelocityField):
    name = "zero"

    def __call__(self, points, t):
        return np.zeros_like(np.asarray(points, dtype=float))


@dataclass
class Custom(VelocityField):
    """Wrap a user callable ``f(points, t) -> velocities``."""

    func: Callable[[np.ndarray, float], np.ndarray]
    name = "custom"

    def __call__(self, points, t):
        return np.asarray(self.func(np.asarray(points, dtype=float), t), dtype=float)


@njit(cache=True)
def _vortex(p, t, T):
    out = np.empty_like(p)
    ct = math.cos(math.pi * t / T)
    for i in range(p.shape[0]):
        sx = math.sin(math.pi * p[i, 0])
        sy = math.sin(math.pi * p[i, 1])
        out[i, 0] = -sx * sx * math.sin(2.0 * math.pi * p[i, 1]) * ct
        out[i, 1] = math.sin(2.0 * math.pi * p[i, 0]) * sy * sy * ct
    return out


@njit(cache=True)
def _deformation(p, t, T, n):
    out = np.empty_like(p)
    ct = math.cos(math.pi * t / T)
    for i in range(p.shape[0]):
        ax = n * math.pi * (p[i, 0] + 0.5)
        ay = n * math.pi * (p[i, 1] + 0.5)
        out[i, 0] = math.sin(ax) * math.sin(ay) * ct
        out[i, 1] = math.cos(ax) * math.cos(ay) * ct
    return out


FIELDS = {"vortex": Vortex, "deformation": Deformation, "zero": Zero}


def make_field(name: str, T: float = 1.0, **kw) -> VelocityField:
    if name == "zero":
        return Zero()
    if name not in FIELDS:
        raise ConfigError(f"unknown velocity field {name!r}; choose from {sorted(FIELDS)}")
    return FIELDS[name](T, **kw)


def velocity(field: VelocityField, x, t: float) -> np.ndarray:
    """Velocity at one point (shape (2,)) or many points (shape (n, 2))."""
    pts = np.asarray(x, dtype=float)
    out = field(np.atleast_2d(pts), t)
    return out[0] if pts.ndim == 1 else out


# --------------------------------------------------------------------------
# Butcher tableaus


@dataclass(frozen=True)
class ButcherTableau:
    name: str
    order: int
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    @property
    def stages(self) -> int:
        return len(self.b)

    def __post_init__(self):
        s = len(self.b)
        if self.a.shape != (s, s) or self.c.shape != (s,):
            raise ConfigError(f"tableau {self.name}: inconsistent shapes")
        if np.any(np.triu(self.a) != 0.0):
            raise ConfigError(f"tableau {self.name}: only explicit methods are supported")


def parse_tableau(text: str) -> tuple[str, int, list[Decimal], dict[tuple[int, int], Decimal], list[Decimal]]:
    """Parse the tableau data format into exact decimals.

    Lines: ``name N``, ``order p``, ``stages s``, then sections ``c`` (s values),
    ``a`` (``i j value`` triples, zero-based) and ``b`` (s values). ``#`` starts a comment.
    """
    name, order, stages = "", 0, 0
    c: list[Decimal] = []
    a: dict[tuple[int, int], Decimal] = {}
    b: list[Decimal] = []
    section = None
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if tok[0] in ("name", "order", "stages") and len(tok) == 2:
            if tok[0] == "name":
                name = tok[1]
            elif tok[0] == "order":
                order = int(tok[1])
            else:
                stages = int(tok[1])
        elif tok[0] in ("c", "a", "b") and len(tok) == 1:
            section = tok[0]
        elif section == "c":
            c.append(Decimal(tok[0]))
        elif section == "b":
            b.append(Decimal(tok[0]))
        elif section == "a" and len(tok) == 3:
            a[(int(tok[0]), int(tok[1]))] = Decimal(tok[2])
        else:
            raise ConfigError(f"unreadable tableau line: {raw!r}")
    if not (order and stages and len(c) == stages and len(b) == stages):
        raise ConfigError("tableau file is incomplete")
    return name, order, c, a, b


def load_tableau(name_or_path: str) -> ButcherTableau:
    """Load a bundled tableau (``rk4``, ``verner6``, ``dormand_prince8``) or a file path."""
    path = Path(name_or_path)
    if path.suffix == ".txt" and path.exists():
        text = path.read_text()
    else:
        try:
            text = resources.files("cubicmars.tableaus").joinpath(f"{name_or_path}.txt").read_text()
        except FileNotFoundError as exc:
            raise ConfigError(f"unknown tableau {name_or_path!r}") from exc
    name, order, c, a, b = parse_tableau(text)
    s = len(b)
    am = np.zeros((s, s))
    for (i, j), v in a.items():
        am[i, j] = float(v)
    tab = ButcherTableau(name, order, am, np.array([float(x) for x in b]), np.array([float(x) for x in c]))
    return tab


TABLEAU_BY_ORDER = {4: "rk4", 6: "verner6", 8: "dormand_prince8"}


def tableau_for_order(order: int) -> ButcherTableau:
    if order not in TABLEAU_BY_ORDER:
        raise ConfigError(f"no bundled tableau of order {order}; choose from {sorted(TABLEAU_BY_ORDER)}")
    return load_tableau(TABLEAU_BY_ORDER[order])


# --------------------------------------------------------------------------
# time stepping


def rk_step(field: VelocityField, tab: ButcherTableau, points: np.ndarray, t: float, k: float) -> np.ndarray:
    """One explicit Runge-Kutta step of size ``k`` (negative ``k`` integrates backwards)."""
    x = np.asarray(points, dtype=float)
    ks = []
    for i in range(tab.stages):
        y = x.copy()
        for j in range(i):
            if tab.a[i, j] != 0.0:
                y += (k * tab.a[i, j]) * ks[j]
        ks.append(field(y, t + tab.c[i] * k))
    out = x.copy()
    for i in range(tab.stages):
        if tab.b[i] != 0.0:
            out += (k * tab.b[i]) * ks[i]
    return out


@dataclass(frozen=True)
class DiscreteFlowMap:
    """The map ``X(t0) -> X(t0 + k)`` realised by one Runge-Kutta step."""

    field: VelocityField
    tableau: ButcherTableau
    t0: float
    k: float

    def __post_init__(self):
        if not (self.k > 0 and math.isfinite(self.k)):
            raise ConfigError("time step k must be positive")

    def __call__(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        out = rk_step(self.field, self.tableau, np.atleast_2d(pts), self.t0, self.k)
        return out[0] if pts.ndim == 1 else out


__all__ = [
    "ButcherTableau",
    "Custom",
    "Deformation",
    "DiscreteFlowMap",
    "TABLEAU_BY_ORDER",
    "VelocityField",
    "Vortex",
    "Zero",
    "load_tableau",
    "make_field",
    "parse_tableau",
    "rk_step",
    "tableau_for_order",
    "velocity",
]
