"""Scenes: interface geometry, graph, pairing and phases, plus built-ins and JSON I/O.

Every edge carries an exact parametric geometry ``s -> P(s)`` on ``[0, 1]``
running from its source vertex to its target vertex. The geometry is used
to seed markers and to compute reference areas.
"""

from __future__ import annotations

import json
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .errors import ConfigError, InvalidGraphError
from .topology import Cycle, Edge, EdgeGraph, OrientedEdge, Phase, Vertex, Walk, check_phases

_ENDPOINT_TOL = 1e-9


# --------------------------------------------------------------------------
# geometries


class EdgeGeometry(ABC):
    kind: str = ""

    @abstractmethod
    def point(self, s: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def derivative(self, s: np.ndarray, order: int = 1) -> np.ndarray: ...

    @abstractmethod
    def to_dict(self) -> dict[str, Any]: ...

    def breakpoints(self) -> np.ndarray:
        """Parameters where the geometry may lose smoothness, including 0 and 1."""
        return np.array([0.0, 1.0])

    def curvature_radius(self, s: np.ndarray) -> np.ndarray:
        d1 = self.derivative(s, 1)
        d2 = self.derivative(s, 2)
        speed = np.hypot(d1[:, 0], d1[:, 1])
        cross = np.abs(d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])
        num = speed**3
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(cross <= 1e-14 * num, np.inf, num / cross)


@dataclass
class Segment(EdgeGeometry):
    p0: tuple[float, float]
    p1: tuple[float, float]
    kind = "segment"

    def point(self, s):
        s = np.atleast_1d(np.asarray(s, float))[:, None]
        a, b = np.asarray(self.p0), np.asarray(self.p1)
        return a + s * (b - a)

    def derivative(self, s, order=1):
        s = np.atleast_1d(np.asarray(s, float))
        d = np.asarray(self.p1) - np.asarray(self.p0) if order == 1 else np.zeros(2)
        return np.tile(d, (len(s), 1))

    def to_dict(self):
        return {"type": "segment"}


@dataclass
class Arc(EdgeGeometry):
    center: tuple[float, float]
    radius: float
    theta0: float
    theta1: float
    kind = "arc"

    def point(self, s):
        th = self.theta0 + np.atleast_1d(np.asarray(s, float)) * (self.theta1 - self.theta0)
        return np.column_stack([self.center[0] + self.radius * np.cos(th), self.center[1] + self.radius * np.sin(th)])

    def derivative(self, s, order=1):
        w = self.theta1 - self.theta0
        th = self.theta0 + np.atleast_1d(np.asarray(s, float)) * w
        # d^k/ds^k (cos, sin) = w^k (cos, sin)(th + k pi/2)
        ph = th + order * math.pi / 2
        return self.radius * w**order * np.column_stack([np.cos(ph), np.sin(ph)])

    def to_dict(self):
        return {"type": "arc", "center": list(self.center), "radius": self.radius,
                "theta0": self.theta0, "theta1": self.theta1}


@dataclass
class Polyline(EdgeGeometry):
    points: np.ndarray
    kind = "polyline"

    def __post_init__(self):
        self.points = np.asarray(self.points, float)
        seg = np.hypot(*np.diff(self.points, axis=0).T)
        if len(self.points) < 2 or np.any(seg == 0):
            raise ConfigError("polyline needs at least two distinct consecutive points")
        self._s = np.concatenate([[0.0], np.cumsum(seg)]) / seg.sum()

    def _seg(self, s):
        return np.clip(np.searchsorted(self._s, s, side="right") - 1, 0, len(self._s) - 2)

    def point(self, s):
        s = np.atleast_1d(np.asarray(s, float))
        return np.column_stack([np.interp(s, self._s, self.points[:, 0]), np.interp(s, self._s, self.points[:, 1])])

    def derivative(self, s, order=1):
        s = np.atleast_1d(np.asarray(s, float))
        if order > 1:
            return np.zeros((len(s), 2))
        i = self._seg(s)
        return (self.points[i + 1] - self.points[i]) / np.diff(self._s)[i][:, None]

    def breakpoints(self):
        return self._s.copy()

    def to_dict(self):
        return {"type": "polyline", "points": self.points.tolist()}


@dataclass
class Analytic(EdgeGeometry):
    """Named analytic curve restricted to ``[t0, t1]`` of its own parameter.

    * ``rose``: polar ``r = a sin(k theta)`` about ``center``.
    * ``nodal_cubic``: ``origin + scale * (t^2 - 1, t (t^2 - 1))``, a loop with a
      node at ``t = +-1``.
    * ``ellipse``: ``center + R(angle) (a cos t, b sin t)``.
    """

    curve: str
    params: dict[str, Any]
    t0: float
    t1: float
    kind = "analytic"

    def __post_init__(self):
        if self.curve not in ("rose", "nodal_cubic", "ellipse"):
            raise ConfigError(f"unknown analytic curve {self.curve!r}")

    def _t(self, s):
        return self.t0 + np.atleast_1d(np.asarray(s, float)) * (self.t1 - self.t0)

    def _raw(self, t, order):
        p = self.params
        if self.curve == "rose":
            a, k = float(p["a"]), float(p.get("k", 3))
            # x = a sin(k t) cos t = a/2 (sin((k+1)t) + sin((k-1)t)); same for y with cos
            out = np.zeros((len(t), 2))
            for m, sx, sy in ((k + 1, 1.0, -1.0), (k - 1, 1.0, 1.0)):
                ph = m * t + order * math.pi / 2
                out[:, 0] += sx * 0.5 * a * m**order * np.sin(ph)
                out[:, 1] += sy * 0.5 * a * m**order * np.cos(ph)
            if order == 0:
                out += np.asarray(p["center"], float)
            return out
        if self.curve == "nodal_cubic":
            sc = float(p["scale"])
            if order == 0:
                xy = np.column_stack([t * t - 1.0, t * (t * t - 1.0)])
                return np.asarray(p["origin"], float) + sc * xy
            if order == 1:
                return sc * np.column_stack([2 * t, 3 * t * t - 1.0])
            if order == 2:
                return sc * np.column_stack([np.full_like(t, 2.0), 6 * t])
            if order == 3:
                return sc * np.column_stack([np.zeros_like(t), np.full_like(t, 6.0)])
            return np.zeros((len(t), 2))
        a, b, ang = float(p["a"]), float(p["b"]), float(p.get("angle", 0.0))
        ph = t + order * math.pi / 2
        xy = np.column_stack([a * np.cos(ph), b * np.sin(ph)])
        c, s = math.cos(ang), math.sin(ang)
        out = xy @ np.array([[c, s], [-s, c]])
        if order == 0:
            out += np.asarray(p["center"], float)
        return out

    def point(self, s):
        return self._raw(self._t(s), 0)

    def derivative(self, s, order=1):
        return self._raw(self._t(s), order) * (self.t1 - self.t0) ** order

    def to_dict(self):
        d = {"type": "analytic", "curve": self.curve, "t0": self.t0, "t1": self.t1}
        d.update({k: (list(v) if isinstance(v, (tuple, list, np.ndarray)) else v) for k, v in self.params.items()})
        return d


def geometry_from_dict(d: dict[str, Any], p0, p1, base: Path | None = None) -> EdgeGeometry:
    kind = d.get("type")
    if kind == "segment":
        return Segment(tuple(p0), tuple(p1))
    if kind == "arc":
        return Arc(tuple(d["center"]), float(d["radius"]), float(d["theta0"]), float(d["theta1"]))
    if kind == "polyline":
        if "file" in d:
            path = Path(d["file"])
            if base is not None and not path.is_absolute():
                path = base / path
            pts = np.loadtxt(path, delimiter=",", ndmin=2)
        else:
            pts = np.asarray(d["points"], float)
        return Polyline(pts)
    if kind == "analytic":
        params = {k: v for k, v in d.items() if k not in ("type", "curve", "t0", "t1")}
        return Analytic(d["curve"], params, float(d["t0"]), float(d["t1"]))
    raise ConfigError(f"unknown edge geometry type {kind!r}")


# --------------------------------------------------------------------------
# scene


MarkerSpacing = Callable[[np.ndarray], np.ndarray]


@dataclass
class Scene:
    name: str
    graph: EdgeGraph
    geometries: list[EdgeGeometry]
    phases: list[Phase]
    markers: dict[str, Any] = field(default_factory=lambda: {"rule": "arclength", "spacing": "half_hl"})

    def validate(self) -> None:
        self.graph.validate()
        if len(self.geometries) != len(self.graph.edges):
            raise InvalidGraphError("one geometry per edge is required")
        for e, g in zip(self.graph.edges, self.geometries):
            ends = g.point(np.array([0.0, 1.0]))
            for end, v in zip(ends, (e.source, e.target)):
                if np.hypot(*(end - self.graph.vertices[v].position)) > _ENDPOINT_TOL:
                    raise InvalidGraphError(f"edge {e.name}: geometry does not meet vertex {self.graph.vertices[v].name}")
        check_phases(self.graph, self.phases)

    # -- markers -----------------------------------------------------------

    def sample_edge(self, edge: int, spacing: MarkerSpacing | float, forward: bool = True) -> np.ndarray:
        """Markers on one edge at roughly the requested arc-length spacing.

        ``spacing`` is a constant or a function of the curvature radius. The
        end markers are the exact vertex positions.
        """
        g = self.geometries[edge]
        bps = g.breakpoints()
        s = np.unique(np.concatenate([np.linspace(bps[i], bps[i + 1], 513) for i in range(len(bps) - 1)]))
        pts = g.point(s)
        ds = np.hypot(*np.diff(pts, axis=0).T)
        if callable(spacing):
            mid = 0.5 * (s[:-1] + s[1:])
            with np.errstate(divide="ignore"):
                w = ds / np.asarray(spacing(g.curvature_radius(mid)), float)
        else:
            w = ds / float(spacing)
        tau = np.concatenate([[0.0], np.cumsum(w)])
        n = max(int(math.ceil(tau[-1] - 1e-9)), 1)
        s_mark = np.interp(np.linspace(0.0, tau[-1], n + 1), tau, s)
        out = g.point(s_mark)
        e = self.graph.edges[edge]
        out[0] = self.graph.vertices[e.source].position
        out[-1] = self.graph.vertices[e.target].position
        return out if forward else out[::-1].copy()

    def sample_walk(self, walk: Walk, spacing: MarkerSpacing | float) -> tuple[np.ndarray, np.ndarray]:
        """Concatenate edge markers along ``walk``; returns points and characteristic indices."""
        chunks = []
        char = [0]
        for e, fwd in zip(walk.edges, walk.directions(self.graph)):
            pts = self.sample_edge(e, spacing, fwd)
            chunks.append(pts if not chunks else pts[1:])
            char.append(char[-1] + len(pts) - 1)
        pts = np.vstack(chunks)
        if walk.closed:
            pts[-1] = pts[0]
            char = char[:-1]
        return pts, np.asarray(char, dtype=np.int64)

    # -- serialisation -----------------------------------------------------

    def to_dict(self) -> dict[str, Any]:
        g = self.graph
        vname = [v.name for v in g.vertices]
        ename = [e.name for e in g.edges]
        return {
            "name": self.name,
            "vertices": [{"name": v.name, "position": list(v.position), "kind": v.kind} for v in g.vertices],
            "edges": [
                {"name": e.name, "source": vname[e.source], "target": vname[e.target], "geometry": geo.to_dict()}
                for e, geo in zip(g.edges, self.geometries)
            ],
            "pairing": {vname[v]: [[ename[a], ename[b]] for a, b in prs] for v, prs in sorted(g.pairing.items()) if prs},
            "phases": [
                {
                    "name": ph.name,
                    "components": [
                        [
                            {"sign": c.sign, "edges": [("" if oe.forward else "-") + ename[oe.edge] for oe in c.edges]}
                            for c in comp
                        ]
                        for comp in ph.components
                    ],
                }
                for ph in self.phases
            ],
            "markers": dict(self.markers),
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any], base: Path | None = None) -> "Scene":
        try:
            verts = [Vertex(v["name"], (float(v["position"][0]), float(v["position"][1])), v.get("kind", "junction"))
                     for v in d["vertices"]]
            vidx = {v.name: i for i, v in enumerate(verts)}
            edges, geos = [], []
            for e in d["edges"]:
                s, t = vidx[e["source"]], vidx[e["target"]]
                edges.append(Edge(e["name"], s, t))
                geos.append(geometry_from_dict(e.get("geometry", {"type": "segment"}),
                                               verts[s].position, verts[t].position, base))
            eidx = {e.name: i for i, e in enumerate(edges)}
            pairing = {vidx[v]: [(eidx[a], eidx[b]) for a, b in prs] for v, prs in d.get("pairing", {}).items()}

            def oriented(tok: str) -> OrientedEdge:
                return OrientedEdge(eidx[tok[1:]], False) if tok.startswith("-") else OrientedEdge(eidx[tok], True)

            phases = [
                Phase(p["name"], tuple(tuple(Cycle(tuple(oriented(t) for t in c["edges"]), int(c.get("sign", 1)))
                                             for c in comp) for comp in p["components"]))
                for p in d["phases"]
            ]
        except KeyError as exc:
            raise ConfigError(f"scene file: missing or unknown key {exc}") from exc
        scene = cls(d.get("name", "scene"), EdgeGraph(verts, edges, pairing), geos, phases,
                    d.get("markers", {"rule": "arclength", "spacing": "half_hl"}))
        scene.validate()
        return scene


def load_scene(path: str | Path) -> Scene:
    path = Path(path)
    with open(path) as fh:
        return Scene.from_dict(json.load(fh), base=path.parent)


def dump_scene(scene: Scene, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(scene.to_dict(), fh, indent=2)


# --------------------------------------------------------------------------
# built-in scenes


def _on_circle(c, r, th) -> tuple[float, float]:
    return (c[0] + r * math.cos(th), c[1] + r * math.sin(th))


def _builder(name, verts, edges, geos, pairing, phases, vnames, enames):
    vidx = {n: i for i, n in enumerate(vnames)}
    eidx = {n: i for i, n in enumerate(enames)}
    g = EdgeGraph(
        [Vertex(n, p, k) for n, (p, k) in zip(vnames, verts)],
        [Edge(n, vidx[s], vidx[t]) for n, (s, t) in zip(enames, edges)],
        {vidx[v]: [(eidx[a], eidx[b]) for a, b in prs] for v, prs in pairing.items()},
    )

    def cyc(tokens, sign=1):
        return Cycle(tuple(OrientedEdge(eidx[t.lstrip("-")], not t.startswith("-")) for t in tokens), sign)

    ph = [Phase(n, tuple(tuple(cyc(*c) for c in comp) for comp in comps)) for n, comps in phases]
    scene = Scene(name, g, geos, ph)
    scene.validate()
    return scene


def classic_two_phase_circle(center=(0.5, 0.75), radius=0.15) -> Scene:
    p = _on_circle(center, radius, 0.0)
    return _builder(
        "classic_two_phase_circle",
        [(p, "basepoint")], [("b", "b")], [Arc(center, radius, 0.0, 2 * math.pi)],
        {"b": [("e1", "e1")]},
        [("inside", [[(["e1"],)]]), ("outside", [[(["-e1"], -1)]])],
        ["b"], ["e1"],
    )


def three_phase_disk(center=(0.5, 0.75), radius=0.15) -> Scene:
    left, right = _on_circle(center, radius, math.pi), _on_circle(center, radius, 0.0)
    return _builder(
        "three_phase_disk",
        [(left, "junction"), (right, "junction")],
        [("R", "L"), ("L", "R"), ("L", "R")],
        [Arc(center, radius, 0.0, math.pi), Arc(center, radius, math.pi, 2 * math.pi), Segment(left, right)],
        {"L": [("upper", "lower")], "R": [("upper", "lower")]},
        [("upper", [[(["upper", "diameter"],)]]), ("lower", [[(["lower", "-diameter"],)]]),
         ("outside", [[(["-lower", "-upper"], -1)]])],
        ["L", "R"], ["upper", "lower", "diameter"],
    )


def quartered_disk(center=(0.5, 0.75), radius=0.15) -> Scene:
    """Disk cut by its horizontal and vertical diameters into four phases."""
    tv = [_on_circle(center, radius, k * math.pi / 2) for k in range(4)]
    vnames = ["c"] + [f"t{k}" for k in range(4)]
    enames = [f"a{k}" for k in range(4)] + [f"r{k}" for k in range(4)]
    edges = [(f"t{k}", f"t{(k + 1) % 4}") for k in range(4)] + [("c", f"t{k}") for k in range(4)]
    geos = [Arc(center, radius, k * math.pi / 2, (k + 1) * math.pi / 2) for k in range(4)]
    geos += [Segment(center, tv[k]) for k in range(4)]
    pairing = {f"t{k}": [(f"a{(k - 1) % 4}", f"a{k}")] for k in range(4)}
    pairing["c"] = [("r0", "r2"), ("r1", "r3")]
    phases = [(f"Q{k}", [[([f"r{k}", f"a{k}", f"-r{(k + 1) % 4}"],)]]) for k in range(4)]
    phases.append(("outside", [[([f"-a{k}" for k in (3, 2, 1, 0)], -1)]]))
    verts = [(tuple(center), "junction")] + [(p, "junction") for p in tv]
    return _builder("quartered_disk", verts, edges, geos, pairing, phases, vnames, enames)


def five_phase_disk(center=(0.5, 0.5), radius=0.15) -> Scene:
    """Disk cut into five equal sectors; the center is a degree-5 junction.

    One radius points straight down, so the sectors are mirror images about
    the vertical through the center (a radius pointing up would lie on the
    attracting axis of the four-vortex deformation field and collapse).
    """
    ang = [-math.pi / 2 + 2 * math.pi * k / 5 for k in range(5)]
    tv = [_on_circle(center, radius, a) for a in ang]
    vnames = ["c"] + [f"t{k}" for k in range(5)]
    enames = [f"a{k}" for k in range(5)] + [f"r{k}" for k in range(5)]
    edges = [(f"t{k}", f"t{(k + 1) % 5}") for k in range(5)] + [("c", f"t{k}") for k in range(5)]
    geos = [Arc(center, radius, ang[k], ang[k] + 2 * math.pi / 5) for k in range(5)]
    geos += [Segment(center, tv[k]) for k in range(5)]
    pairing = {f"t{k}": [(f"a{(k - 1) % 5}", f"a{k}")] for k in range(5)}
    phases = [(f"S{k}", [[([f"r{k}", f"a{k}", f"-r{(k + 1) % 5}"],)]]) for k in range(5)]
    phases.append(("outside", [[([f"-a{k}" for k in (4, 3, 2, 1, 0)], -1)]]))
    verts = [(tuple(center), "junction")] + [(p, "junction") for p in tv]
    return _builder("five_phase_disk", verts, edges, geos, pairing, phases, vnames, enames)


def fig41() -> Scene:
    """Eleven vertices, sixteen edges: T junctions, X junctions, a kink, a bubble and a rose.

    Clusters: a disk with an interior T junction (v1, v3, v4, v5), a bubble
    (v2), two rose petals touching at an X junction (v7), and a nodal cubic
    loop crossed by a circle (v6, v8, kink v9).
    """
    # disk with interior T
    c1, r1 = (0.3, 0.7), 0.15
    v1, v4, v5 = (_on_circle(c1, r1, math.radians(a)) for a in (90, 210, 330))
    m = np.add(v1, v4) / 2
    half = math.dist(v1, v4) / 2
    rin = 2 * r1
    nrm = m - np.asarray(c1)
    nrm /= np.hypot(*nrm)
    cin = tuple(m + math.sqrt(rin**2 - half**2) * nrm)
    th1 = math.atan2(v1[1] - cin[1], v1[0] - cin[0])
    th4 = math.atan2(v4[1] - cin[1], v4[0] - cin[0])
    if abs(th4 - th1) > math.pi:
        th4 += 2 * math.pi if th4 < th1 else -2 * math.pi
    th3 = 0.5 * (th1 + th4)
    v3 = _on_circle(cin, rin, th3)
    # bubble
    cb, rb = (0.75, 0.8), 0.08
    v2 = _on_circle(cb, rb, math.pi)
    # rose petals r = a sin 3 theta, theta in [2pi/3, 4pi/3]
    cr, ar = (0.6, 0.3), 0.15
    rose = {"center": list(cr), "a": ar, "k": 3}

    def rose_pt(th):
        r = ar * math.sin(3 * th)
        return (cr[0] + r * math.cos(th), cr[1] + r * math.sin(th))

    v7 = tuple(cr)
    v10, v11 = rose_pt(5 * math.pi / 6), rose_pt(7 * math.pi / 6)
    # nodal cubic loop and crossing circle
    org, sc = (0.5, 0.12), 0.2
    nod = {"origin": list(org), "scale": sc}

    def nod_pt(t):
        return (org[0] + sc * (t * t - 1), org[1] + sc * t * (t * t - 1))

    v6, v8, v9 = nod_pt(-0.5), nod_pt(0.5), nod_pt(1.0)
    c2 = (org[0] - 1.1 * sc, org[1])
    r2 = math.dist(c2, v6)
    al = math.atan2(v6[1] - c2[1], v6[0] - c2[0])

    vnames = [f"v{i}" for i in range(1, 12)]
    pos = {"v1": v1, "v2": v2, "v3": v3, "v4": v4, "v5": v5, "v6": v6, "v7": v7,
           "v8": v8, "v9": v9, "v10": v10, "v11": v11}
    kinds = {"v2": "basepoint", "v9": "nonsmooth", "v10": "basepoint", "v11": "basepoint"}
    verts = [(pos[n], kinds.get(n, "junction")) for n in vnames]
    spec = {
        "e1": (("v6", "v8"), Arc(c2, r2, al, 2 * math.pi - al)),
        "e2": (("v1", "v4"), Arc(c1, r1, math.pi / 2, 7 * math.pi / 6)),
        "e3": (("v1", "v3"), Arc(cin, rin, th1, th3)),
        "e4": (("v5", "v1"), Arc(c1, r1, 11 * math.pi / 6, 5 * math.pi / 2)),
        "e5": (("v3", "v5"), Segment(v3, v5)),
        "e6": (("v3", "v4"), Arc(cin, rin, th3, th4)),
        "e7": (("v4", "v5"), Arc(c1, r1, 7 * math.pi / 6, 11 * math.pi / 6)),
        "e8": (("v2", "v2"), Arc(cb, rb, math.pi, 3 * math.pi)),
        "e9": (("v8", "v6"), Arc(c2, r2, -al, al)),
        "e10": (("v10", "v7"), Analytic("rose", rose, 5 * math.pi / 6, math.pi)),
        "e11": (("v7", "v11"), Analytic("rose", rose, math.pi, 7 * math.pi / 6)),
        "e12": (("v6", "v8"), Analytic("nodal_cubic", nod, -0.5, 0.5)),
        "e13": (("v8", "v9"), Analytic("nodal_cubic", nod, 0.5, 1.0)),
        "e14": (("v9", "v6"), Analytic("nodal_cubic", nod, -1.0, -0.5)),
        "e15": (("v7", "v10"), Analytic("rose", rose, 2 * math.pi / 3, 5 * math.pi / 6)),
        "e16": (("v11", "v7"), Analytic("rose", rose, 7 * math.pi / 6, 4 * math.pi / 3)),
    }
    enames = [f"e{i}" for i in range(1, 17)]
    pairing = {
        "v1": [("e2", "e4")], "v3": [("e3", "e6")], "v4": [("e2", "e7")], "v5": [("e4", "e7")],
        "v6": [("e1", "e9"), ("e12", "e14")], "v7": [("e10", "e11")], "v8": [("e1", "e9"), ("e12", "e13")],
        "v2": [("e8", "e8")], "v10": [("e10", "e15")], "v11": [("e11", "e16")],
    }
    phases = [
        ("P1", [[(["e2", "-e6", "-e3"],)]]),
        ("P2", [[(["e7", "-e5", "e6"],)]]),
        ("P3", [[(["e4", "e3", "e5"],)]]),
        ("P4", [[(["e8"],)]]),
        ("P5", [[(["e15", "e10"],)], [(["e11", "e16"],)]]),
        ("P6", [[(["e12", "e9"],)]]),
        ("P7", [[(["e1", "-e12"],)]]),
        ("P8", [[(["e14", "-e9", "e13"],)]]),
        ("outside", [[(["-e4", "-e7", "-e2"], -1), (["-e8"], -1), (["-e10", "-e15"], -1),
                      (["-e16", "-e11"], -1), (["-e14", "-e13", "-e1"], -1)]]),
    ]
    return _builder("fig41", verts, [spec[e][0] for e in enames], [spec[e][1] for e in enames],
                    pairing, phases, vnames, enames)


BUILTIN_SCENES: dict[str, Callable[..., Scene]] = {
    "quartered_disk": quartered_disk,
    "five_phase_disk": five_phase_disk,
    "three_phase_disk": three_phase_disk,
    "classic_two_phase_circle": classic_two_phase_circle,
    "fig41": fig41,
}


def get_scene(name_or_path: str, **kwargs) -> Scene:
    if name_or_path in BUILTIN_SCENES:
        return BUILTIN_SCENES[name_or_path](**kwargs)
    path = Path(name_or_path)
    if path.exists():
        return load_scene(path)
    raise ConfigError(f"unknown scene {name_or_path!r}; built-ins: {sorted(BUILTIN_SCENES)}")


__all__ = [
    "Analytic",
    "Arc",
    "BUILTIN_SCENES",
    "EdgeGeometry",
    "Polyline",
    "Scene",
    "Segment",
    "classic_two_phase_circle",
    "dump_scene",
    "fig41",
    "five_phase_disk",
    "geometry_from_dict",
    "get_scene",
    "load_scene",
    "quartered_disk",
    "three_phase_disk",
]
