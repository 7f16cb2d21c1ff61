"""Edge graph of an interface, smooth pairings and the circuit/trail partition.

Vertices and edges are indexed by position; the order of ``EdgeGraph.edges``
is the "ascending edge id" order used when seeding walks. A pairing maps a
vertex to unordered edge pairs ``(e, e')`` meaning the interface continues
smoothly from ``e`` to ``e'`` through that vertex. Maximal walks that only
turn at paired vertices become circuits (periodic splines) or trails
(not-a-knot splines).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import AssemblyError, InvalidGraphError

VERTEX_KINDS = ("junction", "nonsmooth", "basepoint")


@dataclass(frozen=True)
class Vertex:
    name: str
    position: tuple[float, float]
    kind: str = "junction"


@dataclass(frozen=True)
class Edge:
    name: str
    source: int
    target: int

    @property
    def is_loop(self) -> bool:
        return self.source == self.target

    def other_end(self, v: int) -> int:
        if v == self.source:
            return self.target
        if v == self.target:
            return self.source
        raise InvalidGraphError(f"edge {self.name} is not incident to vertex {v}")


def _pair_key(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a <= b else (b, a)


@dataclass
class EdgeGraph:
    vertices: list[Vertex]
    edges: list[Edge]
    # pairing[v] is a list of unordered edge pairs at vertex v
    pairing: dict[int, list[tuple[int, int]]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.pairing = {int(v): [_pair_key(int(a), int(b)) for a, b in prs] for v, prs in self.pairing.items()}

    def vertex_index(self, name: str) -> int:
        for i, v in enumerate(self.vertices):
            if v.name == name:
                return i
        raise KeyError(name)

    def edge_index(self, name: str) -> int:
        for i, e in enumerate(self.edges):
            if e.name == name:
                return i
        raise KeyError(name)

    def incident(self, v: int) -> list[int]:
        """Edge ids at ``v``; a self-loop is listed twice."""
        out = []
        for i, e in enumerate(self.edges):
            out.extend([i] * ((e.source == v) + (e.target == v)))
        return out

    def degree(self, v: int) -> int:
        return len(self.incident(v))

    def partner(self, v: int, e: int) -> int | None:
        """Edge paired with ``e`` at ``v``, or None."""
        for a, b in self.pairing.get(v, ()):
            if a == e:
                return b
            if b == e:
                return a
        return None

    def is_paired(self, v: int, a: int, b: int) -> bool:
        return _pair_key(a, b) in self.pairing.get(v, ())

    def validate(self) -> None:
        nv = len(self.vertices)
        for v in self.vertices:
            if v.kind not in VERTEX_KINDS:
                raise InvalidGraphError(f"vertex {v.name}: unknown kind {v.kind!r}")
        for e in self.edges:
            if not (0 <= e.source < nv and 0 <= e.target < nv):
                raise InvalidGraphError(f"edge {e.name} references a missing vertex")
        for v in range(nv):
            if self.degree(v) == 0:
                raise InvalidGraphError(f"vertex {self.vertices[v].name} is isolated")
        for v, prs in self.pairing.items():
            if not 0 <= v < nv:
                raise InvalidGraphError(f"pairing references missing vertex {v}")
            inc = self.incident(v)
            seen: list[int] = []
            for a, b in prs:
                for e in (a, b):
                    if not 0 <= e < len(self.edges) or e not in inc:
                        raise InvalidGraphError(
                            f"pair ({a}, {b}) at vertex {self.vertices[v].name}: edge {e} not incident"
                        )
                if a == b and not self.edges[a].is_loop:
                    raise InvalidGraphError(f"edge {self.edges[a].name} paired with itself but is not a loop")
                seen.extend([a, b] if a != b else [a, a])
            for e in set(seen):
                if seen.count(e) > inc.count(e):
                    raise InvalidGraphError(f"edge {self.edges[e].name} paired twice at {self.vertices[v].name}")
        for i, e in enumerate(self.edges):
            if e.is_loop and not self.is_paired(e.source, i, i):
                raise InvalidGraphError(f"self-loop {e.name} must be paired with itself at its basepoint")


@dataclass(frozen=True)
class Walk:
    """A walk ``u_0 e_1 u_1 ... e_m u_m`` through the edge graph."""

    edges: tuple[int, ...]
    vertices: tuple[int, ...]
    closed: bool

    @property
    def kind(self) -> str:
        return "periodic" if self.closed else "not-a-knot"

    def directions(self, graph: EdgeGraph) -> tuple[bool, ...]:
        """True where edge ``e_k`` is traversed from its source to its target."""
        return tuple(
            graph.edges[e].source == self.vertices[k] and graph.edges[e].target == self.vertices[k + 1]
            for k, e in enumerate(self.edges)
        )

    @property
    def characteristic_vertices(self) -> tuple[int, ...]:
        """Vertices carried as characteristic markers, in walk order.

        A circuit lists ``u_0..u_{m-1}``; its closing point is ``u_0`` again.
        """
        return self.vertices[:-1] if self.closed else self.vertices


@dataclass(frozen=True)
class Partition:
    circuits: tuple[Walk, ...]
    trails: tuple[Walk, ...]

    @property
    def walks(self) -> tuple[Walk, ...]:
        return self.circuits + self.trails


def partition_edge_set(graph: EdgeGraph) -> Partition:
    """Split the edges into maximal smooth walks.

    Seeds are taken in ascending edge id. A walk first grows at its right
    end, then at its left end, while the current end edge is paired with an
    unused edge at the end vertex. It is a circuit when both ends meet at a
    vertex that pairs the first and last edges.
    """
    unused = set(range(len(graph.edges)))
    circuits: list[Walk] = []
    trails: list[Walk] = []
    for seed in range(len(graph.edges)):
        if seed not in unused:
            continue
        unused.discard(seed)
        e = graph.edges[seed]
        edges = [seed]
        verts = [e.source, e.target]
        # right end
        while True:
            nxt = graph.partner(verts[-1], edges[-1])
            if nxt is None or nxt not in unused:
                break
            unused.discard(nxt)
            edges.append(nxt)
            verts.append(graph.edges[nxt].other_end(verts[-1]))
        # left end
        while True:
            prv = graph.partner(verts[0], edges[0])
            if prv is None or prv not in unused:
                break
            unused.discard(prv)
            edges.insert(0, prv)
            verts.insert(0, graph.edges[prv].other_end(verts[0]))
        closed = verts[0] == verts[-1] and graph.is_paired(verts[0], edges[0], edges[-1])
        w = Walk(tuple(edges), tuple(verts), closed)
        (circuits if closed else trails).append(w)
    return Partition(tuple(circuits), tuple(trails))


def check_partition(graph: EdgeGraph, part: Partition) -> None:
    """Raise InvalidGraphError unless ``part`` is a valid maximal smooth partition."""
    used: list[int] = [e for w in part.walks for e in w.edges]
    if sorted(used) != list(range(len(graph.edges))):
        raise InvalidGraphError("walks do not cover every edge exactly once")
    for w in part.walks:
        if len(w.vertices) != len(w.edges) + 1:
            raise InvalidGraphError("walk vertex/edge counts disagree")
        for k, e in enumerate(w.edges):
            ed = graph.edges[e]
            if {ed.source, ed.target} != {w.vertices[k], w.vertices[k + 1]}:
                raise InvalidGraphError(f"edge {ed.name} does not join consecutive walk vertices")
        for k in range(1, len(w.edges)):
            if not graph.is_paired(w.vertices[k], w.edges[k - 1], w.edges[k]):
                raise InvalidGraphError(f"walk turns at unpaired vertex {graph.vertices[w.vertices[k]].name}")
        if w.closed:
            if w.vertices[0] != w.vertices[-1] or not graph.is_paired(w.vertices[0], w.edges[0], w.edges[-1]):
                raise InvalidGraphError("circuit does not close smoothly")
        else:
            for v, end in ((w.vertices[0], w.edges[0]), (w.vertices[-1], w.edges[-1])):
                if graph.partner(v, end) is not None:
                    raise InvalidGraphError(f"trail is not maximal at vertex {graph.vertices[v].name}")


# --------------------------------------------------------------------------
# phases


@dataclass(frozen=True)
class OrientedEdge:
    edge: int
    forward: bool = True


@dataclass(frozen=True)
class Cycle:
    """A closed chain of oriented edges; ``sign`` is +1 if counterclockwise."""

    edges: tuple[OrientedEdge, ...]
    sign: int = 1


@dataclass(frozen=True)
class Phase:
    """A phase: union of components, each bounded by cycles.

    The unbounded phase has a component with only negative cycles.
    """

    name: str
    components: tuple[tuple[Cycle, ...], ...]

    @property
    def cycles(self) -> tuple[Cycle, ...]:
        return tuple(c for comp in self.components for c in comp)


def check_phases(graph: EdgeGraph, phases: Sequence[Phase]) -> None:
    """Every cycle closes, and every edge bounds exactly two phases with opposite orientations."""
    uses: dict[int, list[tuple[int, bool]]] = {i: [] for i in range(len(graph.edges))}
    for pi, ph in enumerate(phases):
        for cyc in ph.cycles:
            if cyc.sign not in (1, -1):
                raise InvalidGraphError(f"phase {ph.name}: cycle sign must be +1 or -1")
            ends = []
            for oe in cyc.edges:
                ed = graph.edges[oe.edge]
                ends.append((ed.source, ed.target) if oe.forward else (ed.target, ed.source))
                uses[oe.edge].append((pi, oe.forward))
            for k in range(len(ends)):
                if ends[k][1] != ends[(k + 1) % len(ends)][0]:
                    raise InvalidGraphError(f"phase {ph.name}: cycle is not closed")
    for e, us in uses.items():
        if len(us) != 2 or us[0][1] == us[1][1] or us[0][0] == us[1][0]:
            raise InvalidGraphError(
                f"edge {graph.edges[e].name} must bound two distinct phases with opposite orientations"
            )


# --------------------------------------------------------------------------
# splines on walks and their restriction to edges


@dataclass(frozen=True)
class EdgePiece:
    """Edge ``edge`` as the parameter range ``[l0, l1]`` of curve ``curve``."""

    edge: int
    curve: int
    l0: float
    l1: float
    forward: bool


def cut_to_edges(
    graph: EdgeGraph, walks: Sequence[Walk], knots: Sequence[np.ndarray], char_idx: Sequence[np.ndarray]
) -> dict[int, EdgePiece]:
    """Restrict each walk's spline to its edges using characteristic markers.

    ``knots[i]`` are the spline knots of walk ``i`` and ``char_idx[i]`` the
    marker indices of its characteristic vertices in walk order.
    """
    pieces: dict[int, EdgePiece] = {}
    for ci, (w, kn, ch) in enumerate(zip(walks, knots, char_idx)):
        ch = np.asarray(ch)
        nchar = len(w.characteristic_vertices)
        if len(ch) != nchar or np.any(np.diff(ch) <= 0):
            raise AssemblyError(f"walk {ci}: characteristic markers inconsistent with the walk")
        bounds = list(ch) + ([len(kn) - 1] if w.closed else [])
        dirs = w.directions(graph)
        for k, e in enumerate(w.edges):
            i0, i1 = int(bounds[k]), int(bounds[k + 1])
            pieces[e] = EdgePiece(e, ci, float(kn[i0]), float(kn[i1]), dirs[k])
    if len(pieces) != len(graph.edges):
        raise AssemblyError("some edges are not covered by any walk")
    return pieces


def check_shared_vertices(
    walks: Sequence[Walk], points: Sequence[np.ndarray], char_idx: Sequence[np.ndarray]
) -> None:
    """Characteristic markers of one vertex must coincide bitwise across walks."""
    pos: dict[int, np.ndarray] = {}
    for w, pts, ch in zip(walks, points, char_idx):
        for v, i in zip(w.characteristic_vertices, ch):
            p = pts[int(i)]
            if v in pos and not np.array_equal(pos[v], p):
                raise AssemblyError(f"vertex {v} has diverging characteristic markers")
            pos.setdefault(v, p)


__all__ = [
    "Cycle",
    "Edge",
    "EdgeGraph",
    "EdgePiece",
    "OrientedEdge",
    "Partition",
    "Phase",
    "Vertex",
    "Walk",
    "check_partition",
    "check_phases",
    "check_shared_vertices",
    "cut_to_edges",
    "partition_edge_set",
]
