"""Multiphase time loop: advance every fitted spline with ARMS, keep topology fixed."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .arms import ArmsDiagnostics, ArmsParams, arms_step
from .errors import AssemblyError, ConfigError
from .flow import ButcherTableau, DiscreteFlowMap, VelocityField
from .scenes import Scene
from .spline import CubicSpline
from .topology import EdgePiece, Partition, check_shared_vertices, cut_to_edges, partition_edge_set

log = logging.getLogger(__name__)


@dataclass
class TrackedState:
    """Splines on the circuits/trails of a fixed scene at time ``t``."""

    t: float
    scene: Scene
    partition: Partition
    splines: list[CubicSpline]
    char_idx: list[np.ndarray]
    params: ArmsParams
    step_index: int = 0

    @property
    def walks(self):
        return self.partition.walks

    def vertex_positions(self) -> dict[int, np.ndarray]:
        pos: dict[int, np.ndarray] = {}
        for w, s, ch in zip(self.walks, self.splines, self.char_idx):
            for v, i in zip(w.characteristic_vertices, ch):
                pos.setdefault(v, s.points[int(i)])
        return pos

    def edge_pieces(self) -> dict[int, EdgePiece]:
        """Each graph edge as a parameter range of one spline (the snapshot assembly)."""
        check_shared_vertices(self.walks, [s.points for s in self.splines], self.char_idx)
        return cut_to_edges(self.scene.graph, self.walks, [s.knots for s in self.splines], self.char_idx)

    def n_markers(self) -> int:
        return sum(s.n_intervals + (0 if s.closed else 1) for s in self.splines)


def initial_state(scene: Scene, params: ArmsParams, t0: float = 0.0, spacing: float | None = None) -> TrackedState:
    """Seed markers by arc length and fit one spline per circuit or trail.

    Default spacing is ``h_L / 2`` (constant rule) or ``h_L(rho) / 2`` (curvature rule).
    """
    part = partition_edge_set(scene.graph)
    if spacing is not None:
        sp: float | Callable = float(spacing)
    elif params.curvature_based:
        sp = lambda rho: 0.5 * params.hl_of(rho)  # noqa: E731
    else:
        sp = 0.5 * params.nominal_hl
    splines, chars = [], []
    for w in part.walks:
        pts, ch = scene.sample_walk(w, sp)
        if len(pts) < 4:
            # too few markers for a cubic spline: refine uniformly on this walk
            pts, ch = scene.sample_walk(w, _spacing_for_min_markers(scene, w, 4))
        splines.append(CubicSpline(pts, w.kind))
        chars.append(ch)
    state = TrackedState(t0, scene, part, splines, chars, params)
    state.edge_pieces()
    return state


def _spacing_for_min_markers(scene: Scene, walk, n: int) -> float:
    total = 0.0
    for e in walk.edges:
        pts = scene.geometries[e].point(np.linspace(0, 1, 257))
        total += float(np.hypot(*np.diff(pts, axis=0).T).sum())
    return total / (n + 1)


def step(state: TrackedState, field: VelocityField, tableau: ButcherTableau, k: float) -> tuple[TrackedState, list[ArmsDiagnostics]]:
    """One MARS step of size ``k``.

    Vertex images are computed once and shared, so characteristic markers of
    one vertex stay bitwise identical in every spline.
    """
    flow = DiscreteFlowMap(field, tableau, state.t, k)
    pos = state.vertex_positions()
    vids = sorted(pos)
    images = dict(zip(vids, np.atleast_2d(flow(np.array([pos[v] for v in vids])))))
    new_splines, new_chars, diags = [], [], []
    for w, s, ch in zip(state.walks, state.splines, state.char_idx):
        cimg = np.array([images[v] for v in w.characteristic_vertices])
        res = arms_step(flow, s, ch, state.params, cimg)
        for msg in res.diagnostics.warnings:
            log.warning("t=%.6g: %s", state.t, msg)
        new_splines.append(res.spline)
        new_chars.append(res.char_idx)
        diags.append(res.diagnostics)
    new = replace(state, t=state.t + k, splines=new_splines, char_idx=new_chars, step_index=state.step_index + 1)
    return new, diags


@dataclass
class RunDiagnostics:
    steps: list[list[ArmsDiagnostics]] = field(default_factory=list)
    times: list[float] = field(default_factory=list)

    @property
    def total_added(self) -> int:
        return sum(d.n_added for s in self.steps for d in s)

    @property
    def total_removed(self) -> int:
        return sum(d.n_removed for s in self.steps for d in s)


def run(state: TrackedState, field: VelocityField, tableau: ButcherTableau, k: float, t_end: float,
        callback: Callable[[TrackedState, list[ArmsDiagnostics]], None] | None = None
        ) -> tuple[TrackedState, RunDiagnostics]:
    """Step from ``state.t`` to ``t_end``; the number of steps is ``round((t_end - t)/k)``."""
    n = int(round((t_end - state.t) / k))
    if n < 0 or not math.isclose(state.t + n * k, t_end, rel_tol=1e-9, abs_tol=1e-12):
        raise ConfigError("t_end - t must be a non-negative multiple of k")
    t0 = state.t
    diag = RunDiagnostics()
    for i in range(n):
        state, d = step(state, field, tableau, k)
        # avoid drift of the clock from repeated additions
        state.t = t0 + (i + 1) * k
        diag.steps.append(d)
        diag.times.append(state.t)
        if callback is not None:
            callback(state, d)
    return state, diag


def phase_boundaries(state: TrackedState) -> list[list[list[tuple[CubicSpline, float, float]]]]:
    """For each phase and cycle, the oriented spline ranges ``(spline, l_start, l_end)``.

    A range with ``l_end < l_start`` is traversed backwards.
    """
    pieces = state.edge_pieces()
    out = []
    for ph in state.scene.phases:
        cyc_out = []
        for cyc in ph.cycles:
            segs = []
            for oe in cyc.edges:
                pc = pieces[oe.edge]
                fwd = pc.forward == oe.forward
                a, b = (pc.l0, pc.l1) if fwd else (pc.l1, pc.l0)
                segs.append((state.splines[pc.curve], a, b))
            cyc_out.append(segs)
        out.append(cyc_out)
    return out


def sample_cycles(state: TrackedState, per_interval: int = 8) -> list[list[np.ndarray]]:
    """Closed polylines sampled from the splines for every phase cycle."""
    out = []
    for cycles in phase_boundaries(state):
        polys = []
        for segs in cycles:
            chunks = []
            for s, a, b in segs:
                kn = s.knots
                lo, hi = min(a, b), max(a, b)
                inner = kn[(kn > lo) & (kn < hi)]
                brk = np.concatenate([[lo], inner, [hi]])
                t = np.linspace(0, 1, per_interval, endpoint=False)
                ls = np.concatenate([(brk[:-1, None] + np.diff(brk)[:, None] * t).ravel(), [hi]])
                pts = s(ls)
                chunks.append(pts if a <= b else pts[::-1])
            poly = np.vstack([c[:-1] for c in chunks])
            polys.append(poly)
        out.append(polys)
    return out


def check_assembly(state: TrackedState) -> None:
    """Raise AssemblyError if the snapshot is not a consistent set of closed cycles."""
    for cycles in phase_boundaries(state):
        for segs in cycles:
            for (s0, a0, b0), (s1, a1, b1) in zip(segs, segs[1:] + segs[:1]):
                e = s0(b0, side="left" if b0 > a0 else "right")
                st = s1(a1, side="right" if b1 > a1 else "left")
                if not np.allclose(e, st, rtol=0, atol=1e-12):
                    raise AssemblyError("cycle does not close at a vertex")


__all__ = [
    "RunDiagnostics",
    "TrackedState",
    "check_assembly",
    "initial_state",
    "phase_boundaries",
    "run",
    "sample_cycles",
    "step",
]
