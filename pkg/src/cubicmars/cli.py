"""Command-line front end: run one benchmark, sweep grids, emit CSV and SVG.

CSV schemas (floats at 17 significant digits):

* ``errors.csv``: ``h, <phase>..., total`` with one row per grid.
* ``rates.csv``: ``h_coarse, h_fine, <phase>..., total`` with one row per consecutive grid pair.
* ``diagnostics.csv``: ``h, step, t, n_added, n_removed, n_markers, length, mu_variation``,
  summed over all splines of a step.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from .arms import SIGMAS, ArmsParams, CurvatureBased
from .driver import TrackedState, initial_state, run
from .errors import ConfigError, CubicMarsError
from .flow import TABLEAU_BY_ORDER, Zero, make_field, tableau_for_order
from .metrics import (ErrorReport, Grid, PhaseAreaField, cell_areas, convergence_rates, it_error,
                      reference_areas, sample_boundary, tracked_areas)
from .scenes import BUILTIN_SCENES, get_scene

log = logging.getLogger("cubicmars")

FIELD_NAMES = ("vortex", "deformation", "zero")
MEASURES = ("exact", "polygon")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


# --------------------------------------------------------------------------
# configuration


@dataclass(frozen=True)
class HlRule:
    """``h_L = c h^alpha``; with ``curvature`` set, that value is ``h_L^c`` of the curvature rule."""

    c: float = 0.2
    alpha: float = 1.0
    curvature: bool = False
    rho_min: float = 1e-5
    rho_max: float = 0.2
    r_min: float = 0.01
    sigma: str = "linear"

    def value(self, h: float) -> float:
        return self.c * h ** self.alpha

    def spec(self, h: float) -> float | CurvatureBased:
        v = self.value(h)
        if not self.curvature:
            return v
        return CurvatureBased(v, self.rho_min, self.rho_max, self.r_min, self.sigma)


@dataclass(frozen=True)
class RunConfig:
    scene: str = "quartered_disk"
    field: str = "vortex"
    T: float = 4.0
    order: int = 4
    h: tuple[float, ...] = (1 / 32,)
    hl: HlRule = HlRule()
    r_tiny: float = 0.05
    k: float = 0.125
    out: str = "out"
    snapshots: tuple[float, ...] = ()
    max_spacing: float | None = None
    measure: str = "exact"

    def validate(self) -> None:
        if self.field not in FIELD_NAMES:
            raise ConfigError(f"field: unknown velocity field {self.field!r}; choose from {FIELD_NAMES}")
        if self.order not in TABLEAU_BY_ORDER:
            raise ConfigError(f"order: must be one of {sorted(TABLEAU_BY_ORDER)}")
        if not (self.T > 0 and math.isfinite(self.T)):
            raise ConfigError("T: must be positive")
        if not self.h:
            raise ConfigError("h: at least one grid size is required")
        for h in self.h:
            n = round(1 / h) if h > 0 else 0
            if n < 1 or not math.isclose(n * h, 1.0, rel_tol=1e-12):
                raise ConfigError(f"h: 1/h must be a positive integer, got {h}")
        if not self.k > 0:
            raise ConfigError("k: must be positive")
        for h in self.h:
            steps = self.T / (self.k * h)
            if not math.isclose(steps, round(steps), rel_tol=1e-9):
                raise ConfigError(f"k: T must be a whole number of steps k = {self.k} h for h = {h}")
        if not (self.hl.c > 0 and self.hl.alpha > 0):
            raise ConfigError("hl: coefficient and exponent must be positive")
        if self.hl.sigma not in SIGMAS:
            raise ConfigError(f"hl: unknown sigma {self.hl.sigma!r}")
        if self.measure not in MEASURES:
            raise ConfigError(f"measure: choose from {MEASURES}")
        if self.max_spacing is not None and not self.max_spacing > 0:
            raise ConfigError("max_spacing: must be positive")
        if any(not 0 <= t <= self.T for t in self.snapshots):
            raise ConfigError("snapshots: instants must lie in [0, T]")
        try:
            for h in self.h:
                ArmsParams(self.r_tiny, self.hl.spec(h)).check_adjust_ends()
        except CubicMarsError as exc:
            raise ConfigError(f"hl/r_tiny: {exc}") from exc
        try:
            get_scene(self.scene)
        except (CubicMarsError, OSError, KeyError, ValueError) as exc:
            raise ConfigError(f"scene: {exc}") from exc

    def arms_params(self, h: float) -> ArmsParams:
        return ArmsParams(self.r_tiny, self.hl.spec(h))

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["h"] = list(self.h)
        d["snapshots"] = list(self.snapshots)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        d = dict(d)
        unknown = set(d) - {f.name for f in dataclasses.fields(cls)}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "hl" in d:
            hl = dict(d["hl"])
            bad = set(hl) - {f.name for f in dataclasses.fields(HlRule)}
            if bad:
                raise ConfigError(f"hl: unknown keys {sorted(bad)}")
            d["hl"] = HlRule(**hl)
        for key in ("h", "snapshots"):
            if key in d:
                d[key] = tuple(float(x) for x in d[key])
        return cls(**d)

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def loads(cls, text: str) -> "RunConfig":
        return cls.from_dict(json.loads(text))


def _vortex(T: float, curvature: bool, r_min: float = 0.01) -> RunConfig:
    if curvature:
        return RunConfig(T=T, r_tiny=0.1, hl=HlRule(0.2, 1.0, True, 1e-5, 0.2, r_min))
    return RunConfig(T=T, r_tiny=0.05)


def _deformation(T: float, r_min: float) -> RunConfig:
    return RunConfig(scene="five_phase_disk", field="deformation", T=T, r_tiny=0.05,
                     hl=HlRule(0.2, 1.0, True, 1e-5, 1.0, r_min))


PRESETS: dict[str, RunConfig] = {
    "vortex_T4": _vortex(4.0, False),
    "vortex_T8": _vortex(8.0, False),
    "vortex_T12": _vortex(12.0, True, 0.01),
    "vortex_T16": _vortex(16.0, True, 0.005),
    "deformation_T2": _deformation(2.0, 0.1),
    "deformation_T4": _deformation(4.0, 0.05),
    "identity": RunConfig(field="zero", T=1.0, h=(1 / 32,)),
    "convergence": dataclasses.replace(_vortex(4.0, False), h=(1 / 16, 1 / 32, 1 / 64)),
}


# --------------------------------------------------------------------------
# argument parsing helpers


def parse_number(text: str) -> float:
    """``0.03125``, ``1/32`` or ``2^-5``."""
    s = text.strip().replace(" ", "")
    try:
        if "^" in s:
            base, exp = s.split("^", 1)
            return float(Fraction(base)) ** float(Fraction(exp))
        return float(Fraction(s))
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"not a number: {text!r}") from exc


def parse_h_multiple(text: str) -> tuple[float, float]:
    """Parse ``c h^a`` forms: ``0.2h``, ``h/8``, ``0.8h^1.5``, ``0.2*h^(3/2)``. Returns ``(c, a)``."""
    s = text.strip().replace(" ", "").replace("*", "").replace("(", "").replace(")", "")
    if "h" not in s:
        raise ConfigError(f"expected a multiple of h, got {text!r}")
    head, tail = s.split("h", 1)
    c = parse_number(head) if head else 1.0
    alpha = 1.0
    if tail.startswith("^"):
        rest = tail[1:]
        stop = rest.find("/") if rest.count("/") > 1 else len(rest)
        alpha = parse_number(rest[:stop])
        tail = rest[stop:]
    if tail.startswith("/"):
        c /= parse_number(tail[1:])
    elif tail:
        raise ConfigError(f"cannot parse {text!r}")
    return c, alpha


# --------------------------------------------------------------------------
# SVG


PALETTE = ("#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00", "#a65628", "#f781bf", "#999999",
           "#66c2a5", "#fc8d62", "#8da0cb", "#e78ac3")


def emit_svg(polygons: Sequence[Sequence[np.ndarray]], path: str | Path, grid: Grid | None = None,
             bounded: Sequence[bool] | None = None, size: int = 512) -> None:
    """Write one closed path per cycle, coloured by phase; unbounded phases are omitted."""
    lines = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 1 1">',
             '<g transform="matrix(1 0 0 -1 0 1)">']
    if grid is not None:
        lines.append('<g stroke="#dddddd" stroke-width="0.001" fill="none">')
        for i in range(grid.nx + 1):
            x = grid.x0 + i * grid.h
            lines.append(f'<line x1="{x:.6f}" y1="{grid.y0:.6f}" x2="{x:.6f}" y2="{grid.y0 + grid.ny * grid.h:.6f}"/>')
        for j in range(grid.ny + 1):
            y = grid.y0 + j * grid.h
            lines.append(f'<line x1="{grid.x0:.6f}" y1="{y:.6f}" x2="{grid.x0 + grid.nx * grid.h:.6f}" y2="{y:.6f}"/>')
        lines.append("</g>")
    for k, polys in enumerate(polygons):
        if bounded is not None and not bounded[k]:
            continue
        colour = PALETTE[k % len(PALETTE)]
        for poly in polys:
            pts = " L".join(f"{x:.6f},{y:.6f}" for x, y in np.asarray(poly))
            lines.append(f'<path d="M{pts} Z" fill="{colour}" fill-opacity="0.6" stroke="black" stroke-width="0.0015"/>')
    lines += ["</g>", "</svg>", ""]
    Path(path).write_text("\n".join(lines))


def _bounded_flags(scene) -> list[bool]:
    return [not any(all(c.sign < 0 for c in comp) for comp in ph.components) for ph in scene.phases]


# --------------------------------------------------------------------------
# running


def measure(state: TrackedState, grid: Grid, method: str = "exact", max_spacing: float | None = None) -> PhaseAreaField:
    if method == "exact":
        return tracked_areas(state, grid)
    sp = max_spacing if max_spacing is not None else min(grid.h / 8, state.params.nominal_hl / 4)
    return cell_areas(grid, sample_boundary(state, sp), state.scene.phases)


@dataclass
class GridResult:
    h: float
    report: ErrorReport
    diagnostics: list[tuple] = field(default_factory=list)
    n_removed: int = 0


def run_grid(cfg: RunConfig, h: float, out: Path | None = None) -> GridResult:
    scene = get_scene(cfg.scene)
    grid = Grid.unit(h)
    params = cfg.arms_params(h)
    vf = Zero() if cfg.field == "zero" else make_field(cfg.field, cfg.T)
    tab = tableau_for_order(cfg.order)
    k = cfg.k * h
    state = initial_state(scene, params)
    n_steps = int(round(cfg.T / k))
    snap_steps = {int(round(t / k)): t for t in cfg.snapshots}
    bounded = _bounded_flags(scene)
    rows: list[tuple] = []

    def snapshot(st: TrackedState, t: float) -> None:
        if out is not None:
            polys = sample_boundary(st, min(h / 8, params.nominal_hl / 4))
            emit_svg(polys, out / f"snapshot_h{round(1 / h)}_t{_fmt(t)}.svg", grid, bounded)

    if 0 in snap_steps:
        snapshot(state, snap_steps[0])

    def callback(st: TrackedState, diags) -> None:
        rows.append((st.step_index, st.t, sum(d.n_added for d in diags), sum(d.n_removed for d in diags),
                     sum(d.n_markers for d in diags), sum(d.length for d in diags), sum(d.mu_variation for d in diags)))
        if st.step_index in snap_steps:
            snapshot(st, snap_steps[st.step_index])

    state, diag = run(state, vf, tab, k, cfg.T, callback)
    log.info("h=1/%d: %d steps, %d markers added, %d removed", round(1 / h), n_steps, diag.total_added, diag.total_removed)
    report = it_error(reference_areas(scene, grid), measure(state, grid, cfg.measure, cfg.max_spacing))
    report.params = {"r_tiny": cfg.r_tiny, "h_L": cfg.hl.value(h), "k": k}
    return GridResult(h, report, rows, diag.total_removed)


def run_benchmark(cfg: RunConfig) -> list[GridResult]:
    """Run every grid of ``cfg`` and write errors.csv, rates.csv, diagnostics.csv and snapshots."""
    cfg.validate()
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.json").write_text(cfg.dumps())
    results = [run_grid(cfg, h, out) for h in cfg.h]
    names = results[0].report.names
    with open(out / "errors.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["h", *names, "total"])
        for r in results:
            w.writerow([_fmt(r.h), *map(_fmt, r.report.errors), _fmt(r.report.total)])
    with open(out / "rates.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["h_coarse", "h_fine", *names, "total"])
        for a, b in zip(results[:-1], results[1:]):
            per = [convergence_rates([(a.h, ea), (b.h, eb)])[0] for ea, eb in zip(a.report.errors, b.report.errors)]
            tot = convergence_rates([(a.h, a.report.total), (b.h, b.report.total)])[0]
            w.writerow([_fmt(a.h), _fmt(b.h), *map(_fmt, per), _fmt(tot)])
    with open(out / "diagnostics.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["h", "step", "t", "n_added", "n_removed", "n_markers", "length", "mu_variation"])
        for r in results:
            for step_i, t, na, nr, nm, length, mu in r.diagnostics:
                w.writerow([_fmt(r.h), step_i, _fmt(t), na, nr, nm, _fmt(length), _fmt(mu)])
    return results


# --------------------------------------------------------------------------
# argparse


def _add_run_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--preset", choices=sorted(PRESETS), help="start from a named parameter set")
    p.add_argument("--config", help="JSON config file (as written to config.json)")
    p.add_argument("--scene", help=f"built-in scene {sorted(BUILTIN_SCENES)} or a scene file path")
    p.add_argument("--field", choices=FIELD_NAMES)
    p.add_argument("--T", type=parse_number, help="period of the velocity field (and run length)")
    p.add_argument("--order", type=int, choices=sorted(TABLEAU_BY_ORDER), help="Runge-Kutta order")
    p.add_argument("--hl", help="maximum chord length as a multiple of h, e.g. 0.2h or 0.8h^1.5")
    p.add_argument("--curvature", action="store_true", default=None, help="use the curvature-based h_L rule")
    p.add_argument("--rho-min", type=float)
    p.add_argument("--rho-max", type=float)
    p.add_argument("--r-min", type=float)
    p.add_argument("--sigma", choices=sorted(SIGMAS))
    p.add_argument("--rtiny", type=float, help="lower chord bound as a fraction of h_L")
    p.add_argument("--k", help="time step as a multiple of h, e.g. h/8")
    p.add_argument("--out", help="output directory")
    p.add_argument("--snapshot", action="append", help="time instant for an SVG snapshot (repeatable)")
    p.add_argument("--max-spacing", type=float, help="boundary sampling spacing for --measure polygon")
    p.add_argument("--measure", choices=MEASURES, help="exact cell integration or sampled polygons")


def config_from_args(args: argparse.Namespace, hs: tuple[float, ...] | None) -> RunConfig:
    cfg = RunConfig()
    if args.preset:
        cfg = PRESETS[args.preset]
    if args.config:
        cfg = RunConfig.loads(Path(args.config).read_text())
    upd: dict = {}
    for name, key in (("scene", "scene"), ("field", "field"), ("T", "T"), ("order", "order"), ("rtiny", "r_tiny"),
                      ("out", "out"), ("max_spacing", "max_spacing"), ("measure", "measure")):
        v = getattr(args, name)
        if v is not None:
            upd[key] = v
    if hs is not None:
        upd["h"] = hs
    if args.k is not None:
        c, a = parse_h_multiple(args.k)
        if a != 1.0:
            raise ConfigError("k: must be a plain multiple of h")
        upd["k"] = c
    if args.snapshot:
        upd["snapshots"] = tuple(parse_number(s) for s in args.snapshot)
    hl = cfg.hl
    hl_upd: dict = {}
    if args.hl is not None:
        hl_upd["c"], hl_upd["alpha"] = parse_h_multiple(args.hl)
    for name, key in (("curvature", "curvature"), ("rho_min", "rho_min"), ("rho_max", "rho_max"),
                      ("r_min", "r_min"), ("sigma", "sigma")):
        v = getattr(args, name)
        if v is not None:
            hl_upd[key] = v
    if hl_upd:
        upd["hl"] = dataclasses.replace(hl, **hl_upd)
    return dataclasses.replace(cfg, **upd)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cubicmars", description="Multiphase cubic MARS interface tracking benchmarks.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run one grid size")
    p_run.add_argument("--h", help="grid size, e.g. 1/32")
    _add_run_args(p_run)
    p_sweep = sub.add_parser("sweep", help="run a sequence of grid sizes and report convergence rates")
    p_sweep.add_argument("--h", help="comma-separated grid sizes, e.g. 1/16,1/32,1/64")
    _add_run_args(p_sweep)
    sub.add_parser("list", help="list presets and built-in scenes")
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if args.command == "list":
        print("presets:", ", ".join(sorted(PRESETS)))
        print("scenes:", ", ".join(sorted(BUILTIN_SCENES)))
        return 0
    try:
        hs = None
        if args.h is not None:
            hs = tuple(parse_number(x) for x in args.h.split(","))
            if args.command == "run" and len(hs) != 1:
                raise ConfigError("h: `run` takes a single grid size; use `sweep` for several")
        cfg = config_from_args(args, hs)
        if args.command == "run" and len(cfg.h) != 1:
            cfg = dataclasses.replace(cfg, h=cfg.h[-1:])
        results = run_benchmark(cfg)
    except CubicMarsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    for r in results:
        print(f"h=1/{round(1 / r.h)}  total IT error {_fmt(r.report.total)}")
    if len(results) > 1:
        rates = convergence_rates([(r.h, r.report.total) for r in results])
        print("rates:", " ".join(f"{x:.3f}" for x in rates))
    print(f"wrote {Path(cfg.out).resolve()}")
    return 0


__all__ = [
    "HlRule",
    "PRESETS",
    "RunConfig",
    "emit_svg",
    "main",
    "measure",
    "parse_h_multiple",
    "parse_number",
    "run_benchmark",
    "run_grid",
]
