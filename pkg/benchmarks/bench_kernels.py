"""Time the numba kernels against the interpreted fallback.

Each mode runs in its own interpreter because the JIT switch is read at
import time. Usage::

    python benchmarks/bench_kernels.py            # both modes, table on stdout
    python benchmarks/bench_kernels.py --repeat 5
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def workloads():
    from cubicmars.arms import _removal_sweep
    from cubicmars.flow import Vortex
    from cubicmars.metrics import Grid, spline_range_integrals
    from cubicmars.spline import CubicSpline

    rng = np.random.default_rng(0)
    th = np.linspace(0.0, 2 * np.pi, 4001)
    rad = 0.15 * (1 + 0.2 * np.sin(5 * th))
    pts = np.column_stack([0.5 + rad * np.cos(th), 0.5 + rad * np.sin(th)])
    pts[-1] = pts[0]
    spline = CubicSpline(pts, "periodic")
    ls = rng.uniform(*spline.domain, 20_000)
    grid = Grid.unit(1 / 64)

    n = 20_000
    chain = np.column_stack([np.cumsum(rng.uniform(0.0, 1.0, n)), np.zeros(n)])
    flags = np.zeros(n, dtype=bool)
    flags[::50] = True
    hl = np.ones(n)
    field = Vortex(4.0)
    cloud = rng.uniform(size=(200_000, 2))

    return {
        "spline_fit_4000": lambda: CubicSpline(pts, "periodic"),
        "spline_eval_20000": lambda: spline(ls),
        "cell_integrals_4000": lambda: spline_range_integrals(grid, spline, *spline.domain),
        "removal_sweep_20000": lambda: _removal_sweep(chain, flags, hl, 0.3, False),
        "vortex_200000": lambda: field(cloud, 0.3),
    }


def child(repeat: int) -> None:
    from cubicmars._jit import JIT_ENABLED

    out = {"jit": JIT_ENABLED}
    for name, fn in workloads().items():
        fn()  # warm-up; includes compilation when the JIT is on
        best = float("inf")
        for _ in range(repeat):
            t0 = time.perf_counter()
            fn()
            best = min(best, time.perf_counter() - t0)
        out[name] = best
    print(json.dumps(out))


def run_mode(disable: bool, repeat: int) -> dict:
    env = dict(os.environ, CUBICMARS_DISABLE_JIT="1" if disable else "0")
    proc = subprocess.run([sys.executable, __file__, "--child", "--repeat", str(repeat)],
                          env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.child:
        child(args.repeat)
        return
    jit = run_mode(False, args.repeat)
    py = run_mode(True, args.repeat)
    print(f"{'kernel':<22}{'numba [s]':>12}{'python [s]':>12}{'speed-up':>10}")
    for name in jit:
        if name == "jit":
            continue
        print(f"{name:<22}{jit[name]:>12.5f}{py[name]:>12.5f}{py[name] / jit[name]:>9.1f}x")


if __name__ == "__main__":
    main()
