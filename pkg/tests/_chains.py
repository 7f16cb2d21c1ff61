"""Random marker chains and invariant checks shared by the ARMS tests and the acceptance suite."""

import math

import numpy as np

from cubicmars.arms import ArmsParams, adjust_ends, arms_step, is_regular
from cubicmars.flow import DiscreteFlowMap, Vortex, tableau_for_order
from cubicmars.spline import CubicSpline


def identity(p):
    return np.array(p, dtype=float)


def random_open_chain(rng, hl):
    n = int(rng.integers(8, 30))
    amp = rng.uniform(0, 0.2)
    freq = rng.uniform(0.5, 3)
    d = rng.uniform(0.45, 0.75, n) * hl
    x = np.concatenate([[0.0], np.cumsum(d)])
    return np.column_stack([0.2 + x, 0.5 + amp * np.sin(freq * 2 * math.pi * x)])


def random_closed_chain(rng, hl):
    rad = rng.uniform(0.1, 0.3)
    ecc = rng.uniform(0.6, 1.0)
    n = max(int(2 * math.pi * rad / (0.6 * hl)), 8)
    th = np.sort((np.arange(n) + rng.uniform(-0.2, 0.2, n)) * 2 * math.pi / n)
    pts = np.column_stack([0.5 + rad * np.cos(th), 0.5 + ecc * rad * np.sin(th)])
    return np.vstack([pts, pts[:1]])


def random_instance(seed, closed, mapping):
    """A regular chain with characteristic markers and a flow map; None if the draw is not regular."""
    rng = np.random.default_rng(seed)
    r = float(rng.choice([0.05, 0.1]))
    hl = float(rng.uniform(0.02, 0.08))
    pts = random_closed_chain(rng, hl) if closed else random_open_chain(rng, hl)
    body = pts[:-1] if closed else pts
    if not is_regular(body, r, hl, closed):
        return None
    n = len(body)
    inner = np.sort(rng.choice(np.arange(2, n - 2), size=min(2, n - 4), replace=False)) if n > 8 else np.array([], int)
    ends = [[0], inner] if closed else [[0], inner, [n - 1]]
    char = np.unique(np.concatenate(ends)).astype(np.int64)
    if mapping == "identity":
        flow = identity
    else:
        flow = DiscreteFlowMap(Vortex(4.0), tableau_for_order(4), float(rng.uniform(0, 4)), float(rng.uniform(1e-3, 0.03)))
    spline = CubicSpline(pts, "periodic" if closed else "not-a-knot")
    return flow, spline, char, ArmsParams(r, hl)


def check_arms_instance(flow, spline, char, params):
    """Post-step regularity, characteristic permanence and end ratios; returns violated properties."""
    closed = spline.closed
    body = spline.points[:-1] if closed else spline.points
    res = arms_step(flow, spline, char, params)
    out = res.spline.points[:-1] if closed else res.spline.points
    bad = []
    if res.diagnostics.warnings:
        bad.append(f"warnings: {res.diagnostics.warnings}")
    if not is_regular(out, params.r_tiny, params.nominal_hl, closed):
        bad.append("not (r_tiny, h_L)-regular")
    if len(res.char_idx) != len(char) or not np.array_equal(out[res.char_idx], np.atleast_2d(flow(body[char]))):
        bad.append("characteristic markers moved or lost")
    if not closed:
        d = np.hypot(*np.diff(out, axis=0).T)
        if params.r_b_star * d[0] > d[1] * (1 + 1e-12) or params.r_b_star * d[-1] > d[-2] * (1 + 1e-12):
            bad.append("end ratio below r_b*")
    return bad


def random_adjust_ends(seed):
    """Draw a quadratic end curve and valid adjust_ends parameters, or None."""
    rng = np.random.default_rng(seed)
    curv = rng.uniform(-3, 3)
    r = rng.uniform(0.02, 0.15)
    rb = rng.uniform(1.05, 2.9)
    if not (rb < 1 / (2 * r) and r < min(1 / 6, 1 / (2 * rb))):
        return None

    def S(l):
        return np.array([l, curv * l * l])

    full = float(np.hypot(*S(1.0)))
    hl = rng.uniform(0.05, 1.0) * full
    if not full > (1 + rb) * r * hl * 1.01:
        return None
    l0, l1 = (1.0, 0.0) if rng.random() < 0.5 else (0.0, 1.0)
    return S, l0, l1, r, hl, rb


def check_adjust_ends(S, l0, l1, r, hl, rb):
    """Post-conditions (a)-(d) of adjust_ends; returns violated ones."""
    ls, qs = adjust_ends(S, l0, l1, r, hl, rb)
    d = np.hypot(*np.diff(qs, axis=0).T)
    bad = []
    if not (np.all(np.diff(ls) > 0) or np.all(np.diff(ls) < 0)):
        bad.append("(a) preimages not monotone")
    if not (np.array_equal(qs[0], S(l0)) and np.array_equal(qs[-1], S(l1))):
        bad.append("(b) end markers moved")
    if not is_regular(qs, r, hl):
        bad.append("(c) not regular")
    if rb * d[0] > d[1] * (1 + 1e-12):
        bad.append("(d) r_b below r_b*")
    return bad
