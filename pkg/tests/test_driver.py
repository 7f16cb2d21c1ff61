import math

import numpy as np
import pytest

from cubicmars.arms import ArmsParams, CurvatureBased
from cubicmars.driver import check_assembly, initial_state, phase_boundaries, run, sample_cycles, step
from cubicmars.errors import ConfigError
from cubicmars.flow import Deformation, Vortex, Zero, tableau_for_order
from cubicmars.scenes import BUILTIN_SCENES, get_scene

RK4 = tableau_for_order(4)


@pytest.mark.parametrize("name", sorted(BUILTIN_SCENES))
def test_initial_state_matches_scene(name):
    scene = get_scene(name)
    state = initial_state(scene, ArmsParams(0.05, 0.01))
    check_assembly(state)
    for w, s, ch in zip(state.walks, state.splines, state.char_idx):
        assert s.kind == w.kind
        for v, i in zip(w.characteristic_vertices, ch):
            assert np.array_equal(s.points[i], scene.graph.vertices[v].position)
    assert len(phase_boundaries(state)) == len(scene.phases)


def test_zero_field_keeps_circuits_and_vertices():
    state = initial_state(get_scene("quartered_disk"), ArmsParams(0.05, 0.2 / 32))
    out, _ = run(state, Zero(), RK4, 1 / 64, 0.25)
    assert out.t == 0.25
    for w, a, b, ca, cb in zip(state.walks, state.splines, out.splines, state.char_idx, out.char_idx):
        assert np.array_equal(a.points[ca], b.points[cb])
        if w.closed:
            assert np.array_equal(a.points, b.points)


def test_zero_field_fixed_point_with_gated_ends():
    """With adjust_ends gated at r_b*, one step reaches a state the zero field leaves alone."""
    params = ArmsParams(0.05, 0.2 / 32, r_b_trigger=1.5)
    s1, _ = run(initial_state(get_scene("quartered_disk"), params), Zero(), RK4, 1 / 64, 1 / 64)
    s2, diag = run(s1, Zero(), RK4, 1 / 64, 1 / 64 + 0.25)
    for a, b in zip(s1.splines, s2.splines):
        assert np.array_equal(a.points, b.points)
    assert diag.total_removed == 0 and diag.total_added == 0


def test_zero_duration_is_identity():
    state = initial_state(get_scene("quartered_disk"), ArmsParams(0.05, 0.01))
    out, diag = run(state, Vortex(4.0), RK4, 0.01, 0.0)
    assert out is state and diag.steps == []
    with pytest.raises(ConfigError):
        run(state, Vortex(4.0), RK4, 0.01, 0.015)


def test_reversal_instant_displacement_bound():
    k = 1e-3
    state = initial_state(get_scene("quartered_disk"), ArmsParams(0.05, 0.01), t0=2.0 - k)
    out, _ = step(state, Vortex(4.0), RK4, k)
    umax = math.sqrt(2.0)
    for a, b in zip(state.vertex_positions().values(), out.vertex_positions().values()):
        assert np.hypot(*(a - b)) <= k * umax


def test_every_snapshot_assembles():
    scene = get_scene("fig41")
    state = initial_state(scene, ArmsParams(0.05, 0.004))
    seen = []

    def cb(st, diags):
        check_assembly(st)
        st.edge_pieces()
        seen.append(st.step_index)

    run(state, Vortex(2.0), RK4, 1 / 64, 0.25, cb)
    assert seen == list(range(1, 17))


def test_shared_vertices_stay_bitwise_identical():
    state = initial_state(get_scene("five_phase_disk"), ArmsParams(0.05, 0.01))
    out, _ = run(state, Deformation(2.0), RK4, 1 / 128, 0.25)
    out.edge_pieces()


def test_full_vortex_period_returns():
    h = 1 / 16
    scene = get_scene("classic_two_phase_circle")
    state = initial_state(scene, ArmsParams(0.05, 0.2 * h))
    out, _ = run(state, Vortex(1.0), RK4, h / 8, 1.0)
    start = sample_cycles(state)[0][0]
    end = sample_cycles(out)[0][0]

    def dist(p):
        return np.abs(np.hypot(p[:, 0] - 0.5, p[:, 1] - 0.75) - 0.15).max()

    assert dist(start) < 1e-8
    assert dist(end) < 1e-7


def test_deformation_length_rises_then_falls():
    h = 1 / 16
    rule = CurvatureBased(0.2 * h, 1e-5, 1.0, 0.1)
    state = initial_state(get_scene("five_phase_disk"), ArmsParams(0.05, rule))
    lengths = []
    run(state, Deformation(2.0), RK4, h / 8, 2.0, lambda st, d: lengths.append(sum(x.length for x in d)))
    lengths = np.array(lengths)
    n = len(lengths)
    peak = int(np.argmax(lengths))
    assert n // 4 < peak < 3 * n // 4
    assert lengths[peak] > 1.2 * lengths[0]
    assert abs(lengths[-1] - lengths[0]) < 0.01 * lengths[0]
