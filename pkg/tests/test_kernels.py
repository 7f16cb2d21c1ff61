import os
import subprocess
import sys
import textwrap

import numpy as np
import pytest

SCRIPT = textwrap.dedent(
    """
    import sys
    import numpy as np
    from cubicmars._jit import JIT_ENABLED
    from cubicmars.arms import ArmsParams, _removal_sweep
    from cubicmars.driver import initial_state, run
    from cubicmars.flow import Vortex, tableau_for_order
    from cubicmars.metrics import Grid, tracked_areas
    from cubicmars.scenes import get_scene
    from cubicmars.spline import SplineFunction

    rng = np.random.default_rng(5)
    l = np.concatenate([[0.0], np.cumsum(rng.uniform(0.1, 1.0, 40))])
    v = rng.normal(size=41)
    nak = SplineFunction(l, v, "not-a-knot")
    v[-1] = v[0]
    per = SplineFunction(l, v, "periodic")
    ls = np.linspace(l[0], l[-1], 777)
    p = np.column_stack([np.cumsum(rng.uniform(0, 1, 300)), np.zeros(300)])
    flags = np.zeros(300, dtype=bool)
    flags[::7] = True
    alive, removed, warn = _removal_sweep(p, flags, np.ones(300), 0.3, False)
    state = initial_state(get_scene("quartered_disk"), ArmsParams(0.05, 0.2 / 16))
    state, _ = run(state, Vortex(4.0), tableau_for_order(4), 1 / 128, 0.25)
    areas = tracked_areas(state, Grid.unit(1 / 16)).areas
    np.savez(sys.argv[1], jit=JIT_ENABLED, nak=nak(ls, 1), per=per(ls, 2), alive=alive,
             removed=removed, warn=warn, areas=areas)
    """
)


def _run(tmp_path, disable):
    out = tmp_path / f"{'py' if disable else 'jit'}.npz"
    env = dict(os.environ, CUBICMARS_DISABLE_JIT="1" if disable else "0")
    subprocess.run([sys.executable, "-c", SCRIPT, str(out)], env=env, check=True)
    return np.load(out)


@pytest.fixture(scope="module")
def both(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("kernels")
    return _run(tmp, False), _run(tmp, True)


def test_modes_are_what_they_claim(both):
    jit, py = both
    assert bool(jit["jit"]) and not bool(py["jit"])


@pytest.mark.parametrize("key", ["alive", "removed", "warn"])
def test_removal_sweep_identical(both, key):
    jit, py = both
    assert np.array_equal(jit[key], py[key])


@pytest.mark.parametrize("key", ["nak", "per", "areas"])
def test_numeric_kernels_agree(both, key):
    jit, py = both
    assert np.allclose(jit[key], py[key], rtol=0, atol=1e-13)
