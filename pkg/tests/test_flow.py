import math
import sys
from importlib import resources
from pathlib import Path

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubicmars.errors import ConfigError
from cubicmars.flow import (TABLEAU_BY_ORDER, Custom, Deformation, DiscreteFlowMap, Vortex, Zero, load_tableau,
                            make_field, parse_tableau, rk_step, tableau_for_order, velocity)

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tools"))
from _rktrees import residuals  # noqa: E402

ORDERS = sorted(TABLEAU_BY_ORDER)


def _psi_vortex(x, y, t, T):
    return -(1 / math.pi) * math.sin(math.pi * x) ** 2 * math.sin(math.pi * y) ** 2 * math.cos(math.pi * t / T)


def _psi_deformation(x, y, t, T, n=4):
    return -(1 / (n * math.pi)) * math.sin(n * math.pi * (x + 0.5)) * math.cos(n * math.pi * (y + 0.5)) * math.cos(math.pi * t / T)


def _fd_velocity(psi, x, y, eps=1e-6):
    # u = d psi / dy, v = -d psi / dx
    return np.array([(psi(x, y + eps) - psi(x, y - eps)) / (2 * eps), -(psi(x + eps, y) - psi(x - eps, y)) / (2 * eps)])


def test_velocity_examples():
    assert np.allclose(velocity(Vortex(4.0), (0.5, 0.75), 0.0), (1.0, 0.0), atol=1e-15)
    assert np.allclose(velocity(Deformation(2.0), (0.5, 0.5), 0.0), (0.0, 1.0), atol=1e-15)
    pts = np.random.default_rng(0).uniform(size=(20, 2))
    assert np.allclose(Vortex(4.0)(pts, 2.0), 0.0, atol=1e-16)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 0.99), st.floats(0.01, 0.99), st.floats(0.0, 4.0))
def test_fields_follow_stream_functions(x, y, t):
    fv = _fd_velocity(lambda a, b: _psi_vortex(a, b, t, 4.0), x, y)
    assert np.allclose(velocity(Vortex(4.0), (x, y), t), fv, atol=1e-8)
    fd = _fd_velocity(lambda a, b: _psi_deformation(a, b, t, 2.0), x, y)
    assert np.allclose(velocity(Deformation(2.0), (x, y), t), fd, atol=1e-7)


@pytest.mark.parametrize("order", ORDERS)
def test_tableau_consistency(order):
    tab = tableau_for_order(order)
    assert tab.order == order
    assert abs(tab.b.sum() - 1.0) < 1e-15
    assert np.allclose(tab.a.sum(axis=1), tab.c, atol=1e-15)
    assert np.all(np.triu(tab.a) == 0.0)


@pytest.mark.parametrize("order", ORDERS)
def test_tableau_order_conditions(order):
    text = resources.files("cubicmars.tableaus").joinpath(f"{TABLEAU_BY_ORDER[order]}.txt").read_text()
    _, p, _, a, b = parse_tableau(text)
    mpmath.mp.dps = 60
    s = len(b)
    am = [[mpmath.mpf(str(a.get((i, j), 0))) for j in range(s)] for i in range(s)]
    bm = [mpmath.mpf(str(x)) for x in b]
    worst = max(abs(r) for _, r in residuals(am, bm, p, one=mpmath.mpf(1)))
    assert worst <= mpmath.mpf("1e-20")


def test_tableau_errors(tmp_path):
    with pytest.raises(ConfigError):
        tableau_for_order(5)
    with pytest.raises(ConfigError):
        load_tableau("no_such_tableau")
    bad = tmp_path / "bad.txt"
    bad.write_text("name x\norder 2\nstages 2\nc\n0\n")
    with pytest.raises(ConfigError):
        load_tableau(str(bad))


@pytest.mark.parametrize("order", ORDERS)
def test_trivial_fields(order):
    tab = tableau_for_order(order)
    x = np.array([[0.2, 0.3], [0.7, 0.1]])
    assert np.array_equal(rk_step(Zero(), tab, x, 0.0, 0.1), x)
    const = Custom(lambda p, t: np.tile([1.0, 0.0], (len(p), 1)))
    assert np.allclose(rk_step(const, tab, x, 0.0, 0.1), x + [0.1, 0.0], atol=1e-15)


def test_rk4_linear_ode():
    k = 0.1
    lin = Custom(lambda p, t: np.column_stack([p[:, 0], np.zeros(len(p))]))
    out = rk_step(lin, tableau_for_order(4), np.array([[2.0, 1.0]]), 0.0, k)
    assert out[0, 0] == pytest.approx(2.0 * (1 + k + k**2 / 2 + k**3 / 6 + k**4 / 24), rel=1e-15)
    assert out[0, 1] == 1.0


def test_flow_map_shapes_and_errors():
    fm = DiscreteFlowMap(Vortex(4.0), tableau_for_order(4), 0.0, 0.01)
    assert fm(np.array([0.5, 0.75])).shape == (2,)
    assert fm(np.zeros((0, 2))).shape == (0, 2)
    mid = DiscreteFlowMap(Vortex(4.0), tableau_for_order(4), 2.0 - 1e-3, 1e-3)
    p = np.array([[0.4, 0.6]])
    assert np.hypot(*(mid(p) - p)[0]) <= 1e-3 * math.sqrt(2) * 1.0
    with pytest.raises(ConfigError):
        DiscreteFlowMap(Zero(), tableau_for_order(4), 0.0, 0.0)
    with pytest.raises(ConfigError):
        make_field("nope")


@pytest.mark.parametrize("order", ORDERS)
def test_one_step_error_order(order):
    """Forward then backward at mirrored times returns within O(k^(p+1))."""
    tab = tableau_for_order(order)
    f = Vortex(4.0)
    x0 = np.array([[0.5, 0.75], [0.35, 0.6]])
    errs = []
    ks = [0.1, 0.05]
    for k in ks:
        y = rk_step(f, tab, x0, 0.7, k)
        back = rk_step(f, tab, y, 0.7 + k, -k)
        errs.append(np.abs(back - x0).max())
    rate = math.log(errs[0] / errs[1]) / math.log(2)
    assert rate >= order + 0.5


@pytest.mark.parametrize("order", ORDERS)
def test_full_period_returns(order):
    tab = tableau_for_order(order)
    T, k = 4.0, 1 / 64
    x = np.array([[0.5, 0.6], [0.65, 0.75], [0.4, 0.8]])
    y = x.copy()
    for i in range(int(T / k)):
        y = rk_step(Vortex(T), tab, y, i * k, k)
    assert np.abs(y - x).max() < 10 * k**order
