import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cubicmars.errors import DegenerateChordError, DegenerateParametrizationError, SplineDomainError
from cubicmars.spline import CubicSpline, MomentSystem, SplineFunction, chordal_lengths, fit_spline


def _regular_knots(rng, n, r=0.1):
    d = rng.uniform(r, 1.0, n)
    return np.concatenate([[0.0], np.cumsum(d)])


def test_chordal_lengths_examples():
    assert np.allclose(chordal_lengths([(0, 0), (1, 0), (1, 1)]), [0, 1, 2])
    assert np.allclose(chordal_lengths([(0, 0), (3, 4)]), [0, 5])
    th = np.arange(5) * math.pi / 2
    pts = np.column_stack([np.cos(th), np.sin(th)])
    assert np.allclose(chordal_lengths(pts), np.arange(5) * math.sqrt(2))


def test_chordal_lengths_rejects_duplicates():
    with pytest.raises(DegenerateChordError):
        chordal_lengths([(0, 0), (0, 0), (1, 0)])


def test_cubic_reproduction_example():
    l = np.arange(5.0)
    s = fit_spline(np.column_stack([l, l**3]), "not-a-knot")
    ls = np.linspace(0, 4, 2001)
    # knots are chordal, so compare against the x coordinate's cubic in its own parameter
    f = SplineFunction(l, l**3, "not-a-knot")
    assert np.abs(f(ls) - ls**3).max() < 1e-10
    assert np.allclose(f(1.5, order=2), 9.0)
    assert np.allclose(s(s.knots), s.points, rtol=0, atol=1e-14)


def test_constant_data_has_zero_moments():
    f = SplineFunction(np.linspace(0, 1, 7), np.full(7, 2.5), "not-a-knot")
    assert np.all(f.moments == 0.0)
    assert np.allclose(f(np.linspace(0, 1, 50)), 2.5)


def test_sin_nak_bound():
    n = 8
    l = np.linspace(0, math.pi, n + 1)
    f = SplineFunction(l, np.sin(l), "not-a-knot")
    ls = np.linspace(0, math.pi, 10_000)
    err = np.abs(f(ls) - np.sin(ls)).max()
    assert err <= 5 / 32 * (math.pi / n) ** 4
    # frozen from scipy.interpolate.CubicSpline(bc_type="not-a-knot") on the same sweep
    assert err == pytest.approx(2.6422649731861e-4, rel=1e-9)


def test_matches_scipy_not_a_knot():
    from scipy.interpolate import CubicSpline as ScipySpline

    rng = np.random.default_rng(11)
    l = _regular_knots(rng, 20)
    v = rng.normal(size=21)
    ls = np.linspace(l[0], l[-1], 3000)
    ref = ScipySpline(l, v, bc_type="not-a-knot")
    f = SplineFunction(l, v, "not-a-knot")
    for order in (0, 1, 2):
        assert np.allclose(f(ls, order), ref(ls, order), rtol=0, atol=1e-11)
    v[-1] = v[0]
    refp = ScipySpline(l, v, bc_type="periodic")
    assert np.allclose(SplineFunction(l, v, "periodic")(ls), refp(ls), rtol=0, atol=1e-11)


def test_interpolation_and_smoothness():
    rng = np.random.default_rng(3)
    l = _regular_knots(rng, 12)
    v = rng.normal(size=13)
    for kind in ("not-a-knot", "periodic"):
        vv = v.copy()
        if kind == "periodic":
            vv[-1] = vv[0]
        f = SplineFunction(l, vv, kind)
        assert np.allclose(f(l), vv, rtol=0, atol=1e-12)
        inner = l[1:-1]
        for order in (0, 1, 2):
            assert np.allclose(f(inner, order, "left"), f(inner, order, "right"), atol=1e-9)
        if kind == "periodic":
            for order in (0, 1, 2):
                assert f(l[0], order) == pytest.approx(f(l[-1], order, "left"), abs=1e-9)
        else:
            for knot in (l[1], l[-2]):
                assert f(knot, 3, "left") == pytest.approx(f(knot, 3, "right"), abs=1e-8)


def test_moment_system_structure():
    l = np.linspace(0, 1, 9)
    ms = MomentSystem.assemble(l, np.sin(l), "not-a-knot")
    a = ms.to_dense()
    assert np.allclose(ms.mu[1:-1], 0.5) and np.allclose(ms.lam[1:-1], 0.5)
    assert np.allclose(a[0, :3], [0.5, -1, 0.5]) and np.allclose(a[-1, -3:], [0.5, -1, 0.5])
    f = SplineFunction(l, np.sin(l), "not-a-knot")
    assert ms.residual(f.moments) < 1e-12
    rng = np.random.default_rng(0)
    lp = _regular_knots(rng, 10)
    vp = np.sin(lp)
    vp[-1] = vp[0]
    mp = MomentSystem.assemble(lp, vp, "periodic")
    assert np.allclose(mp.to_dense().sum(axis=1), 3.0)
    assert mp.residual(SplineFunction(lp, vp, "periodic").moments) < 1e-12


def test_curvature_radius_examples():
    th = np.linspace(0, 2 * math.pi, 65)
    pts = np.column_stack([np.cos(th), np.sin(th)])
    pts[-1] = pts[0]
    s = CubicSpline(pts, "periodic")
    assert np.abs(s.curvature_radius(s.knots[:-1]) - 1).max() < 1e-3
    line = CubicSpline(np.column_stack([np.arange(5.0), 2 * np.arange(5.0)]), "not-a-knot")
    assert np.all(np.isinf(line.curvature_radius(line.knots)))
    x = np.linspace(-0.2, 0.2, 41)
    par = CubicSpline(np.column_stack([x, x**2]), "not-a-knot")
    mid = par.knots[20]
    assert par.curvature_radius(mid) == pytest.approx(0.5, rel=1e-3)


def test_degenerate_parametrization():
    f_knots = np.array([0.0, 1.0, 2.0, 3.0])
    s = CubicSpline(np.zeros((4, 2)) + [[0, 0], [1, 0], [2, 0], [3, 0]], "not-a-knot", knots=f_knots)
    s.x.moments[:] = 0.0
    s.x.values[:] = 0.0
    with pytest.raises(DegenerateParametrizationError):
        s.curvature_radius(1.5)


def test_domain_and_kind_errors():
    s = fit_spline(np.column_stack([np.arange(5.0), np.arange(5.0) ** 2]), "not-a-knot")
    with pytest.raises(SplineDomainError):
        s(s.knots[-1] + 1.0)
    with pytest.raises(ValueError):
        fit_spline(np.zeros((3, 2)) + [[0, 0], [1, 0], [2, 0]], "not-a-knot")
    with pytest.raises(ValueError):
        fit_spline(np.array([[0, 0], [1, 0], [1, 1], [0, 1.0]]), "periodic")


@settings(max_examples=60, deadline=None)
@given(st.integers(4, 40), st.integers(0, 2**31 - 1))
def test_cubic_reproduced_on_random_knots(n, seed):
    rng = np.random.default_rng(seed)
    l = _regular_knots(rng, n)
    c = rng.normal(size=4)
    p = np.polynomial.Polynomial(c)
    f = SplineFunction(l, p(l), "not-a-knot")
    ls = np.linspace(l[0], l[-1], 500)
    assert np.abs(f(ls) - p(ls)).max() <= 1e-10 * max(1.0, np.abs(p(ls)).max())


@settings(max_examples=60, deadline=None)
@given(st.integers(4, 60), st.integers(0, 2**31 - 1))
def test_periodic_spline_closes_smoothly(n, seed):
    rng = np.random.default_rng(seed)
    th = np.sort(rng.uniform(0, 2 * math.pi, n))
    th = th[np.diff(np.concatenate([th, [th[0] + 2 * math.pi]])) > 1e-3]
    if len(th) < 4:
        return
    pts = np.column_stack([np.cos(th), np.sin(th)])
    pts = np.vstack([pts, pts[:1]])
    s = CubicSpline(pts, "periodic")
    assert np.allclose(s(s.knots), pts, atol=1e-12)
    for order in (0, 1, 2):
        assert np.allclose(s(s.knots[0], order), s(s.knots[-1], order, "left"), atol=1e-8)
