import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from biminimal.numerics import GridSpec, central_diff, gradient, loglog_slope, rigid_align, rk4, second_gradient


def test_grid_basics():
    g = GridSpec.from_step(0.0, 1.0, 0.01)
    assert g.n == 101 and g.h == pytest.approx(0.01)
    assert g.s[-1] == 1.0
    sub = g.subgrid(10)
    assert sub.n == 11 and sub.h == pytest.approx(0.1)
    with pytest.raises(ValueError):
        GridSpec(0.0, 1.0, 4)


@pytest.mark.parametrize("order,accuracy,expected", [(1, 2, 2), (1, 4, 4), (2, 2, 2), (2, 4, 4)])
def test_central_diff_orders(order, accuracy, expected):
    errs, hs = [], [0.04, 0.02, 0.01]
    for h in hs:
        g = GridSpec.from_step(0.0, 2.0, h)
        d = central_diff(np.sin(g.s), g.h, order=order, accuracy=accuracy)
        exact = np.cos(g.s) if order == 1 else -np.sin(g.s)
        errs.append(np.nanmax(np.abs(d - exact)))
    assert loglog_slope(hs, errs) == pytest.approx(expected, abs=0.2)


def test_central_diff_pads_ends_with_nan():
    d = central_diff(np.arange(10.0), 1.0, accuracy=4)
    assert np.all(np.isnan(d[:2])) and np.all(np.isnan(d[-2:]))
    assert np.allclose(d[2:-2], 1.0)


def test_full_grid_gradients():
    g = GridSpec(0.0, 1.0, 201)
    assert np.max(np.abs(gradient(g.s**2, g.h) - 2 * g.s)) < 1e-10
    assert np.max(np.abs(second_gradient(g.s**3, g.h) - 6 * g.s)) < 1e-6


def test_rk4_fourth_order():
    errs, hs = [], [0.1, 0.05, 0.025]
    for h in hs:
        g = GridSpec.from_step(0.0, 1.0, h)
        y = rk4(lambda s, y: y, np.array([1.0]), g.s)
        errs.append(abs(y[-1, 0] - math.e))
    assert loglog_slope(hs, errs) == pytest.approx(4, abs=0.2)


@given(st.floats(-math.pi, math.pi), st.floats(-5, 5), st.floats(-5, 5), st.booleans())
def test_rigid_align_recovers_motion(theta, tx, ty, flip):
    rng = np.random.default_rng(0)
    pts = rng.normal(size=(30, 2))
    R = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
    if flip:
        R = R @ np.diag([1.0, -1.0])
    moved = pts @ R.T + [tx, ty]
    aligned, dist = rigid_align(moved, pts)
    assert dist < 1e-9
    assert np.allclose(aligned, pts, atol=1e-9)


def test_rigid_align_without_reflection_sees_mirror():
    pts = np.random.default_rng(1).normal(size=(20, 2))
    _, dist = rigid_align(pts * [1, -1], pts, allow_reflection=False)
    assert dist > 1e-2


def test_loglog_slope_power_law():
    h = np.array([0.1, 0.05, 0.025])
    assert loglog_slope(h, 3 * h**2) == pytest.approx(2.0)
