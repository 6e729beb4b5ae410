import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from engelflex.curves import SampledCurve, horizontality_residual, rotation_number
from engelflex.errors import NotClosed, NotHorizontal, NotLegendrian
from engelflex.geiges import (
    LegendrianCurve,
    front_signed_area,
    geiges_lift,
    geiges_project,
    legendrian_from_xt,
    lift_defect,
)
from engelflex.loops import bump, close_loop, random_loop, standard_loop, standard_xt, transverse_windows
from engelflex.models import darboux
from engelflex.quadrature import loop_integral


def test_project_then_lift_recovers_loop(loop1):
    back = geiges_lift(geiges_project(loop1), y0=loop1.y[0])
    assert back.closed
    assert np.max(np.abs(back.points - loop1.points)) < 1e-9


def test_project_rejects_non_horizontal():
    s = np.linspace(0, 1, 200)
    c = SampledCurve(s, np.column_stack([s, s, 0 * s, 0 * s]))
    with pytest.raises(NotHorizontal):
        geiges_project(c)


def test_lift_of_nonzero_area_is_open_with_defect_equal_to_area():
    s = np.linspace(0, 1, 1024)
    phi = 2 * np.pi * s
    # loop t dx vanishes, loop z dx = pi / 2
    l = legendrian_from_xt(s, np.cos(phi), np.sin(2 * phi), closed=True)
    area = front_signed_area(l)
    assert area == pytest.approx(np.pi / 2, abs=1e-5)
    c = geiges_lift(l)
    assert not c.closed
    assert abs(lift_defect(c) - area) < 1e-12
    assert abs(lift_defect(c) - loop_integral(l.z, l.x)) < 1e-12


def test_signed_area_needs_closed():
    s = np.linspace(0, 1, 50)
    l = legendrian_from_xt(s, s, s)
    with pytest.raises(NotClosed):
        front_signed_area(l)


def test_lift_rejects_non_legendrian():
    s = np.linspace(0, 1, 100)
    l = LegendrianCurve(s, np.column_stack([s, 0 * s, 1 + 0 * s]))
    with pytest.raises(NotLegendrian):
        geiges_lift(l)


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 10_000), st.integers(-3, 3))
def test_random_loops_are_closed_horizontal_with_given_rotation(seed, n):
    c = random_loop(n, np.random.default_rng(seed), samples=1024)
    m = darboux()
    assert c.closed
    assert horizontality_residual(c, m) < 1e-9
    assert rotation_number(c, m) == n
    assert abs(loop_integral(c.z, c.x)) < 1e-12
    assert abs(loop_integral(c.t, c.x)) < 1e-12


def test_standard_loop_y0_z0_offsets():
    c = standard_loop(2, samples=513, y0=0.4, z0=-0.3)
    assert c.y[0] == pytest.approx(0.4)
    assert c.z[0] == pytest.approx(-0.3)


def test_bump_is_periodic_and_supported():
    s = np.linspace(0, 1, 1001)
    b = bump(s, 0.98, 0.05)
    assert b.max() == pytest.approx(1.0, abs=1e-3)
    assert b[500] == 0.0
    assert b[0] > 0  # wraps around


def test_close_loop_zeroes_both_areas():
    s, x, t = standard_xt(1, 1025)
    t = t + 0.3
    c = close_loop(s, x, t, windows=transverse_windows(s, x))
    assert isinstance(c, SampledCurve) and c.closed
    assert abs(loop_integral(c.t, c.x)) < 1e-12
