import numpy as np
import pytest

from engelflex.curves import SampledCurve, horizontality_residual, rotation_number
from engelflex.errors import RotationMismatch, SlopeBandExceeded, WindingMismatch
from engelflex.homotopy import connect_loops, plane_winding, verify_family, wg_homotopy
from engelflex.loops import random_loop, standard_loop
from engelflex.models import darboux
from engelflex.quadrature import loop_integral


@pytest.fixture(scope="module")
def family():
    rng = np.random.default_rng(21)
    c0, c1 = random_loop(1, rng), random_loop(1, rng)
    return c0, c1, connect_loops(c0, c1, n_slices=32)


def test_wg_homotopy_keeps_winding():
    th = np.linspace(0, 2 * np.pi, 257)
    a = np.column_stack([np.cos(th), np.sin(th)])
    b = np.column_stack([2 * np.cos(th) + 0.3 * np.cos(3 * th), np.sin(th)])
    b[-1] = b[0]
    fam = wg_homotopy(a, b, np.linspace(0, 1, 11))
    assert fam.min_speed > 0
    assert all(plane_winding(P) == 1 for P in fam.curves)
    assert np.allclose(fam.curves[0], a) and np.allclose(fam.curves[-1], b)


def test_wg_homotopy_winding_mismatch():
    th = np.linspace(0, 2 * np.pi, 257)
    a = np.column_stack([np.cos(th), np.sin(th)])
    b = np.column_stack([np.cos(2 * th), np.sin(2 * th)])
    with pytest.raises(WindingMismatch):
        wg_homotopy(a, b, [0.0, 1.0])


def test_connect_loops_family(family):
    c0, c1, h = family
    m = darboux()
    assert h.report.passed
    assert np.array_equal(h.slices[0].points, c0.points)
    assert np.max(np.abs(h.slices[-1].points - c1.points)) < 1e-8
    assert set(h.report.rotations) == {1}
    assert np.max(np.abs(h.pre_lift_areas)) < 1e-10
    for c in h.slices:
        assert horizontality_residual(c, m) < 1e-6
        assert c.closure_defect() < 1e-9


def test_amplitudes_vary_continuously(family):
    _, _, h = family
    step = np.max(np.abs(np.diff(h.amplitudes, axis=0)))
    assert step < 10 * np.max(np.abs(h.amplitudes)) / len(h.slices) + 1e-12


def test_constant_family_for_equal_loops():
    c = random_loop(2, np.random.default_rng(5))
    h = connect_loops(c, c, n_slices=8)
    assert h.report.passed
    for s in h.slices:
        assert np.max(np.abs(s.points - c.points)) < 1e-8


def test_rotation_mismatch():
    with pytest.raises(RotationMismatch):
        connect_loops(standard_loop(0), standard_loop(1), n_slices=4)


def test_slope_band():
    c = standard_loop(1)
    with pytest.raises(SlopeBandExceeded):
        connect_loops(c, c, n_slices=4, slope_bound=0.5)


def test_verify_family_reports_corrupted_slice(family):
    _, _, h = family
    bad = h.slices[17].points.copy()
    bad[:, 1] += 0.01 * np.sin(2 * np.pi * h.slices[17].params)
    h2 = type(h)(h.time_grid, list(h.slices), None)
    h2.slices[17] = SampledCurve(h.slices[17].params, bad, True)
    rep = verify_family(h2)
    assert not rep.passed
    assert rep.first_bad == 17


def test_time_refinement_stability():
    rng = np.random.default_rng(8)
    c0, c1 = random_loop(-1, rng), random_loop(-1, rng)
    coarse = connect_loops(c0, c1, n_slices=16)
    fine = connect_loops(c0, c1, n_slices=32)
    a, b = max(coarse.report.residuals), max(fine.report.residuals)
    assert b < 2 * a + 1e-12
    assert rotation_number(fine.slices[10], darboux()) == -1
    assert abs(loop_integral(fine.slices[10].z, fine.slices[10].x)) < 1e-10
