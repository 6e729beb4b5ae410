import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from engelflex.curves import (
    EVERYWHERE_TANGENT,
    GENERIC,
    TRANSVERSE,
    FamilyOfCurves,
    SampledCurve,
    curve_from_function,
    degenerate_cells,
    developing_angle,
    family_distance,
    horizontality_residual,
    make_generic,
    planar_winding,
    reparametrize,
    rotation_number,
    tangency_locus,
    transverse_residual,
)
from engelflex.errors import EverywhereTangentMember, NonFinitePoint, NotClosed, NotKernelTangent
from engelflex.loops import degenerate_family, lift_xt, standard_loop
from engelflex.models import darboux, lorentzian


def kernel_orbit(n=512, x0=0.3):
    s = np.linspace(0, 1, n)
    return SampledCurve(s, np.column_stack([np.full(n, x0), np.zeros(n), np.zeros(n), s]))


def test_sampled_curve_validation():
    s = np.linspace(0, 1, 5)
    with pytest.raises(ValueError):
        SampledCurve(s, np.zeros((5, 3)))
    with pytest.raises(ValueError):
        SampledCurve(s[::-1], np.zeros((5, 4)))
    bad = np.zeros((5, 4))
    bad[2, 1] = np.nan
    with pytest.raises(NonFinitePoint):
        SampledCurve(s, bad)
    open_pts = np.column_stack([s, s, s, s])
    with pytest.raises(NotClosed):
        SampledCurve(s, open_pts, closed=True)


def test_curve_from_function_closes():
    c = curve_from_function(lambda s: np.array([np.cos(2 * np.pi * s), 0 * s, 0 * s, np.sin(2 * np.pi * s)]), 101, True)
    assert c.closed and c.closure_defect() == 0.0
    assert c.points.shape == (101, 4)


def test_horizontal_lift_has_small_residual():
    s = np.linspace(0, 1, 2001)
    c = lift_xt(s, np.sin(3 * s), s**2, closed=False)
    assert horizontality_residual(c, darboux()) < 1e-9


def test_non_horizontal_curve_is_detected():
    s = np.linspace(0, 1, 501)
    c = SampledCurve(s, np.column_stack([s, s, 0 * s, 0 * s]))
    assert horizontality_residual(c, darboux()) > 0.1


def test_kernel_orbit_is_everywhere_tangent():
    loc = tangency_locus(kernel_orbit(), darboux())
    assert loc.cls == EVERYWHERE_TANGENT


def test_graph_curve_is_transverse():
    s = np.linspace(0, 1, 1001)
    c = lift_xt(s, s, 0.2 * s, closed=False)
    assert tangency_locus(c, darboux()).cls == TRANSVERSE


def test_circle_front_has_generic_crossings():
    c = standard_loop(1)
    loc = tangency_locus(c, darboux())
    assert loc.cls == GENERIC
    assert len(loc.crossings) == 2


@pytest.mark.parametrize("n", [-2, -1, 0, 1, 2, 3])
def test_rotation_of_standard_loops(n):
    assert rotation_number(standard_loop(n, samples=1025), darboux()) == n


def test_rotation_needs_closed_curve():
    with pytest.raises(NotClosed):
        rotation_number(kernel_orbit(), darboux())


@settings(max_examples=15, deadline=None)
@given(st.floats(0.05, 0.45), st.integers(-2, 2))
def test_rotation_invariant_under_reparametrization(eps, n):
    c = standard_loop(n, samples=1025)
    s = c.params
    phi = s + eps / (2 * np.pi) * np.sin(2 * np.pi * s)
    assert rotation_number(reparametrize(c, phi), darboux()) == n


def test_reversal_negates_rotation():
    c = standard_loop(2, samples=1025)
    assert rotation_number(c.reversed(), darboux()) == -2


def test_planar_winding():
    th = np.linspace(0, 2 * np.pi, 200)
    assert planar_winding(np.column_stack([np.cos(3 * th), np.sin(3 * th)])) == 3


def test_developing_angle_along_orbit():
    # Darboux: the Legendrian line turns once per unit of t along a kernel orbit
    c = kernel_orbit(2000)
    a = developing_angle(c, darboux())
    assert np.isfinite(a)
    s = np.linspace(0, 1, 64)
    with pytest.raises(NotKernelTangent):
        developing_angle(lift_xt(s, s, 0 * s, closed=False), darboux())


@pytest.mark.parametrize("model", ["darboux", "lorentzian"])
def test_make_generic_removes_degenerate_cells(model):
    m = darboux() if model == "darboux" else lorentzian()
    fam = degenerate_family(model, samples=1024)
    assert degenerate_cells(fam, m).any()
    out = make_generic(fam, m, 1e-3)
    assert not degenerate_cells(out, m).any()
    d0, d1 = family_distance(fam, out)
    assert d1 <= 1e-3
    for c in out.curves:
        assert horizontality_residual(c, m) < 1e-6
        assert tangency_locus(c, m).cls != EVERYWHERE_TANGENT


def test_make_generic_rejects_kernel_orbit():
    fam = FamilyOfCurves(np.array([0.0, 1.0]), [kernel_orbit(), kernel_orbit(x0=0.5)])
    with pytest.raises(EverywhereTangentMember):
        make_generic(fam, darboux(), 1e-3)


def test_transverse_residual_of_coordinate_planes():
    m = darboux()
    u = np.linspace(-1, 1, 21)
    U, V = np.meshgrid(u, u, indexing="ij")
    yz = np.stack([0 * U, U, V, 0 * U], axis=-1)
    xt = np.stack([U, 0 * U, 0 * U, V], axis=-1)
    assert transverse_residual(yz, m) > 0.5
    assert transverse_residual(xt, m) < 1e-12
