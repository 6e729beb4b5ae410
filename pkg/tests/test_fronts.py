import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from engelflex.errors import Infeasible, NotAdmissible, NotClosed, SlopeBudgetExceeded
from engelflex.fronts import (
    Front,
    adjust_area_to,
    admissible_front,
    cusp_free_windows,
    detect_cusps,
    insert_r1_loop,
    line_angle_total,
    max_slope,
    path_integral,
    positive_area_certificate,
    signed_area,
)
from engelflex.geiges import front_signed_area, legendrian_from_xt
from engelflex.loops import standard_xt


def segment(n=2048, slope_bound=1.0, z=0.0):
    s = np.linspace(0, 1, n)
    return Front(s, np.column_stack([s, np.full(n, z)]), slope_bound=slope_bound)


def test_signed_area_of_square_and_point():
    P = np.array([[0, 0], [1, 0], [1, 1], [0, 1], [0, 0]], dtype=float)
    assert signed_area(Front(np.arange(5.0), P, closed=True)) == pytest.approx(-1.0)
    assert signed_area(Front(np.arange(3.0), np.zeros((3, 2)), closed=True)) == 0.0
    with pytest.raises(NotClosed):
        signed_area(segment())


def test_circle_front_has_two_cusps_at_x_extrema():
    s = np.linspace(0, 1, 2048)
    phi = 2 * np.pi * s + 0.3
    l = legendrian_from_xt(s, np.cos(phi), -np.sin(phi))
    f = detect_cusps(s, np.column_stack([l.x, l.z]))
    assert len(f.cusp_marks) == 2
    xs = sorted(f.x[f.cusp_indices()])
    assert xs[0] == pytest.approx(-1, abs=1e-5) and xs[1] == pytest.approx(1, abs=1e-5)


def test_signed_area_matches_legendrian_area():
    s, x, t = standard_xt(1, 1025)
    l = legendrian_from_xt(s, x, t - np.mean(t), closed=False)
    P = np.column_stack([l.x, l.z])
    if np.max(np.abs(P[-1] - P[0])) < 1e-9:
        P[-1] = P[0]
        f = Front(s, P, closed=True)
        l2 = legendrian_from_xt(s, x, t - np.mean(t), closed=True)
        assert signed_area(f) == pytest.approx(front_signed_area(l2), abs=1e-12)


def test_insert_zero_is_identity():
    f = segment()
    g = insert_r1_loop(f, 0.5, 0.0)
    assert np.array_equal(g.points, f.points)


def test_insert_r1_loop_on_segment():
    f = segment()
    g = insert_r1_loop(f, 0.5, 0.01)
    assert path_integral(g) - path_integral(f) == pytest.approx(0.01, abs=1e-10)
    assert len(g.cusp_marks) == len(f.cusp_marks) + 2
    assert max_slope(g) <= 1.0 + 1e-9
    assert np.array_equal(g.points[[0, -1]], f.points[[0, -1]])


def test_insert_r1_loop_slope_budget():
    with pytest.raises(SlopeBudgetExceeded):
        insert_r1_loop(segment(slope_bound=0.1), 0.5, 10.0)


@settings(max_examples=10, deadline=None)
@given(st.floats(-5e-4, 5e-4).filter(lambda v: abs(v) > 1e-6))
def test_insert_and_remove_restores_area(dA):
    f = segment()
    g = insert_r1_loop(insert_r1_loop(f, 0.3, dA), 0.7, -dA)
    assert abs(path_integral(g) - path_integral(f)) < 2e-10


def test_adjust_area_trivial():
    f = segment()
    assert adjust_area_to(f, 0.0, [(0.2, 0.8)]) is f


def test_adjust_area_hits_target():
    f = segment()
    g = adjust_area_to(f, 0.003, [(0.1, 0.45), (0.55, 0.9)])
    assert path_integral(g) == pytest.approx(0.003, abs=1e-10)
    assert (len(g.cusp_marks) // 2) % 2 == 0


def test_adjust_area_infeasible_beyond_capacity():
    with pytest.raises(Infeasible):
        adjust_area_to(segment(slope_bound=0.1), 100.0, [(0.2, 0.8)], n_max=4)


def test_adjust_area_reference_example():
    # area 0.3 to 0 with one window of length 0.5 at slope bound 1
    f = segment(z=0.3)
    g = adjust_area_to(f, 0.0, [(0.25, 0.75)])
    assert abs(path_integral(g)) < 1e-10


@pytest.mark.parametrize("k", [3, 5, 7])
def test_admissible_fronts_have_positive_certified_area(k):
    rng = np.random.default_rng(100 + k)
    for _ in range(3):
        f = admissible_front(k, rng)
        assert len(f.cusp_marks) == k
        total, increasing = line_angle_total(f)
        assert increasing and total == pytest.approx(np.pi, abs=1e-6)
        cert = positive_area_certificate(f)
        assert signed_area(f) > 0
        assert cert.total_area == pytest.approx(signed_area(f), abs=1e-10)
        assert cert.final_area > 0


def test_even_cusp_count_rejected():
    with pytest.raises(NotAdmissible):
        admissible_front(4, np.random.default_rng(0))


def test_cusp_free_windows_avoid_cusps():
    f = admissible_front(5, np.random.default_rng(3))
    marks = np.array(f.cusp_marks)
    for a, b in cusp_free_windows(f):
        assert not np.any((marks >= a) & (marks <= b))
