import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from engelflex import models as M
from engelflex.errors import NonFinitePoint, NotContact, UnknownIdentifier

finite = st.floats(-2, 2, allow_nan=False)


def test_darboux_frame_at_origin():
    fr = M.eval_frame(M.darboux(), [0, 0, 0, 0])
    assert np.allclose(fr.v1, [0, 0, 0, 1])
    assert np.allclose(fr.v2, [1, 0, 0, 0])


def test_lorentzian_frame():
    fr = M.eval_frame(M.lorentzian(), [0, 0, 0, 2])
    assert np.allclose(fr.v1, [0, 0, 0, 1])
    assert np.allclose(fr.v2, [1, 2, 4, 0])


def test_mapping_torus_frame_is_rotated_line():
    fr = M.eval_frame(M.mapping_torus("pi_t"), [0, 0, 0, 0.25])
    c = np.sqrt(0.5)
    assert np.allclose(fr.v1, [0, 0, 0, 1])
    assert np.allclose(fr.v2, [c, 0, c, 0])


def test_mapping_torus_rejects_t_outside_unit_interval():
    with pytest.raises(ValueError):
        M.eval_frame(M.mapping_torus(), [0, 0, 0, 1.5])


def test_nonfinite_point():
    with pytest.raises(NonFinitePoint):
        M.eval_frame(M.darboux(), [np.nan, 0, 0, 0])


def test_unknown_model():
    with pytest.raises(UnknownIdentifier):
        M.get_model("nope")


@pytest.mark.parametrize("name", ["darboux", "lorentzian", "cartand0"])
def test_coframe_annihilates_frame(name, rng):
    m = M.get_model(name)
    p = rng.uniform(-1, 1, (50, 4))
    fr = m.frame(p)
    v1, v2 = fr.v1, fr.v2
    a, b = m.coframe(p)
    for form in (a, b):
        for v in (v1, v2):
            assert np.max(np.abs(np.sum(form * v, axis=-1))) < 1e-12


@pytest.mark.parametrize("name", ["darboux", "lorentzian", "cartand0"])
def test_growth_vector_engel(name, rng):
    m = M.get_model(name)
    for p in rng.uniform(-1, 1, (10, 4)):
        g = M.growth_vector(m, p)
        assert g == (2, 3, 4)
        assert g.min_kept >= 10


def test_growth_vector_integrable_frame():
    m = M.custom_model(lambda p: np.broadcast_to([1.0, 0, 0, 0], p.shape), lambda p: np.broadcast_to([0, 1.0, 0, 0], p.shape))
    assert M.growth_vector(m, [0, 0, 0, 0]) == (2, 2, 2)


def test_growth_vector_rejects_bad_step():
    with pytest.raises(ValueError):
        M.growth_vector(M.darboux(), [0, 0, 0, 0], h=0.1)


def test_cartan_change_examples():
    assert np.allclose(M.cartan_change_of_coordinates([1, 0, 0, 2]), [1, 2, 4, 2])
    assert np.allclose(M.cartan_change_of_coordinates([2, 1, 1, -1]), [2, -1, 3, -1])
    assert np.allclose(M.cartan_change_of_coordinates([0, 0, 0, 0]), 0)


@settings(max_examples=50, deadline=None)
@given(st.tuples(finite, finite, finite, finite))
def test_intertwining(p):
    assert M.intertwining_residual(np.array(p)) < 1e-9


def test_conformal_factors():
    q = np.zeros(3)
    assert M.contact_conformal_factor(M.identity_map(), q) == pytest.approx(1)
    assert M.contact_conformal_factor(M.example4_scaling(), q) == pytest.approx(0.5)
    assert M.contact_conformal_factor(M.example5_psi(np.pi / 3), q) == pytest.approx(1)


def test_non_contact_map():
    phi = M.Contactomorphism3("shear", lambda q: np.asarray(q) * np.array([1.0, 1.0, 2.0]))
    with pytest.raises(NotContact):
        M.contact_conformal_factor(phi, np.array([0.1, 0.2, 0.3]))


@settings(max_examples=30, deadline=None)
@given(st.floats(0.05, 3.0), st.tuples(finite, finite, finite))
def test_rotation_map_is_lift_of_rotation(alpha, q):
    psi = M.example5_psi(alpha)
    lin = M.linear_contactomorphism(np.array([[np.cos(alpha), np.sin(alpha)], [-np.sin(alpha), np.cos(alpha)]]))
    q = np.array(q)
    assert np.allclose(psi(q), lin(q), atol=1e-12)


def test_smallest_turning():
    assert M.smallest_turning(M.example4_scaling()) == pytest.approx(np.pi)
    assert M.smallest_turning(M.example5_psi(1.0)) == pytest.approx(1.0)


def test_manifest_roundtrip():
    m = M.mapping_torus({"linear": 2.0}, M.example5_psi(2.0))
    m2 = M.model_from_manifest(M.model_to_manifest(m))
    p = np.array([0.1, 0.2, 0.3, 0.4])
    assert np.allclose(m.frame(p).v2, m2.frame(p).v2)
    q = p[:3]
    assert np.allclose(m.return_map(q), m2.return_map(q))
