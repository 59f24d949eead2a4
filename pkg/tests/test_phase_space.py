import numpy as np
import pytest

from conftest import hsc_structure, random_phase_point
from natlift.base_space import SpaceForm, geometry_at
from natlift.coefficients import complex_coefficients, metric_coefficients
from natlift.errors import IndefiniteMetric
from natlift.phase_space import (
    LiftedStructure,
    build_G,
    build_J,
    closedness_residual,
    energy_density,
    fundamental_form,
    inverse_system_residual,
    invert_G,
    make_point,
    nijenhuis_at,
)

FLAT = LiftedStructure.from_profiles(2, 0.0, "1", "0", lam="1")
SPHERE = LiftedStructure.from_profiles(3, 1.0, "1+t/2", "t/2", lam="1/(1+t)")


def test_energy_density():
    flat = geometry_at(SpaceForm(2, 0.0), [0.0, 0.0])
    assert energy_density(flat, [1.0, 0.0]) == 0.5
    assert energy_density(geometry_at(SpaceForm(2, 1.0), [0.3, -0.1]), [0.0, 0.0]) == 0.0
    # phi = 1.025, t = phi^2 |p|^2 / 2
    t = energy_density(geometry_at(SpaceForm(2, 1.0), [0.3, -0.1]), [0.4, 0.2])
    assert t == pytest.approx(0.1050625, rel=1e-15)


def test_flat_structure_is_standard():
    ps = FLAT.at([0.2, 0.4], [0.3, -0.7])
    assert np.array_equal(ps.J.J1, np.eye(2)) and np.array_equal(ps.J.J2, np.eye(2))
    assert not ps.J.J3.any()
    assert np.allclose(ps.G.matrix(), np.eye(4), atol=0)
    assert np.allclose(ps.H.matrix(), np.eye(4), atol=0)


def test_zero_covector_drops_b_terms():
    point = make_point(SpaceForm(2, 1.0), [0.3, -0.1], [0.0, 0.0])
    b = complex_coefficients("1+t", "t", 1.0, 0.0)
    J = build_J(point, b)
    assert np.allclose(J.J1, point.base.g) and np.allclose(J.J3, 0.0)
    G = build_G(point, metric_coefficients(b, "2"))
    assert np.allclose(G.G1, 2 * point.base.g) and np.allclose(G.G2, 2 * point.base.g_inv)


def test_structure_identities(rng):
    for _ in range(20):
        x, p = random_phase_point(SPHERE.space, rng)
        ps = SPHERE.at(x, p)
        J, G, H = ps.J.matrix(), ps.G.matrix(), ps.H.matrix()
        assert np.abs(J @ J + np.eye(6)).max() < 1e-11
        assert np.abs(J.T @ G @ J - G).max() < 1e-11
        assert inverse_system_residual(ps.G, ps.H) < 1e-11
        assert np.abs(H - np.linalg.inv(G)).max() < 1e-10
        assert fundamental_form(ps.point, ps.coeffs, ps.J, ps.G).residual < 1e-11


def test_indefinite_metric_detected():
    point = make_point(SpaceForm(2, 1.0), [0.0, 0.0], [0.3, 0.0])
    b = complex_coefficients("1", "0", 1.0, point.t)
    m = metric_coefficients(b, "1")
    with pytest.raises(IndefiniteMetric):
        build_G(point, type(m)(**{**m.__dict__, "c1": -m.c1}))


def test_constant_lambda_flat_form():
    ps = FLAT.at([0.1, 0.1], [0.2, 0.3])
    om = fundamental_form(ps.point, ps.coeffs, ps.J, ps.G)
    assert np.array_equal(om.omega, np.eye(2))
    assert closedness_residual(FLAT, [0.1, 0.1], [0.2, 0.3]) < 1e-10


def test_closedness_detects_wrong_mu():
    good = LiftedStructure.from_profiles(2, 1.0, "1", "0", lam="1+t")
    bad = good.with_changes(mu=good.lam * 0)
    x, p = [0.1, -0.2], [0.3, 0.1]
    assert closedness_residual(good, x, p) < 1e-6
    assert closedness_residual(bad, x, p) > 1e-2


def test_nijenhuis():
    assert nijenhuis_at(FLAT, [0.1, 0.2], [0.3, -0.1]) < 1e-7
    s = hsc_structure(1.0, 2, "1+t/2", "t/2")
    x, p = [0.2, -0.1], [0.4, 0.3]
    assert nijenhuis_at(s, x, p) < 1e-5
    assert nijenhuis_at(s.with_changes(perturbation=("b1", 0.05)), x, p) > 1e-3


def test_coordinate_forms_are_consistent():
    ps = SPHERE.at([0.1, 0.2, -0.1], [0.3, 0.1, 0.2])
    Jc, Gc, Oc = ps.J_coord(), ps.G_coord(), ps.omega_coord()
    assert np.abs(Jc @ Jc + np.eye(6)).max() < 1e-12
    assert np.abs(Gc @ Jc - Oc).max() < 1e-12
    assert np.abs(Oc + Oc.T).max() < 1e-12


def test_from_profiles_needs_lambda_or_k():
    with pytest.raises(ValueError):
        LiftedStructure.from_profiles(2, 1.0, "1", "0")
