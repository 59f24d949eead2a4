import numpy as np
import pytest

from natlift.base_space import (
    SpaceForm,
    conformal_metric,
    constant_curvature_tensor,
    geometry_at,
    riemann_from_christoffel,
    sample_base_point,
    sectional_curvature_check,
)
from natlift.errors import OutsideChart
from natlift.fd import hessian, jacobian


def fd_geometry(space, x):
    g = lambda y: conformal_metric(space, y)
    gi = np.linalg.inv(g(x))
    dg = jacobian(g, x, rel_step=1e-5)  # [i, j, l]
    lower = 0.5 * (np.einsum("ijl->ijl", dg) + np.einsum("ilj->ijl", dg) - np.einsum("jli->ijl", dg))
    return np.einsum("ki,ijl->kjl", gi, lower)


def test_flat():
    geo = geometry_at(SpaceForm(3, 0.0), [0.3, -0.2, 0.5])
    assert np.array_equal(geo.g, np.eye(3))
    assert not geo.gamma.any() and not geo.riemann.any()


def test_sphere_origin():
    geo = geometry_at(SpaceForm(2, 1.0), [0.0, 0.0])
    assert not geo.gamma.any()
    assert np.allclose(geo.riemann, constant_curvature_tensor(1.0, np.eye(2)), atol=0)


def test_christoffels_against_fd_oracle():
    space = SpaceForm(2, 1.0)
    x = np.array([0.3, -0.1])
    geo = geometry_at(space, x)
    assert np.abs(geo.gamma - fd_geometry(space, x)).max() < 1e-8
    # Riemann from FD Christoffels and their FD derivatives
    gam = lambda y: fd_geometry(space, y)
    d = jacobian(gam, x, rel_step=1e-3)
    assert np.abs(riemann_from_christoffel(gam(x), d) - geo.riemann).max() < 1e-8


def test_dgamma_against_fd():
    space = SpaceForm(3, -1.0)
    x = np.array([0.2, 0.1, 0.05])
    d = jacobian(lambda y: geometry_at(space, y).gamma, x)
    assert np.abs(d - geometry_at(space, x).dgamma).max() < 1e-10


@pytest.mark.parametrize("c,n,x", [(0.0, 2, [1.0, 2.0]), (1.0, 2, [0.0, 0.0]), (-1.0, 3, [0.2, 0.1, 0.05])])
def test_sectional_curvature(c, n, x):
    assert sectional_curvature_check(SpaceForm(n, c), x) < 1e-10


def test_hessian_of_metric_is_symmetric():
    h = hessian(lambda y: conformal_metric(SpaceForm(2, 1.0), y), np.array([0.3, -0.1]))
    assert np.abs(h - np.swapaxes(h, -1, -2)).max() < 1e-12


def test_outside_chart():
    with pytest.raises(OutsideChart):
        geometry_at(SpaceForm(2, -1.0), [2.5, 0.0])


def test_bad_dimension():
    with pytest.raises(ValueError):
        SpaceForm(1, 1.0)
    with pytest.raises(ValueError):
        geometry_at(SpaceForm(2, 1.0), [0.1, 0.2, 0.3])


def test_sampling_stays_in_ball(rng):
    space = SpaceForm(3, -4.0)
    pts = np.array([sample_base_point(space, rng) for _ in range(200)])
    assert np.linalg.norm(pts, axis=1).max() <= 0.5
    assert all(space.in_chart(x) for x in pts)
