import numpy as np
import pytest

from conftest import hsc_structure, random_phase_point
from natlift.connection import (
    BLOCK_NAMES,
    connection_block_derivatives,
    connection_blocks,
    curvature_blocks,
    curvature_difference,
    join_blocks,
    model_curvature_assembled,
    model_curvature_blocks,
    split_blocks,
)
from natlift.errors import ZeroCurvature
from natlift.fd import jacobian
from natlift.oracle import adapted_connection, oracle_curvature_blocks
from natlift.phase_space import LiftedStructure

FLAT = LiftedStructure.from_profiles(2, 0.0, "1", "0", lam="1")
GENERIC = LiftedStructure.from_profiles(3, 1.0, "1+t/2", "t/2", lam="1/(1+t)")
CASES = [
    hsc_structure(1.0, 2),
    hsc_structure(-1.0, 3, "1+t/2", "t/2"),
    GENERIC,
]


def block_fd(structure, x, p):
    names = ("Q", "Qt", "P", "Pt", "S", "St")

    def f(q):
        d = connection_blocks(structure.at(x, q)).as_dict()
        return np.stack([d[k] for k in names])

    fd = np.moveaxis(jacobian(f, np.asarray(p, float)), -1, 1)
    return dict(zip(names, fd))


def test_flat_everything_vanishes():
    ps = FLAT.at([0.3, -0.2], [0.5, 0.1])
    for arr in connection_blocks(ps).as_dict().values():
        assert not np.abs(arr).max()
    for arr in connection_block_derivatives(ps).as_dict().values():
        assert not np.abs(arr).max()
    for arr in curvature_blocks(ps).as_dict().values():
        assert not np.abs(arr).max()


@pytest.mark.parametrize("structure", CASES)
def test_connection_matches_oracle(structure, rng):
    x, p = random_phase_point(structure.space, rng)
    ours = connection_blocks(structure.at(x, p)).as_dict()
    oracle = adapted_connection(structure, x, p).as_dict()
    for name, arr in ours.items():
        assert np.abs(arr - oracle[name]).max() < 1e-5, name


@pytest.mark.parametrize("structure", CASES)
def test_connection_symmetries(structure, rng):
    x, p = random_phase_point(structure.space, rng)
    ps = structure.at(x, p)
    cb = connection_blocks(ps)
    for arr in (cb.Q, cb.Qt, cb.St):
        assert np.abs(arr - np.swapaxes(arr, 0, 1)).max() < 1e-13
    # no torsion: the vertical part of nabla_{delta_i} delta_j - nabla_{delta_j} delta_i is [delta_i, delta_j]
    bracket = np.einsum("hij->ijh", ps.point.r0)
    assert np.abs(cb.S - np.swapaxes(cb.S, 0, 1) - bracket).max() < 1e-13


@pytest.mark.parametrize("structure", CASES)
def test_derivatives_match_fd(structure, rng):
    x, p = random_phase_point(structure.space, rng)
    closed = connection_block_derivatives(structure.at(x, p)).as_dict()
    fd = block_fd(structure, x, p)
    for name in closed:
        assert np.abs(closed[name] - fd[name]).max() < 1e-5, name


def test_derivatives_at_zero_covector():
    s = hsc_structure(1.0, 3, "1+t/2", "t/2")
    x, p = np.array([0.1, -0.2, 0.3]), np.zeros(3)
    closed = connection_block_derivatives(s.at(x, p)).as_dict()
    fd = block_fd(s, x, p)
    for name in closed:
        assert np.abs(closed[name] - fd[name]).max() < 1e-5, name


@pytest.mark.parametrize("structure", CASES)
def test_curvature_matches_oracle(structure, rng):
    x, p = random_phase_point(structure.space, rng)
    ours = curvature_blocks(structure.at(x, p))
    oracle = oracle_curvature_blocks(structure, x, p)
    for name in BLOCK_NAMES:
        assert np.abs(getattr(ours, name) - getattr(oracle, name)).max() < 1e-4, name


def test_curvature_antisymmetry(rng):
    s = CASES[1]
    x, p = random_phase_point(s.space, rng)
    K = curvature_blocks(s.at(x, p))
    for name in ("QQQQ", "QQQP", "QQPQ", "QQPP", "PPQQ", "PPQP", "PPPQ", "PPPP"):
        arr = getattr(K, name)
        assert np.abs(arr + np.swapaxes(arr, 0, 1)).max() < 1e-12, name


def test_model_zero_for_zero_k(rng):
    ps = GENERIC.at(*random_phase_point(GENERIC.space, rng))
    for arr in model_curvature_blocks(ps, 0.0).as_dict().values():
        assert not arr.any()
    assert FLAT.at([0.1, 0.1], [0.2, 0.0]) is not None
    assert model_curvature_blocks(FLAT.at([0.1, 0.1], [0.2, 0.0]), 0.0).max_abs_difference(
        curvature_blocks(FLAT.at([0.1, 0.1], [0.2, 0.0]))
    ) == 0.0


@pytest.mark.parametrize("structure", CASES)
def test_model_blocks_two_ways(structure, rng):
    ps = structure.at(*random_phase_point(structure.space, rng))
    assert model_curvature_blocks(ps, 2.5).max_abs_difference(model_curvature_assembled(ps, 2.5)) < 1e-11


def test_split_join_roundtrip(rng):
    n = 3
    T = rng.normal(size=(2 * n,) * 4)
    T = T - np.swapaxes(T, 2, 3)
    assert np.abs(join_blocks(split_blocks(T, n), n) - T).max() < 1e-15


def test_curvature_equals_model_at_point():
    s = hsc_structure(1.0, 2)
    x, p = np.array([0.2, -0.1]), np.array([0.5, 0.3])
    assert curvature_difference(s.at(x, p), 4.0) < 1e-7
    assert curvature_difference(s.with_changes(lam_scale=1.01).at(x, p), 4.0) > 1e-3


def test_generic_kahler_is_not_model():
    ps = GENERIC.at([0.1, 0.2, 0.0], [0.3, 0.2, 0.1])
    assert curvature_difference(ps, 4.0) > 1e-2


def test_flat_base_has_no_hsc_lambda():
    with pytest.raises(ZeroCurvature):
        LiftedStructure.from_profiles(2, 0.0, "1", "0", k=4.0)
