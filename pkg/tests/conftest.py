import numpy as np
import pytest

from natlift.base_space import SpaceForm, sample_base_point
from natlift.phase_space import LiftedStructure

FAMILIES = [("1", "0"), ("1 + t/2", "0"), ("1 + t/2", "t/2")]
MATRIX = [(c, n, a1, a3) for c in (1.0, -1.0) for n in (2, 3) for a1, a3 in FAMILIES]


def hsc_structure(c, n, a1="1", a3="0", **kw):
    return LiftedStructure.from_profiles(n, c, a1, a3, k=4.0 * c, **kw)


def random_phase_point(space: SpaceForm, rng, t_max=0.4, t_min=0.0):
    x = sample_base_point(space, rng)
    u = rng.normal(size=space.n)
    u /= np.linalg.norm(u)
    t = rng.uniform(t_min, t_max)
    phi = 1.0 + 0.25 * space.c * float(x @ x)
    return x, u * np.sqrt(2.0 * t) / phi


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
