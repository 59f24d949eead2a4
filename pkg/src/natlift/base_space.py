"""Space forms in the conformally flat chart.

``g_ij(x) = delta_ij / phi(x)^2`` with ``phi = 1 + (c/4)|x|^2`` has constant
sectional curvature ``c``.  Christoffel symbols and their derivatives are
written in closed form from ``sigma = -log(phi)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OutsideChart


@dataclass(frozen=True)
class SpaceForm:
    n: int
    c: float

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"dimension must be at least 2, got {self.n}")

    def in_chart(self, x) -> bool:
        r2 = float(np.dot(x, x))
        return self.c >= 0 or r2 < -4.0 / self.c


@dataclass(frozen=True, eq=False)
class BaseGeometry:
    """Metric data of the base at one chart point.

    Index conventions: ``gamma[k, i, j] = Gamma^k_ij``,
    ``dgamma[k, i, j, l] = d_l Gamma^k_ij`` and
    ``riemann[h, k, i, j] = R^h_kij`` with ``R(d_i, d_j) d_k = R^h_kij d_h``.
    """

    x: np.ndarray
    c: float
    g: np.ndarray
    g_inv: np.ndarray
    gamma: np.ndarray
    dgamma: np.ndarray
    riemann: np.ndarray

    @property
    def n(self) -> int:
        return self.x.shape[0]


def conformal_metric(space: SpaceForm, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    phi = 1.0 + 0.25 * space.c * float(x @ x)
    return np.eye(space.n) / phi**2


def riemann_from_christoffel(gamma: np.ndarray, dgamma: np.ndarray) -> np.ndarray:
    """``R^h_kij = d_i G^h_jk - d_j G^h_ik + G^h_il G^l_jk - G^h_jl G^l_ik``."""
    return (
        np.einsum("hjki->hkij", dgamma)
        - np.einsum("hikj->hkij", dgamma)
        + np.einsum("hil,ljk->hkij", gamma, gamma)
        - np.einsum("hjl,lik->hkij", gamma, gamma)
    )


def geometry_at(space: SpaceForm, x) -> BaseGeometry:
    x = np.array(x, dtype=float)
    if x.shape != (space.n,):
        raise ValueError(f"expected {space.n} coordinates, got shape {x.shape}")
    if not space.in_chart(x):
        raise OutsideChart(f"|x|^2 = {x @ x:.6g} is outside the chart for c = {space.c}")
    n, c = space.n, space.c
    phi = 1.0 + 0.25 * c * float(x @ x)
    eye = np.eye(n)
    g = eye / phi**2
    g_inv = eye * phi**2

    # sigma = -log(phi); Gamma^k_ij = delta^k_i s_j + delta^k_j s_i - delta_ij s_k
    s = -0.5 * c * x / phi
    ds = -0.5 * c * eye / phi + 0.25 * c * c * np.outer(x, x) / phi**2
    gamma = np.einsum("ki,j->kij", eye, s) + np.einsum("kj,i->kij", eye, s) - np.einsum("ij,k->kij", eye, s)
    dgamma = (
        np.einsum("ki,jl->kijl", eye, ds)
        + np.einsum("kj,il->kijl", eye, ds)
        - np.einsum("ij,kl->kijl", eye, ds)
    )
    riemann = riemann_from_christoffel(gamma, dgamma)
    return BaseGeometry(x, c, g, g_inv, gamma, dgamma, riemann)


def constant_curvature_tensor(c: float, g: np.ndarray) -> np.ndarray:
    """``c (delta^h_i g_kj - delta^h_j g_ki)`` indexed ``[h, k, i, j]``."""
    eye = np.eye(g.shape[0])
    return c * (np.einsum("hi,kj->hkij", eye, g) - np.einsum("hj,ki->hkij", eye, g))


def sectional_curvature_check(space: SpaceForm, x) -> float:
    geo = geometry_at(space, x)
    return float(np.max(np.abs(geo.riemann - constant_curvature_tensor(space.c, geo.g))))


def sample_base_point(space: SpaceForm, rng: np.random.Generator, radius: float = 0.5) -> np.ndarray:
    """Uniform point in the ball ``|x| <= radius``, kept well inside the chart."""
    r_max = radius
    if space.c < 0:
        r_max = min(r_max, 0.999 * np.sqrt(-2.0 / space.c))
    u = rng.normal(size=space.n)
    u /= np.linalg.norm(u)
    r = r_max * rng.uniform() ** (1.0 / space.n)
    return r * u
