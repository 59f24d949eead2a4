"""Lifted structures on the cotangent bundle at a single phase point.

Frame and index conventions used throughout the package:

* the adapted frame is ordered ``(delta_1..delta_n, dp^1..dp^n)`` with
  ``delta_i = d/dq^i + Gamma0_ih d/dp_h`` and ``Gamma0_ih = p_k Gamma^k_ih``;
* mixed blocks are stored upper index first, e.g. ``J3[a, b] = J3^a_b`` where
  the upper index carries ``g0`` and the lower one carries ``p``;
* ``G3[a, b] = G(dp^a, delta_b)`` and ``H3[a, b]`` is the inverse-metric
  entry between ``delta_a`` and ``dp^b``.

The assembled ``J`` matrix holds in column ``B`` the frame components of
``J E_B``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .base_space import BaseGeometry, SpaceForm, geometry_at
from .coefficients import (
    CoefficientBundle,
    MetricCoefficients,
    complex_coefficients,
    hsc_lambda_expr,
    metric_coefficients,
    perturb_bundle,
)
from .errors import IndefiniteMetric
from .fd import jacobian
from .profiles import ScalarExpr, as_profile


@dataclass(frozen=True, eq=False)
class PhasePoint:
    base: BaseGeometry
    p: np.ndarray
    t: float
    g0: np.ndarray  # g^{0i} = p_h g^{hi}
    gamma0: np.ndarray  # [i, h] = p_k Gamma^k_ih
    r0: np.ndarray  # [l, j, k] = p_h R^h_ljk

    @property
    def n(self) -> int:
        return self.p.shape[0]


def energy_density(base: BaseGeometry, p) -> float:
    p = np.asarray(p, dtype=float)
    return 0.5 * float(p @ base.g_inv @ p)


def make_point(space: SpaceForm, x, p) -> PhasePoint:
    base = geometry_at(space, x)
    p = np.array(p, dtype=float)
    g0 = base.g_inv @ p
    gamma0 = np.einsum("k,kih->ih", p, base.gamma)
    r0 = np.einsum("h,hljk->ljk", p, base.riemann)
    return PhasePoint(base, p, energy_density(base, p), g0, gamma0, r0)


@dataclass(frozen=True, eq=False)
class JBlocks:
    J1: np.ndarray
    J2: np.ndarray
    J3: np.ndarray
    J4: np.ndarray

    def matrix(self) -> np.ndarray:
        return np.block([[self.J4, -self.J2], [self.J1, self.J3.T]])


@dataclass(frozen=True, eq=False)
class GBlocks:
    G1: np.ndarray
    G2: np.ndarray
    G3: np.ndarray

    def matrix(self) -> np.ndarray:
        return np.block([[self.G1, self.G3.T], [self.G3, self.G2]])


@dataclass(frozen=True, eq=False)
class HBlocks:
    H1: np.ndarray
    H2: np.ndarray
    H3: np.ndarray

    def matrix(self) -> np.ndarray:
        return np.block([[self.H1, self.H3], [self.H3.T, self.H2]])


def _upper_lower(a, b, point: PhasePoint) -> np.ndarray:
    """``a delta^i_j + b g0^i p_j``."""
    return a * np.eye(point.n) + b * np.outer(point.g0, point.p)


def _lower(a, b, point: PhasePoint) -> np.ndarray:
    return a * point.base.g + b * np.outer(point.p, point.p)


def _upper(a, b, point: PhasePoint) -> np.ndarray:
    return a * point.base.g_inv + b * np.outer(point.g0, point.g0)


def build_J(point: PhasePoint, bundle: CoefficientBundle) -> JBlocks:
    B = bundle
    return JBlocks(
        J1=_lower(float(B.a1[0]), float(B.b1[0]), point),
        J2=_upper(float(B.a2[0]), float(B.b2[0]), point),
        J3=_upper_lower(float(B.a3[0]), float(B.b3[0]), point),
        J4=_upper_lower(float(B.a4[0]), float(B.b4[0]), point),
    )


def build_G(point: PhasePoint, coeffs: MetricCoefficients, check: bool = True) -> GBlocks:
    C = coeffs
    blocks = GBlocks(
        G1=_lower(float(C.c1[0]), float(C.d1[0]), point),
        G2=_upper(float(C.c2[0]), float(C.d2[0]), point),
        G3=_upper_lower(float(C.c3[0]), float(C.d3[0]), point),
    )
    if check:
        if np.linalg.eigvalsh(blocks.matrix()).min() <= 0:
            raise IndefiniteMetric("assembled metric is not positive definite")
    return blocks


def invert_G(G: GBlocks, coeffs: MetricCoefficients, point: PhasePoint) -> HBlocks:
    """Inverse metric blocks from the closed-form ``e``/``f`` coefficients."""
    C = coeffs
    return HBlocks(
        H1=_upper(float(C.e1[0]), float(C.f1[0]), point),
        H2=_lower(float(C.e2[0]), float(C.f2[0]), point),
        H3=_upper_lower(float(C.e3[0]), float(C.f3[0]), point),
    )


def inverse_system_residual(G: GBlocks, H: HBlocks) -> float:
    """Largest entry of the four block equations ``G H = Id`` minus identity."""
    eye = np.eye(G.G1.shape[0])
    r1 = G.G1 @ H.H1 + G.G3.T @ H.H3.T - eye
    r2 = G.G1 @ H.H3 + G.G3.T @ H.H2
    r3 = G.G3 @ H.H1 + G.G2 @ H.H3.T
    r4 = G.G3 @ H.H3 + G.G2 @ H.H2 - eye
    return float(max(np.abs(r).max() for r in (r1, r2, r3, r4)))


@dataclass(frozen=True, eq=False)
class FundamentalForm:
    omega: np.ndarray  # [i, j] = Omega(dp^i, delta_j)
    residual: float  # closed form against G(X, JY)

    def matrix(self) -> np.ndarray:
        n = self.omega.shape[0]
        z = np.zeros((n, n))
        return np.block([[z, -self.omega.T], [self.omega, z]])


def fundamental_form(point: PhasePoint, coeffs: MetricCoefficients, J: JBlocks, G: GBlocks) -> FundamentalForm:
    omega = _upper_lower(float(coeffs.lam[0]), float(coeffs.mu[0]), point)
    form = FundamentalForm(omega, 0.0)
    gj = G.matrix() @ J.matrix()
    return FundamentalForm(omega, float(np.abs(gj - form.matrix()).max()))


def frame_matrix(point: PhasePoint) -> np.ndarray:
    """Columns are the adapted frame vectors in coordinate components."""
    n = point.n
    F = np.eye(2 * n)
    F[n:, :n] = point.gamma0.T
    return F


def frame_matrix_inverse(point: PhasePoint) -> np.ndarray:
    n = point.n
    Fi = np.eye(2 * n)
    Fi[n:, :n] = -point.gamma0.T
    return Fi


@dataclass(frozen=True, eq=False)
class PointStructure:
    """Everything the lifted structure determines at one phase point."""

    point: PhasePoint
    bundle: CoefficientBundle
    coeffs: MetricCoefficients
    J: JBlocks
    G: GBlocks
    H: HBlocks

    def J_coord(self) -> np.ndarray:
        F, Fi = frame_matrix(self.point), frame_matrix_inverse(self.point)
        return F @ self.J.matrix() @ Fi

    def G_coord(self) -> np.ndarray:
        Fi = frame_matrix_inverse(self.point)
        return Fi.T @ self.G.matrix() @ Fi

    def omega_coord(self) -> np.ndarray:
        Fi = frame_matrix_inverse(self.point)
        return Fi.T @ (self.G.matrix() @ self.J.matrix()) @ Fi


@dataclass(frozen=True)
class LiftedStructure:
    """A natural lift ``(G, J)`` over a space form, given by its profiles.

    ``lam`` may be omitted when ``k`` is given; the proportionality factor
    is then the one producing constant holomorphic sectional curvature ``k``.
    ``mu`` overrides ``lambda'`` and ``perturbation = (name, amount)`` feeds
    :func:`~natlift.coefficients.perturb_bundle`; both exist for negative
    controls.
    """

    space: SpaceForm
    a1: ScalarExpr
    a3: ScalarExpr
    lam: ScalarExpr
    k: Optional[float] = None
    mu: Optional[ScalarExpr] = None
    perturbation: Optional[tuple] = None
    lam_scale: float = 1.0

    @classmethod
    def from_profiles(cls, n, c, a1, a3, lam=None, k=None, **kwargs) -> LiftedStructure:
        a1, a3 = as_profile(a1), as_profile(a3)
        if lam is None:
            if k is None:
                raise ValueError("either lam or k must be given")
            lam = hsc_lambda_expr(a1, a3, c, k)
        return cls(SpaceForm(n, c), a1, a3, as_profile(lam), k=k, **kwargs)

    @property
    def lam_expr(self) -> ScalarExpr:
        return self.lam if self.lam_scale == 1.0 else self.lam_scale * self.lam

    def with_changes(self, **kwargs) -> LiftedStructure:
        from dataclasses import replace

        return replace(self, **kwargs)

    def at(self, x, p) -> PointStructure:
        point = make_point(self.space, x, p)
        bundle = complex_coefficients(self.a1, self.a3, self.space.c, point.t)
        if self.perturbation is not None:
            bundle = perturb_bundle(bundle, *self.perturbation)
        coeffs = metric_coefficients(bundle, self.lam_expr, mu=self.mu)
        J = build_J(point, bundle)
        G = build_G(point, coeffs)
        H = invert_G(G, coeffs, point)
        return PointStructure(point, bundle, coeffs, J, G, H)

    def field(self, kind: str):
        """Coordinate-basis component function ``z = (q, p) -> matrix``."""
        n = self.space.n
        attr = {"J": "J_coord", "G": "G_coord", "omega": "omega_coord"}[kind]
        return lambda z: getattr(self.at(z[:n], z[n:]), attr)()


def nijenhuis_tensor(J: np.ndarray, dJ: np.ndarray) -> np.ndarray:
    """``N^a_bc`` from ``J^a_b`` and ``dJ[a, b, c] = d_c J^a_b``."""
    return (
        np.einsum("db,acd->abc", J, dJ)
        - np.einsum("dc,abd->abc", J, dJ)
        - np.einsum("ad,dcb->abc", J, dJ)
        + np.einsum("ad,dbc->abc", J, dJ)
    )


def nijenhuis_at(structure: LiftedStructure, x, p) -> float:
    """Largest coordinate component of the Nijenhuis tensor of ``J``."""
    z = np.concatenate([np.asarray(x, float), np.asarray(p, float)])
    f = structure.field("J")
    return float(np.abs(nijenhuis_tensor(f(z), jacobian(f, z))).max())


def closedness_residual(structure: LiftedStructure, x, p) -> float:
    """Largest component of ``d Omega`` in coordinates."""
    z = np.concatenate([np.asarray(x, float), np.asarray(p, float)])
    d = jacobian(structure.field("omega"), z)  # d[b, c, a] = d_a Omega_bc
    d_omega = np.einsum("bca->abc", d) + np.einsum("cab->abc", d) + np.einsum("abc->abc", d)
    return float(np.abs(d_omega).max())
