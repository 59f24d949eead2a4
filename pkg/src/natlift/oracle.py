"""First-principles Levi-Civita connection and curvature in coordinates ``(q, p)``.

The oracle only sees the metric as a matrix-valued function of ``z = (q, p)``
and differentiates it numerically.  It never touches the adapted-frame
formulas in :mod:`natlift.connection`, so agreement between the two is real
evidence.  Error model: fourth-order stencils plus one Richardson level leave
truncation well below ``1e-8`` at the default steps; round-off dominates the
second derivatives at roughly ``eps / h^2 ~ 1e-10`` relative.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .connection import BLOCK_NAMES, ConnectionBlocks, CurvatureBlocks, join_blocks, split_blocks
from .errors import DomainError
from .fd import hessian, jacobian
from .phase_space import LiftedStructure, frame_matrix, frame_matrix_inverse, make_point

MetricField = Callable[[np.ndarray], np.ndarray]
FIRST_STEP = 1e-4
SECOND_STEP = 1e-3


@dataclass(frozen=True, eq=False)
class FrameChange:
    """``F`` has the adapted frame vectors as columns, in coordinate components."""

    F: np.ndarray
    F_inv: np.ndarray

    @classmethod
    def identity(cls, n: int) -> FrameChange:
        return cls(np.eye(2 * n), np.eye(2 * n))

    @classmethod
    def at(cls, structure: LiftedStructure, q, p) -> FrameChange:
        point = make_point(structure.space, q, p)
        return cls(frame_matrix(point), frame_matrix_inverse(point))

    def residual(self) -> float:
        return float(np.abs(self.F @ self.F_inv - np.eye(self.F.shape[0])).max())


def _as_field(field: Union[LiftedStructure, MetricField]) -> MetricField:
    return field.field("G") if isinstance(field, LiftedStructure) else field


def _guarded(f: MetricField) -> MetricField:
    def wrapped(z):
        try:
            return f(z)
        except DomainError as exc:
            raise DomainError(f"finite-difference stencil left the domain: {exc}") from exc

    return wrapped


def _z(q, p) -> np.ndarray:
    return np.concatenate([np.asarray(q, float), np.asarray(p, float)])


def coordinate_metric(structure: LiftedStructure, q, p) -> np.ndarray:
    return structure.at(q, p).G_coord()


def coordinate_christoffel(field, q, p, step: float = FIRST_STEP) -> np.ndarray:
    """``out[a, b, c] = Gamma^a_bc`` of the metric field at ``(q, p)``."""
    f = _guarded(_as_field(field))
    z = _z(q, p)
    G = f(z)
    dG = jacobian(f, z, rel_step=step)  # [a, b, c] = d_c G_ab
    return _christoffel(np.linalg.inv(G), dG)


def _christoffel(Gi, dG):
    lower = 0.5 * (np.einsum("cba->cab", dG) + np.einsum("cab->cab", dG) - np.einsum("abc->cab", dG))
    return np.einsum("dc,cab->dab", Gi, lower)


def metric_compatibility(field, q, p, gamma: np.ndarray | None = None, step: float = FIRST_STEP) -> float:
    """``max |d_c G_ab - Gamma^e_ca G_eb - Gamma^e_cb G_ae|``."""
    f = _guarded(_as_field(field))
    z = _z(q, p)
    G = f(z)
    dG = jacobian(f, z, rel_step=step)
    if gamma is None:
        gamma = _christoffel(np.linalg.inv(G), dG)
    res = dG - np.einsum("eca,eb->abc", gamma, G) - np.einsum("ecb,ae->abc", gamma, G)
    return float(np.abs(res).max())


def coordinate_curvature(field, q, p, step: float = SECOND_STEP) -> np.ndarray:
    """``out[a, b, c, d] = R^a_bcd``, the ``a`` component of ``R(d_c, d_d) d_b``."""
    f = _guarded(_as_field(field))
    z = _z(q, p)
    G = f(z)
    Gi = np.linalg.inv(G)
    dG = jacobian(f, z, rel_step=FIRST_STEP)  # [a, b, c]
    ddG = hessian(f, z, rel_step=step)  # [a, b, c, e] = d_c d_e G_ab
    lower = 0.5 * (np.einsum("cba->cab", dG) + np.einsum("cab->cab", dG) - np.einsum("abc->cab", dG))
    gamma = np.einsum("dc,cab->dab", Gi, lower)
    d_lower = 0.5 * (
        np.einsum("cbae->cabe", ddG) + np.einsum("cabe->cabe", ddG) - np.einsum("abce->cabe", ddG)
    )
    dGi = -np.einsum("dx,xye,yc->dce", Gi, dG, Gi)
    d_gamma = np.einsum("dce,cab->dabe", dGi, lower) + np.einsum("dc,cabe->dabe", Gi, d_lower)  # d_e Gamma^d_ab
    return (
        np.einsum("adbc->abcd", d_gamma)
        - np.einsum("acbd->abcd", d_gamma)
        + np.einsum("ace,edb->abcd", gamma, gamma)
        - np.einsum("ade,ecb->abcd", gamma, gamma)
    )


def lowered(curvature: np.ndarray, G: np.ndarray) -> np.ndarray:
    return np.einsum("ae,ebcd->abcd", G, curvature)


def bianchi_residual(curvature: np.ndarray) -> float:
    r = curvature + np.einsum("acdb->abcd", curvature) + np.einsum("adbc->abcd", curvature)
    return float(np.abs(r).max())


def to_adapted_frame(tensor: np.ndarray, frame: FrameChange) -> CurvatureBlocks:
    """Twelve blocks of a coordinate ``(1,3)`` tensor ``T^a_bcd`` in the adapted frame."""
    F, Fi = frame.F, frame.F_inv
    adapted = np.einsum("Aa,abcd,bB,cC,dD->ABCD", Fi, tensor, F, F, F, optimize=True)
    return split_blocks(adapted, F.shape[0] // 2)


def from_adapted_frame(blocks: CurvatureBlocks, frame: FrameChange) -> np.ndarray:
    """Reassemble a coordinate tensor, assuming antisymmetry in the last pair."""
    F, Fi = frame.F, frame.F_inv
    adapted = join_blocks(blocks, F.shape[0] // 2)
    return np.einsum("aA,ABCD,Bb,Cc,Dd->abcd", F, adapted, Fi, Fi, Fi, optimize=True)


def adapted_connection(structure: LiftedStructure, q, p, step: float = FIRST_STEP) -> ConnectionBlocks:
    """Connection blocks recovered from coordinate Christoffels and the frame change.

    ``nabla_{E_A} E_B = omega[C, A, B] E_C`` with
    ``omega = F^-1 (dF + Gamma F) F`` contracted appropriately.
    """
    n = structure.space.n
    z = _z(q, p)
    gamma = coordinate_christoffel(structure, q, p, step)
    frame_field = lambda w: frame_matrix(make_point(structure.space, w[:n], w[n:]))
    F = frame_field(z)
    Fi = np.linalg.inv(F)
    dF = jacobian(frame_field, z, rel_step=step)  # [c, B, a] = d_a F[c, B]
    omega = np.einsum("Cc,aA,cBa->CAB", Fi, F, dF) + np.einsum("Cc,cab,aA,bB->CAB", Fi, gamma, F, F)
    base_gamma = make_point(structure.space, q, p).base.gamma
    v = slice(n, 2 * n)
    h = slice(0, n)
    return ConnectionBlocks(
        Q=np.einsum("hij->ijh", omega[v, v, v]),
        Qt=np.einsum("hij->ijh", omega[h, v, v]),
        P=np.einsum("hij->jih", omega[h, v, h]),
        Pt=np.einsum("hij->jih", omega[v, v, h]),
        S=np.einsum("hij->ijh", omega[v, h, h]),
        St=np.einsum("hij->ijh", omega[h, h, h] - base_gamma),
    )


def oracle_curvature_blocks(structure: LiftedStructure, q, p) -> CurvatureBlocks:
    return to_adapted_frame(coordinate_curvature(structure, q, p), FrameChange.at(structure, q, p))


__all__ = [
    "BLOCK_NAMES",
    "FrameChange",
    "adapted_connection",
    "bianchi_residual",
    "coordinate_christoffel",
    "coordinate_curvature",
    "coordinate_metric",
    "from_adapted_frame",
    "lowered",
    "metric_compatibility",
    "oracle_curvature_blocks",
    "to_adapted_frame",
]
