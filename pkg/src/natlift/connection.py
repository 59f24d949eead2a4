"""Levi-Civita connection and curvature of ``G`` in the adapted frame.

Connection blocks (arrays are indexed in the order the indices are written):

=========  ==========================================================
``Q``      ``nabla_{dp^i} dp^j   = Q[i,j,h] dp^h + Qt[i,j,h] delta_h``
``P``      ``nabla_{dp^i} delta_j = P[j,i,h] delta_h + Pt[j,i,h] dp^h``
``S``      ``nabla_{delta_i} delta_j = (Gamma^h_ij + St[i,j,h]) delta_h + S[i,j,h] dp^h``
=========  ==========================================================

and ``nabla_{delta_i} dp^j = (-Gamma^j_ih + Pt[i,j,h]) dp^h + P[i,j,h] delta_h``.

Curvature blocks are named by the types of ``(X, Y, Z, output)`` with ``Q``
horizontal and ``P`` vertical, e.g. ``PQPP[i,j,k,h]`` is the ``dp^h``
component of ``K(dp^i, delta_j) dp^k``.  All p-derivatives are closed form:
they come from the jets of the coefficient functions, never from finite
differences.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from .phase_space import PointStructure

BLOCK_NAMES = (
    "QQQQ", "QQQP", "QQPQ", "QQPP",
    "PPQQ", "PPQP", "PPPQ", "PPPP",
    "PQQQ", "PQQP", "PQPQ", "PQPP",
)  # fmt: skip


@dataclass(frozen=True, eq=False)
class ConnectionBlocks:
    Q: np.ndarray
    Qt: np.ndarray
    P: np.ndarray
    Pt: np.ndarray
    S: np.ndarray
    St: np.ndarray

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True, eq=False)
class CurvatureBlocks:
    QQQQ: np.ndarray
    QQQP: np.ndarray
    QQPQ: np.ndarray
    QQPP: np.ndarray
    PPQQ: np.ndarray
    PPQP: np.ndarray
    PPPQ: np.ndarray
    PPPP: np.ndarray
    PQQQ: np.ndarray
    PQQP: np.ndarray
    PQPQ: np.ndarray
    PQPP: np.ndarray

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in BLOCK_NAMES}

    def max_abs_difference(self, other: CurvatureBlocks) -> float:
        return max(float(np.abs(getattr(self, b) - getattr(other, b)).max()) for b in BLOCK_NAMES)


# -- natural tensors a(t) A + b(t) u (x) v and their p-derivatives -----------


@dataclass(frozen=True, eq=False)
class _Natural:
    value: np.ndarray
    d: np.ndarray  # d[i, ...] = d/dp_i value[...]
    dd: np.ndarray  # dd[i, j, ...]


def _natural(a, b, A, u, U, v, V, g0, gi) -> _Natural:
    """``X_kl = a A_kl + b u_k v_l`` where ``d^i u_k = U[i, k]`` and ``d^i v_l = V[i, l]``.

    ``a`` and ``b`` are jets in ``t``; ``d^i t = g0^i``.
    """
    a0, a1, a2 = float(a[0]), float(a[1]), float(a[2])
    b0, b1, b2 = float(b[0]), float(b[1]), float(b[2])
    uv = np.outer(u, v)
    value = a0 * A + b0 * uv
    d = (
        a1 * np.einsum("i,kl->ikl", g0, A)
        + b1 * np.einsum("i,kl->ikl", g0, uv)
        + b0 * np.einsum("ik,l->ikl", U, v)
        + b0 * np.einsum("k,il->ikl", u, V)
    )
    g0g0 = np.outer(g0, g0)
    dd = (
        a2 * np.einsum("ij,kl->ijkl", g0g0, A)
        + a1 * np.einsum("ij,kl->ijkl", gi, A)
        + b2 * np.einsum("ij,kl->ijkl", g0g0, uv)
        + b1 * np.einsum("ij,kl->ijkl", gi, uv)
        + b1 * np.einsum("j,ik,l->ijkl", g0, U, v)
        + b1 * np.einsum("j,k,il->ijkl", g0, u, V)
        + b1 * np.einsum("i,jk,l->ijkl", g0, U, v)
        + b1 * np.einsum("i,k,jl->ijkl", g0, u, V)
        + b0 * np.einsum("jk,il->ijkl", U, V)
        + b0 * np.einsum("ik,jl->ijkl", U, V)
    )
    return _Natural(value, d, dd)


@dataclass(frozen=True, eq=False)
class _PointTensors:
    G1: _Natural
    G2: _Natural
    G3: _Natural
    H1: _Natural
    H2: _Natural
    H3: _Natural
    R: np.ndarray  # R[h, k, i, j] = R^h_kij, also d^h R0[k, i, j]
    R0: np.ndarray
    c3: tuple  # (c3, c3')
    g0: np.ndarray


def _point_tensors(ps: PointStructure) -> _PointTensors:
    pt, C = ps.point, ps.coeffs
    g, gi, p, g0 = pt.base.g, pt.base.g_inv, pt.p, pt.g0
    eye = np.eye(pt.n)

    def lower(a, b):
        return _natural(a, b, g, p, eye, p, eye, g0, gi)

    def upper(a, b):
        return _natural(a, b, gi, g0, gi, g0, gi, g0, gi)

    def mixed(a, b):
        return _natural(a, b, eye, g0, gi, p, eye, g0, gi)

    return _PointTensors(
        G1=lower(C.c1, C.d1),
        G2=upper(C.c2, C.d2),
        G3=mixed(C.c3, C.d3),
        H1=upper(C.e1, C.f1),
        H2=lower(C.e2, C.f2),
        H3=mixed(C.e3, C.f3),
        R=pt.base.riemann,
        R0=pt.r0,
        c3=(float(C.c3[0]), float(C.c3[1])),
        g0=g0,
    )


# -- connection blocks as multilinear maps -------------------------------------
# Each helper is linear in every array argument.  Arguments may carry one
# extra leading axis (a p-derivative index); einsum's ellipsis broadcasts it.


def _ein(spec, *ops):
    return np.einsum(spec, *ops)


def _vv(dG2):  # 1/2 (d^i G2^jk + d^j G2^ik - d^k G2^ij)
    return 0.5 * (dG2 + _ein("...jik->...ijk", dG2) - _ein("...kij->...ijk", dG2))


def _vh(dG3):  # 1/2 (d^i G3^j_k + d^j G3^i_k)
    return 0.5 * (dG3 + _ein("...jik->...ijk", dG3))


def _pv(dG3):  # [j, i, k] = 1/2 (d^i G3^k_j - d^k G3^i_j)
    return 0.5 * (_ein("...ikj->...jik", dG3) - _ein("...kij->...jik", dG3))


def _ph(dG1, R0, G2):  # [j, i, k] = 1/2 (d^i G1_jk - R0_ljk G2^li)
    return 0.5 * (_ein("...ijk->...jik", dG1) - _ein("...ljk,...li->...jik", R0, G2))


def _sv(R0, G2, dG1):  # [i, j, k] = 1/2 (R0_lij G2^lk - d^k G1_ij)
    return 0.5 * (_ein("...lij,...lk->...ijk", R0, G2) - _ein("...kij->...ijk", dG1))


def _to_vertical(X, Y, H2, H3):  # X^k H2_kh + Y_k H3^k_h
    return _ein("...abk,...kh->...abh", X, H2) + _ein("...abk,...kh->...abh", Y, H3)


def _to_horizontal(X, Y, H3, H1):  # X^k H3^h_k + Y_k H1^kh
    return _ein("...abk,...hk->...abh", X, H3) + _ein("...abk,...kh->...abh", Y, H1)


def connection_blocks(ps: PointStructure, tensors: _PointTensors | None = None) -> ConnectionBlocks:
    T = tensors or _point_tensors(ps)
    c3 = T.c3[0]
    vv, vh = _vv(T.G2.d), _vh(T.G3.d)
    pv, ph = _pv(T.G3.d), _ph(T.G1.d, T.R0, T.G2.value)
    sv, sh = _sv(T.R0, T.G2.value, T.G1.d), -c3 * T.R0
    H1, H2, H3 = T.H1.value, T.H2.value, T.H3.value
    return ConnectionBlocks(
        Q=_to_vertical(vv, vh, H2, H3),
        Qt=_to_horizontal(vv, vh, H3, H1),
        P=_to_horizontal(pv, ph, H3, H1),
        Pt=_to_vertical(pv, ph, H2, H3),
        S=_to_vertical(sv, sh, H2, H3),
        St=_to_horizontal(sv, sh, H3, H1),
    )


def connection_block_derivatives(ps: PointStructure, tensors: _PointTensors | None = None) -> ConnectionBlocks:
    """p-derivatives of the connection blocks; a leading axis ``m`` means ``d/dp_m``.

    Every block is a sum of products, so the derivative is the product rule
    applied factor by factor with the closed-form derivatives of the metric,
    inverse metric and ``R0`` (``d^m R0_ljk = R^m_ljk``).
    """
    T = tensors or _point_tensors(ps)
    c3, c3p = T.c3
    G1, G2, G3, H1, H2, H3 = T.G1, T.G2, T.G3, T.H1, T.H2, T.H3
    R0, dR0 = T.R0, T.R

    vv, vh = _vv(G2.d), _vh(G3.d)
    dvv, dvh = _vv(G2.dd), _vh(G3.dd)
    pv, ph = _pv(G3.d), _ph(G1.d, R0, G2.value)
    dpv = _pv(G3.dd)
    dph = 0.5 * _ein("mijk->mjik", G1.dd) - 0.5 * _ein("mljk,li->mjik", dR0, G2.value) - 0.5 * _ein("ljk,mli->mjik", R0, G2.d)
    sv, sh = _sv(R0, G2.value, G1.d), -c3 * R0
    dsv = 0.5 * _ein("mlij,lk->mijk", dR0, G2.value) + 0.5 * _ein("lij,mlk->mijk", R0, G2.d) - 0.5 * _ein("mkij->mijk", G1.dd)
    dsh = -c3p * _ein("m,ijk->mijk", T.g0, R0) - c3 * dR0

    def d_vertical(X, dX, Y, dY):
        return _to_vertical(dX, dY, H2.value, H3.value) + _to_vertical(X, Y, H2.d, H3.d)

    def d_horizontal(X, dX, Y, dY):
        return _to_horizontal(dX, dY, H3.value, H1.value) + _to_horizontal(X, Y, H3.d, H1.d)

    return ConnectionBlocks(
        Q=d_vertical(vv, dvv, vh, dvh),
        Qt=d_horizontal(vv, dvv, vh, dvh),
        P=d_horizontal(pv, dpv, ph, dph),
        Pt=d_vertical(pv, dpv, ph, dph),
        S=d_vertical(sv, dsv, sh, dsh),
        St=d_horizontal(sv, dsv, sh, dsh),
    )


def curvature_blocks(ps: PointStructure, conn: ConnectionBlocks | None = None, dconn: ConnectionBlocks | None = None) -> CurvatureBlocks:
    if conn is None or dconn is None:
        T = _point_tensors(ps)
        conn = conn or connection_blocks(ps, T)
        dconn = dconn or connection_block_derivatives(ps, T)
    Q, Qt, P, Pt, S, St = conn.Q, conn.Qt, conn.P, conn.Pt, conn.S, conn.St
    dQ, dQt, dP, dPt, dS, dSt = dconn.Q, dconn.Qt, dconn.P, dconn.Pt, dconn.S, dconn.St
    R, R0 = ps.point.base.riemann, ps.point.r0
    e = np.einsum

    QQQQ = (
        e("jkl,ilh->ijkh", St, St) + e("ilh,jkl->ijkh", P, S)
        - e("jlh,ikl->ijkh", St, St) - e("jlh,ikl->ijkh", P, S)
        - e("lij,klh->ijkh", R0, P) + e("hkij->ijkh", R)
    )  # fmt: skip
    QQQP = (
        e("jkl,ilh->ijkh", St, S) + e("ilh,jkl->ijkh", Pt, S)
        - e("ikl,jlh->ijkh", St, S) - e("jlh,ikl->ijkh", Pt, S)
        - e("klh,lij->ijkh", Pt, R0)
    )  # fmt: skip
    QQPQ = (
        e("jkl,ilh->ijkh", Pt, P) + e("jkl,ilh->ijkh", P, St)
        - e("ikl,jlh->ijkh", Pt, P) - e("ikl,jlh->ijkh", P, St)
        - e("lij,lkh->ijkh", R0, Qt)
    )  # fmt: skip
    QQPP = (
        e("jkl,ilh->ijkh", Pt, Pt) + e("jkl,ilh->ijkh", P, S)
        - e("ikl,jlh->ijkh", Pt, Pt) - e("ikl,jlh->ijkh", P, S)
        - e("lij,lkh->ijkh", R0, Q) - e("khij->ijkh", R)
    )  # fmt: skip
    PPQQ = (
        e("ikjh->ijkh", dP) - e("jkih->ijkh", dP)
        + e("kjl,ilh->ijkh", Pt, Qt) + e("kjl,lih->ijkh", P, P)
        - e("kil,jlh->ijkh", Pt, Qt) - e("kil,ljh->ijkh", P, P)
    )  # fmt: skip
    PPQP = (
        e("ikjh->ijkh", dPt) - e("jkih->ijkh", dPt)
        + e("kjl,ilh->ijkh", Pt, Q) + e("kjl,lih->ijkh", P, Pt)
        - e("kil,jlh->ijkh", Pt, Q) - e("kil,ljh->ijkh", P, Pt)
    )  # fmt: skip
    PPPQ = (
        dQt - e("jikh->ijkh", dQt)
        + e("jkl,ilh->ijkh", Q, Qt) + e("jkl,lih->ijkh", Qt, P)
        - e("ikl,jlh->ijkh", Q, Qt) - e("ikl,ljh->ijkh", Qt, P)
    )  # fmt: skip
    PPPP = (
        dQ - e("jikh->ijkh", dQ)
        + e("jkl,ilh->ijkh", Q, Q) + e("jkl,lih->ijkh", Qt, Pt)
        - e("ikl,jlh->ijkh", Q, Q) - e("ikl,ljh->ijkh", Qt, Pt)
    )  # fmt: skip
    PQQQ = (
        dSt + e("jkl,ilh->ijkh", S, Qt) + e("jkl,lih->ijkh", St, P)
        - e("kil,jlh->ijkh", Pt, P) - e("kil,jlh->ijkh", P, St)
    )  # fmt: skip
    PQQP = (
        dS + e("jkl,ilh->ijkh", S, Q) + e("jkl,lih->ijkh", St, Pt)
        - e("kil,jlh->ijkh", Pt, Pt) - e("kil,jlh->ijkh", P, S)
    )  # fmt: skip
    PQPQ = (
        dP + e("jkl,ilh->ijkh", Pt, Qt) + e("jkl,lih->ijkh", P, P)
        - e("ikl,jlh->ijkh", Q, P) - e("ikl,jlh->ijkh", Qt, St)
    )  # fmt: skip
    PQPP = (
        dPt + e("jkl,ilh->ijkh", Pt, Q) + e("jkl,lih->ijkh", P, Pt)
        - e("ikl,jlh->ijkh", Q, Pt) - e("ikl,jlh->ijkh", Qt, S)
    )  # fmt: skip
    return CurvatureBlocks(QQQQ, QQQP, QQPQ, QQPP, PPQQ, PPQP, PPPQ, PPPP, PQQQ, PQQP, PQPQ, PQPP)


def model_curvature_blocks(ps: PointStructure, k: float) -> CurvatureBlocks:
    """Blocks of the constant-holomorphic-curvature tensor ``K0`` with constant ``k``."""
    J, G = ps.J, ps.G
    J1, J2, J3 = J.J1, J.J2, J.J3
    G1, G2, G3 = G.G1, G.G2, G.G3
    d = np.eye(ps.point.n)
    e = np.einsum
    # G(J delta_j, delta_k), G(J delta_j, dp^k), G(J dp^j, delta_k), G(J dp^j, dp^k)
    A = J1 @ G3 - J3.T @ G1
    B = J1 @ G2 - J3.T @ G3.T
    C = J3 @ G3 - J2 @ G1
    E = J3 @ G2 - J2 @ G3.T
    s = k / 4.0

    QQQQ = s * (
        e("jk,ih->ijkh", G1, d) - e("ik,jh->ijkh", G1, d)
        - e("hi,jk->ijkh", J3, A) + e("hj,ik->ijkh", J3, A) - 2 * e("hk,ji->ijkh", J3, A)
    )  # fmt: skip
    QQQP = s * (e("ih,jk->ijkh", J1, A) - e("jh,ik->ijkh", J1, A) + 2 * e("kh,ji->ijkh", J1, A))
    QQPQ = s * (
        e("kj,ih->ijkh", G3, d) - e("ki,jh->ijkh", G3, d)
        - e("hi,jk->ijkh", J3, B) + e("hj,ik->ijkh", J3, B) - 2 * e("kh,ji->ijkh", J2, A)
    )  # fmt: skip
    QQPP = s * (e("ih,jk->ijkh", J1, B) - e("jh,ik->ijkh", J1, B) + 2 * e("kh,ji->ijkh", J3, A))
    PPQQ = s * (-e("ih,jk->ijkh", J2, C) + e("jh,ik->ijkh", J2, C) - 2 * e("hk,ji->ijkh", J3, E))
    PPQP = s * (
        e("jk,ih->ijkh", G3, d) - e("ik,jh->ijkh", G3, d)
        + e("ih,jk->ijkh", J3, C) - e("jh,ik->ijkh", J3, C) + 2 * e("kh,ji->ijkh", J1, E)
    )  # fmt: skip
    PPPQ = s * (-e("ih,jk->ijkh", J2, E) + e("jh,ik->ijkh", J2, E) - 2 * e("kh,ji->ijkh", J2, E))
    PPPP = s * (
        e("jk,ih->ijkh", G2, d) - e("ik,jh->ijkh", G2, d)
        + e("ih,jk->ijkh", J3, E) - e("jh,ik->ijkh", J3, E) + 2 * e("kh,ji->ijkh", J3, E)
    )  # fmt: skip
    PQQQ = s * (
        -e("ik,jh->ijkh", G3, d) - e("ih,jk->ijkh", J2, A)
        + e("hj,ik->ijkh", J3, C) - 2 * e("hk,ji->ijkh", J3, B)
    )  # fmt: skip
    PQQP = s * (
        e("jk,ih->ijkh", G1, d) + e("ih,jk->ijkh", J3, A)
        - e("jh,ik->ijkh", J1, C) + 2 * e("kh,ji->ijkh", J1, B)
    )  # fmt: skip
    PQPQ = s * (
        -e("ik,jh->ijkh", G2, d) - e("ih,jk->ijkh", J2, B)
        + e("hj,ik->ijkh", J3, E) - 2 * e("kh,ji->ijkh", J2, B)
    )  # fmt: skip
    PQPP = s * (
        e("kj,ih->ijkh", G3, d) + e("ih,jk->ijkh", J3, B)
        - e("jh,ik->ijkh", J1, E) + 2 * e("kh,ji->ijkh", J3, B)
    )  # fmt: skip
    return CurvatureBlocks(QQQQ, QQQP, QQPQ, QQPP, PPQQ, PPQP, PPPQ, PPPP, PQQQ, PQQP, PQPQ, PQPP)


def model_curvature_tensor(J: np.ndarray, G: np.ndarray, k: float) -> np.ndarray:
    """Full ``K0`` on a frame: ``out[A, B, C, D]`` is the ``A`` component of ``K0(E_C, E_D) E_B``.

    ``J[A, B]`` holds the components of ``J E_B``; ``G`` is the frame metric.
    """
    eye = np.eye(G.shape[0])
    JtG = J.T @ G  # [D, B] = G(J E_D, E_B)
    GJ = G @ J  # [C, D] = G(E_C, J E_D)
    return (k / 4.0) * (
        np.einsum("db,ac->abcd", G, eye)
        - np.einsum("cb,ad->abcd", G, eye)
        + np.einsum("db,ac->abcd", JtG, J)
        - np.einsum("cb,ad->abcd", JtG, J)
        + 2.0 * np.einsum("cd,ab->abcd", GJ, J)
    )


def split_blocks(tensor: np.ndarray, n: int) -> CurvatureBlocks:
    """Cut a frame tensor ``out[A, B, C, D]`` (as above) into the twelve blocks."""
    off = {"Q": 0, "P": n}
    blocks = {}
    for name in BLOCK_NAMES:
        x, y, z, w = (off[ch] for ch in name)
        sub = tensor[w : w + n, z : z + n, x : x + n, y : y + n]  # [h, k, i, j]
        blocks[name] = np.einsum("hkij->ijkh", sub)
    return CurvatureBlocks(**blocks)


def join_blocks(blocks: CurvatureBlocks, n: int) -> np.ndarray:
    """Inverse of :func:`split_blocks` for tensors antisymmetric in ``C, D``."""
    off = {"Q": 0, "P": n}
    out = np.zeros((2 * n,) * 4)
    for name in BLOCK_NAMES:
        x, y, z, w = (off[ch] for ch in name)
        sub = np.einsum("ijkh->hkij", getattr(blocks, name))
        out[w : w + n, z : z + n, x : x + n, y : y + n] = sub
        if name[0] != name[1]:
            out[w : w + n, z : z + n, y : y + n, x : x + n] = -np.einsum("hkij->hkji", sub)
    return out


def model_curvature_assembled(ps: PointStructure, k: float) -> CurvatureBlocks:
    return split_blocks(model_curvature_tensor(ps.J.matrix(), ps.G.matrix(), k), ps.point.n)


def curvature_difference(ps: PointStructure, k: float) -> float:
    """Largest entry of ``K - K0`` over all twelve blocks."""
    return curvature_blocks(ps).max_abs_difference(model_curvature_blocks(ps, k))
