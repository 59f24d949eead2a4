"""Coefficient functions of the lifted complex structure and metric.

Everything here is a function of the energy density ``t`` only.  The free
data are the profiles ``a1``, ``a3`` and ``lambda``; the rest follows:

* ``a2`` from ``a1 a2 = 1 + a3^2``,
* ``b1, b2, b3`` from the integrability conditions over a base of constant
  sectional curvature ``c``,
* ``c_i, d_i`` from the Hermitian proportionality relations with
  ``mu = lambda'`` (the Kähler condition),
* ``e_i, f_i``, the coefficients of the inverse metric.

All quantities are carried as :class:`~natlift.jets.Jet` so their
``t``-derivatives are exact.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import (
    DegenerateDenominator,
    IndefiniteMetric,
    NonpositiveA1,
    NonpositiveLambda,
    ZeroCurvature,
    ZeroHolomorphicCurvature,
)
from .jets import MAX_ORDER, Jet
from .profiles import T, ScalarExpr, as_profile, eval_jet

DENOMINATOR_TOL = 1e-10


@dataclass(frozen=True)
class CoefficientBundle:
    """Jets of the complex-structure coefficients at one value of ``t``."""

    a1: Jet
    a2: Jet
    a3: Jet
    a4: Jet
    b1: Jet
    b2: Jet
    b3: Jet
    b4: Jet
    c: float
    t: float

    def relation_residuals(self) -> tuple[float, float]:
        """Relative residuals of the two almost-complex relations.

        ``a1 a2 = 1 + a3^2`` and
        ``(a1 + 2t b1)(a2 + 2t b2) = 1 + (a3 + 2t b3)^2``.
        """
        t = self.t
        a1, a2, a3 = self.a1[0], self.a2[0], self.a3[0]
        b1, b2, b3 = self.b1[0], self.b2[0], self.b3[0]
        rhs1 = 1 + a3 * a3
        rhs2 = 1 + (a3 + 2 * t * b3) ** 2
        r1 = abs(a1 * a2 - rhs1) / abs(rhs1)
        r2 = abs((a1 + 2 * t * b1) * (a2 + 2 * t * b2) - rhs2) / abs(rhs2)
        return float(r1), float(r2)


@dataclass(frozen=True)
class MetricCoefficients:
    """Jets of the metric coefficients and of its inverse at one ``t``."""

    c1: Jet
    c2: Jet
    c3: Jet
    d1: Jet
    d2: Jet
    d3: Jet
    e1: Jet
    e2: Jet
    e3: Jet
    f1: Jet
    f2: Jet
    f3: Jet
    lam: Jet
    mu: Jet
    t: float


def _check_a1(a1: Jet):
    if not a1[0] > 0:
        raise NonpositiveA1(f"a1(t) must be positive, got {float(a1[0]):.6g}")


def complex_coefficients(a1, a3, c, t, order: int = MAX_ORDER) -> CoefficientBundle:
    """Solve for ``a2`` and the integrable ``b1, b2, b3`` at ``t``.

    The ``b``-jets are one order shorter than ``order`` because they involve
    first derivatives of ``a1, a2, a3``.
    """
    a1, a3 = as_profile(a1), as_profile(a3)
    tj = Jet.variable(t, order)
    A1 = eval_jet(a1, t, order)
    A3 = eval_jet(a3, t, order)
    _check_a1(A1)
    A2 = (1 + A3 * A3) / A1
    return _integrable_bundle(A1, A2, A3, tj, c, t)


def _integrable_bundle(A1: Jet, A2: Jet, A3: Jet, tj: Jet, c, t) -> CoefficientBundle:
    full = (A1, A2, A3)
    A1p, A2p, A3p = A1.derivative(), A2.derivative(), A3.derivative()

    den = A1 - 2 * tj * A1p - 2 * c * tj * A2 - 4 * c * tj * tj * A2p
    if abs(den[0]) <= DENOMINATOR_TOL:
        raise DegenerateDenominator(f"integrability denominator vanishes at t={float(t):.6g}")
    inv = den.reciprocal()
    b1 = (2 * c * c * tj * A2 * A2 + 2 * c * tj * A1 * A2p + A1 * A1p - c + 3 * c * A3 * A3) * inv
    b2 = (2 * tj * A3p * A3p - 2 * tj * A1p * A2p + c * A2 * A2 + 2 * c * tj * A2 * A2p + A1 * A2p) * inv
    b3 = (A1 * A3p + 2 * c * A2 * A3 + 4 * c * tj * A2p * A3 - 2 * c * tj * A2 * A3p) * inv

    if not (A1 + 2 * tj * b1)[0] > 0:
        raise NonpositiveA1(f"a1 + 2t b1 must be positive, got {float((A1 + 2 * tj * b1)[0]):.6g} at t={float(t):.6g}")
    A1, A2, A3 = full
    return CoefficientBundle(A1, A2, A3, -A3, b1, b2, b3, -b3, c, t)


def perturb_bundle(bundle: CoefficientBundle, which: str, amount: float) -> CoefficientBundle:
    """Shift one coefficient while keeping ``J`` an almost complex structure.

    ``which`` is ``"a3"``, ``"b1"`` or ``"b3"``.  For ``a3`` the value of
    ``a2`` is re-solved from ``a1 a2 = 1 + a3^2``; in every case ``b2`` is
    re-solved from the second almost-complex relation.  The ``b``'s no longer
    satisfy the integrability conditions, so ``J`` stops being integrable.
    """
    t = bundle.t
    m = bundle.b1.order
    tj = Jet.variable(t, m)
    a1, a2, a3 = bundle.a1.truncate(m), bundle.a2.truncate(m), bundle.a3.truncate(m)
    b1, b3 = bundle.b1, bundle.b3
    if which == "a3":
        a3 = a3 + amount
        a2 = (1 + a3 * a3) / a1
    elif which == "b1":
        b1 = b1 + amount
    elif which == "b3":
        b3 = b3 + amount
    else:
        raise ValueError(f"cannot perturb {which!r}; choose a3, b1 or b3")
    b2 = (2 * a3 * b3 - a2 * b1 + 2 * tj * b3 * b3) / (a1 + 2 * tj * b1)
    return replace(bundle, a2=a2, a3=a3, a4=-a3, b1=b1, b2=b2, b3=b3, b4=-b3)


def metric_coefficients(bundle: CoefficientBundle, lam, t=None, mu=None) -> MetricCoefficients:
    """Metric coefficients compatible with ``bundle``.

    ``mu`` defaults to ``lambda'`` (Kähler).  Passing another profile gives an
    almost Hermitian structure whose fundamental form is not closed.
    """
    t = bundle.t if t is None else t
    order = bundle.a1.order
    tj = Jet.variable(t, order)
    L = eval_jet(as_profile(lam), t, order)
    M = L.derivative() if mu is None else eval_jet(as_profile(mu), t, order)
    if not L[0] > 0:
        raise NonpositiveLambda(f"lambda must be positive, got {float(L[0]):.6g} at t={float(t):.6g}")
    if not (L + 2 * tj * M)[0] > 0:
        raise NonpositiveLambda(f"lambda + 2t mu must be positive at t={float(t):.6g}")

    c1, c2, c3 = L * bundle.a1, L * bundle.a2, L * bundle.a3
    # d_i from (c_i + 2t d_i) = (lam + 2t mu)(a_i + 2t b_i), solved without dividing by t
    w = L + 2 * tj * M
    d1 = M * bundle.a1 + w * bundle.b1
    d2 = M * bundle.a2 + w * bundle.b2
    d3 = M * bundle.a3 + w * bundle.b3

    m = d1.order
    tj = tj.truncate(m)
    C1, C2, C3 = c1 + 2 * tj * d1, c2 + 2 * tj * d2, c3 + 2 * tj * d3
    if not (C1[0] > 0 and C2[0] > 0 and (C1 * C2 - C3 * C3)[0] > 0):
        raise IndefiniteMetric(f"metric coefficients are not positive definite at t={float(t):.6g}")

    det = c1 * c2 - c3 * c3
    e1, e2, e3 = c2 / det, c1 / det, -c3 / det
    e1, e2, e3 = e1.truncate(m), e2.truncate(m), e3.truncate(m)
    f1 = -(c2 * d1 * e1 - c3 * d3 * e1 - c3 * d2 * e3 + c2 * d3 * e3 + 2 * d1 * d2 * e1 * tj - 2 * d3 * d3 * e1 * tj) / (
        c1 * c2 - c3 * c3 + 2 * c2 * d1 * tj + 2 * c1 * d2 * tj - 4 * c3 * d3 * tj + 4 * d1 * d2 * tj * tj - 4 * d3 * d3 * tj * tj
    )
    big_det = C1 * C2 - C3 * C3
    num = (d3 * e1 + d2 * e3) * C1 - (d1 * e1 + d3 * e3) * C3
    f2 = C3 * num / (C2 * big_det) - (d2 * e2 + d3 * e3) / C2
    f3 = -num / big_det
    return MetricCoefficients(c1, c2, c3, d1, d2, d3, e1, e2, e3, f1, f2, f3, L, M, t)


def hsc_lambda_expr(a1, a3, c, k) -> ScalarExpr:
    """The proportionality factor giving constant holomorphic curvature ``k``.

    ``lambda = 4 a1 c / (k (a1^2 + 2 c t + 2 a3^2 c t))``
    """
    if k == 0:
        raise ZeroHolomorphicCurvature("holomorphic sectional curvature k must be nonzero")
    if c == 0:
        raise ZeroCurvature("a flat base gives lambda = 0; no Kähler metric has constant holomorphic curvature here")
    a1, a3 = as_profile(a1), as_profile(a3)
    return 4 * c * a1 / (k * (a1 * a1 + 2 * c * T + 2 * c * T * a3 * a3))


def lambda_constant_hsc(a1, a3, c, k, t, order: int = MAX_ORDER) -> Jet:
    """Jet of :func:`hsc_lambda_expr` at ``t``; raises if ``lambda <= 0``."""
    lam = eval_jet(hsc_lambda_expr(a1, a3, c, k), t, order)
    if not lam[0] > 0:
        raise NonpositiveLambda(f"lambda = {float(lam[0]):.6g} at t={float(t):.6g}; k must have the sign of c")
    return lam


def hsc_lambda_slope(a1, a3, c, lam_value, t):
    """First derivative of lambda forced by the constant-curvature condition.

    This is the independent first-order relation; it must agree with the
    derivative of :func:`hsc_lambda_expr`.
    """
    A1 = eval_jet(as_profile(a1), t, 1)
    A3 = eval_jet(as_profile(a3), t, 1)
    a1v, a1p, a3v, a3p = A1[0], A1[1], A3[0], A3[1]
    num = a1p * (a1v**2 - 2 * c * t - 2 * a3v**2 * c * t) + 2 * a1v * c * (1 + a3v**2 + 2 * a3v * a3p * t)
    den = a1v * (a1v**2 + 2 * c * t + 2 * a3v**2 * c * t)
    return -lam_value * num / den
