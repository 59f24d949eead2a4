"""Truncated derivative jets in one variable.

A :class:`Jet` stores ``(f, f', f'', ...)`` at a point.  Arithmetic works on
derivatives directly through the Leibniz rule, so integer and
:class:`fractions.Fraction` inputs stay exact.
"""

from __future__ import annotations

import math
from numbers import Number
from typing import Sequence

from .errors import DomainError

MAX_ORDER = 4
RECIPROCAL_TOL = 1e-12


class Jet:
    """Value and the first ``order`` derivatives of a scalar function.

    Binary operations truncate to the smaller order of the two operands.
    """

    __slots__ = ("_d",)

    def __init__(self, derivs: Sequence):
        if len(derivs) == 0:
            raise ValueError("a jet needs at least a value")
        self._d = tuple(derivs)

    @classmethod
    def constant(cls, value, order: int = MAX_ORDER) -> Jet:
        zero = value - value
        return cls((value,) + (zero,) * order)

    @classmethod
    def variable(cls, t, order: int = MAX_ORDER) -> Jet:
        zero = t - t
        one = zero + 1
        d = [t, one] + [zero] * (order - 1)
        return cls(d[: order + 1])

    @property
    def order(self) -> int:
        return len(self._d) - 1

    @property
    def derivs(self) -> tuple:
        return self._d

    def __getitem__(self, k: int):
        return self._d[k]

    def __len__(self) -> int:
        return len(self._d)

    def __iter__(self):
        return iter(self._d)

    @property
    def value(self):
        return self._d[0]

    d0 = property(lambda self: self._d[0])
    d1 = property(lambda self: self._d[1])
    d2 = property(lambda self: self._d[2])
    d3 = property(lambda self: self._d[3])
    d4 = property(lambda self: self._d[4])

    def truncate(self, order: int) -> Jet:
        return Jet(self._d[: order + 1])

    def derivative(self) -> Jet:
        """Jet of ``f'``; one order shorter."""
        if self.order == 0:
            raise ValueError("cannot differentiate an order-0 jet")
        return Jet(self._d[1:])

    def _coerce(self, other) -> Jet | None:
        if isinstance(other, Jet):
            return other
        if isinstance(other, Number):
            return Jet.constant(other, self.order)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        m = min(self.order, o.order)
        return Jet([a + b for a, b in zip(self._d[: m + 1], o._d[: m + 1])])

    __radd__ = __add__

    def __neg__(self) -> Jet:
        return Jet([-a for a in self._d])

    def __pos__(self) -> Jet:
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, Number):
            return Jet([a * other for a in self._d])
        if not isinstance(other, Jet):
            return NotImplemented
        m = min(self.order, other.order)
        f, g = self._d, other._d
        out = []
        for n in range(m + 1):
            s = f[0] * g[n]
            for k in range(1, n + 1):
                s = s + math.comb(n, k) * f[k] * g[n - k]
            out.append(s)
        return Jet(out)

    __rmul__ = __mul__

    def reciprocal(self) -> Jet:
        f = self._d
        if abs(f[0]) <= RECIPROCAL_TOL:
            raise DomainError(f"reciprocal of a value within {RECIPROCAL_TOL:g} of zero: {f[0]!r}")
        inv0 = 1 / f[0]
        h = [inv0]
        for n in range(1, len(f)):
            s = f[n] * h[0]
            for k in range(1, n):
                s = s + math.comb(n, k) * f[k] * h[n - k]
            h.append(-s * inv0)
        return Jet(h)

    def __truediv__(self, other):
        if isinstance(other, Number):
            return Jet([a / other for a in self._d])
        if not isinstance(other, Jet):
            return NotImplemented
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.reciprocal()

    def __pow__(self, n: int) -> Jet:
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return (self ** (-n)).reciprocal()
        result = Jet.constant(self._d[0] - self._d[0] + 1, self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def exp(self) -> Jet:
        f = self._d
        h = [math.exp(f[0])]
        for n in range(1, len(f)):
            s = 0.0
            for k in range(n):
                s = s + math.comb(n - 1, k) * f[k + 1] * h[n - 1 - k]
            h.append(s)
        return Jet(h)

    def __eq__(self, other) -> bool:
        if isinstance(other, Jet):
            return self._d == other._d
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._d)

    def __repr__(self) -> str:
        return f"Jet{self._d!r}"

    def __float__(self) -> float:
        return float(self._d[0])

    def as_floats(self) -> tuple[float, ...]:
        return tuple(float(a) for a in self._d)
