"""Central finite differences with one Richardson level.

These are the numerical oracles: they only ever see plain component
functions ``f(z) -> ndarray``.  Stencils are fourth order; combining steps
``h`` and ``2h`` removes the leading ``h^4`` error term.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

DEFAULT_STEP = 1e-4
_C1 = ((-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0))  # / 12h
_C2 = ((-2, -1.0), (-1, 16.0), (0, -30.0), (1, 16.0), (2, -1.0))  # / 12h^2


def _steps(z: np.ndarray, rel: float) -> np.ndarray:
    return rel * np.maximum(1.0, np.abs(z))


def _d1(f, z, a, h):
    e = np.zeros_like(z)
    e[a] = h
    return sum(w * f(z + s * e) for s, w in _C1) / (12.0 * h)


def _d2(f, z, a, b, h_a, h_b):
    if a == b:
        e = np.zeros_like(z)
        e[a] = h_a
        return sum(w * f(z + s * e) for s, w in _C2) / (12.0 * h_a * h_a)
    ea = np.zeros_like(z)
    eb = np.zeros_like(z)
    ea[a] = h_a
    eb[b] = h_b
    out = 0.0
    for sa, wa in _C1:
        for sb, wb in _C1:
            out = out + wa * wb * f(z + sa * ea + sb * eb)
    return out / (144.0 * h_a * h_b)


def _richardson(fine, coarse):
    return (16.0 * fine - coarse) / 15.0


def jacobian(f: Callable[[np.ndarray], np.ndarray], z, rel_step: float = DEFAULT_STEP, richardson: bool = True) -> np.ndarray:
    """``out[..., a] = d f[...] / d z_a``."""
    z = np.asarray(z, dtype=float)
    h = _steps(z, rel_step)
    cols = []
    for a in range(z.size):
        d = _d1(f, z, a, h[a])
        if richardson:
            d = _richardson(d, _d1(f, z, a, 2 * h[a]))
        cols.append(np.asarray(d))
    return np.stack(cols, axis=-1)


def hessian(f: Callable[[np.ndarray], np.ndarray], z, rel_step: float = 1e-3, richardson: bool = True) -> np.ndarray:
    """``out[..., a, b] = d^2 f[...] / dz_a dz_b`` (symmetric in ``a, b``)."""
    z = np.asarray(z, dtype=float)
    h = _steps(z, rel_step)
    m = z.size
    cache = {}
    for a in range(m):
        for b in range(a, m):
            d = _d2(f, z, a, b, h[a], h[b])
            if richardson:
                d = _richardson(d, _d2(f, z, a, b, 2 * h[a], 2 * h[b]))
            cache[a, b] = cache[b, a] = np.asarray(d)
    rows = [np.stack([cache[a, b] for b in range(m)], axis=-1) for a in range(m)]
    return np.stack(rows, axis=-2)


def derivative(f: Callable[[float], float], x: float, step: float = DEFAULT_STEP) -> float:
    """Scalar first derivative, used for one-variable oracles."""
    g = lambda z: np.asarray(f(float(z[0])))
    return float(jacobian(g, np.array([x]), rel_step=step)[..., 0])


def nth_derivative(f: Callable[[float], float], x: float, order: int, step: float = 1e-2) -> float:
    """Derivative of order 1 or 2 of a scalar function by Richardson-extrapolated stencils."""
    if order == 1:
        return derivative(f, x, step)
    if order == 2:
        g = lambda z: np.asarray(f(float(z[0])))
        return float(hessian(g, np.array([x]), rel_step=step)[..., 0, 0])
    raise ValueError("only first and second derivatives are available")
