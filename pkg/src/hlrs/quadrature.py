"""Deterministic quadrature rules shared by the operator and model modules.

Everything here integrates over a half-line against an algebraic weight
``u**p`` (``p > -1``), which is the shape every Hadamard-type operator takes
after the logarithmic change of variables.  Rules are fixed-node Gauss rules on
geometrically growing panels, refined by uniform panel splitting.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

from .errors import NonIntegrableError, QuadratureError

__all__ = [
    "gauss_legendre",
    "gauss_jacobi_left",
    "halfline",
    "halfline_fixed",
    "composite_desingularized",
]

#: base panel edges in u; the first panel carries the singular weight
BASE_EDGES = (0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0)
#: extension used only to decide whether the tail actually decays
_PROBE_EDGES = (64.0, 128.0)


@lru_cache(maxsize=64)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights mapped to [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1.0) / 2.0, w / 2.0


@lru_cache(maxsize=256)
def gauss_jacobi_left(n: int, p: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights on [0, 1] exact for ``u**p * poly(u)``."""
    x, w = roots_jacobi(n, 0.0, p)
    return (x + 1.0) / 2.0, w / 2.0 ** (p + 1.0)


def _nodes(edges, p: float, level: int, n: int, breakpoints=()):
    """Flattened nodes and weights (weight ``u**p`` folded in) for one level."""
    cuts = sorted(set(edges) | {b for b in breakpoints if edges[0] < b < edges[-1]})
    xl, wl = gauss_legendre(n)
    xj, wj = gauss_jacobi_left(n, p)
    us, ws = [], []
    nsub = 2**level
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        h = (hi - lo) / nsub
        starts = lo + h * np.arange(nsub)
        if lo == 0.0:
            # u**p is exact on the first subpanel only
            us.append(h * xj)
            ws.append(h ** (p + 1.0) * wj)
            starts = starts[1:]
        if starts.size:
            u = (starts[:, None] + h * xl[None, :]).ravel()
            us.append(u)
            ws.append(np.tile(h * wl, starts.size) * u**p)
    return np.concatenate(us), np.concatenate(ws)


def _apply(g, p, level, n, breakpoints, edges):
    u, w = _nodes(tuple(edges), float(p), level, n, tuple(breakpoints))
    vals = np.asarray(g(u))
    return vals @ w, np.abs(vals) @ w


def halfline_fixed(g, p: float, *, level: int = 0, n: int = 16, breakpoints=(), edges=BASE_EDGES):
    """One fixed-resolution evaluation of ``int_0^U u**p g(u) du``.

    ``g`` must accept an ndarray of nodes and return values broadcastable to
    ``(..., len(nodes))``; the result has the leading shape of ``g``'s output.
    """
    return _apply(g, p, level, n, breakpoints, edges)[0]


def halfline(g, p: float, *, rtol: float = 1e-9, atol: float = 0.0, n: int = 16,
             breakpoints=(), max_level: int = 11, check_tail: bool = True,
             edges=BASE_EDGES):
    """Integrate ``u**p g(u)`` over ``(0, inf)`` to relative tolerance ``rtol``.

    Panels are the geometric :data:`BASE_EDGES`, each split into ``2**level``
    equal subpanels; ``level`` is raised until two successive estimates agree.
    With 7 base panels the cap ``max_level=11`` corresponds to 2**14 panels.
    Results that vanish by cancellation are accepted at ``1e-14`` of the
    integral of ``|g|``.
    """
    if p <= -1.0:
        raise NonIntegrableError(f"weight exponent {p} <= -1 is not integrable at 0")
    prev, _ = _apply(g, p, 0, n, breakpoints, edges)
    for level in range(1, max_level + 1):
        cur, mag = _apply(g, p, level, n, breakpoints, edges)
        slack = np.maximum(rtol * np.abs(cur), np.maximum(atol, 1e-14 * mag))
        if np.all(np.abs(cur - prev) <= slack):
            break
        prev = cur
    else:
        raise QuadratureError(f"no convergence to rtol={rtol} within 2**{max_level} subpanels")
    if check_tail:
        tail, _ = _apply(g, p, 0, n, (), _PROBE_EDGES)
        if np.any(np.abs(tail) > np.maximum(max(rtol, 1e-12) * np.abs(cur), 1e-14 * mag)):
            raise NonIntegrableError("integrand does not decay on the half-line")
    return cur


def composite_desingularized(g, p: float, upper: float, panels: int, n: int = 2):
    """Composite Gauss-Legendre for ``int_0^upper u**p g(u) du`` at a set resolution.

    Substitutes ``u = v**(1/(1+p))`` so the weight disappears, then applies
    ``panels`` equal panels of ``n``-point Gauss-Legendre on ``[0, upper**(1+p)]``.
    The error is algebraic in ``panels``, which is what convergence-order checks need.
    """
    q = 1.0 / (1.0 + p)
    vmax = upper ** (1.0 + p)
    xl, wl = gauss_legendre(n)
    h = vmax / panels
    v = (h * np.arange(panels)[:, None] + h * xl[None, :]).ravel()
    w = np.tile(h * wl, panels)
    return np.asarray(g(v**q)) @ w * q
