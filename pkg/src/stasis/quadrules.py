"""Shared quadrature machinery: Gauss node caches and vectorized panel sums.

Panel convention used by the oracle and the bound integrals: a partition is
an increasing array of edges; each panel is evaluated with 15-point
Gauss-Legendre, and the same panel re-evaluated with the 7-point rule gives
an embedded error estimate (sum over panels of |G15 - G7|).
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

__all__ = [
    "gauss_nodes",
    "jacobi_nodes_01",
    "panel_complex",
    "adaptive_complex",
    "geometric_edges",
]

_CHUNK = 200_000  # max evaluation points per vectorized call


@lru_cache(maxsize=32)
def gauss_nodes(n: int):
    x, w = roots_legendre(n)
    return x, w


@lru_cache(maxsize=64)
def jacobi_nodes_01(n: int, beta: float):
    """Nodes/weights for int_0^1 v**beta h(v) dv with h smooth, beta > -1.

    Returned weights already absorb the v**beta factor:
    the integral is sum(w * h(v)).
    """
    x, w = roots_jacobi(n, 0.0, beta)
    v = 0.5 * (x + 1.0)
    # (1+x)^beta weight on [-1,1]  ->  ((1+x)/2)^beta * 2^beta ; dv = dx/2
    return v, w * 0.5 * 2.0 ** (-beta)


def _eval_panels(f, edges, n):
    """Gauss sums of f over each panel [edges[i], edges[i+1]], chunked."""
    x, w = gauss_nodes(n)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    npan = mid.size
    out = np.empty(npan, dtype=complex)
    per = max(1, _CHUNK // n)
    for lo in range(0, npan, per):
        hi = min(npan, lo + per)
        pts = mid[lo:hi, None] + half[lo:hi, None] * x[None, :]
        vals = f(pts.ravel()).reshape(hi - lo, n)
        out[lo:hi] = half[lo:hi] * (vals @ w)
    return out

def panel_complex(f, edges):
    """Integrate complex-valued f over the partition given by ``edges``.

    Returns (value, per-panel error estimates |G15 - G7|).
    """
    edges = np.asarray(edges, dtype=float)
    i15 = _eval_panels(f, edges, 15)
    i7 = _eval_panels(f, edges, 7)
    return i15.sum(), np.abs(i15 - i7)


def adaptive_complex(f, edges, rel_tol, abs_floor=0.0, max_rounds=24,
                     max_panels=2_000_000):
    """Panel sum refined by splitting offending panels until the estimate
    meets rel_tol (relative to the accumulated value) or abs_floor.

    Returns (value, error_estimate, panel_count).
    """
    edges = np.asarray(edges, dtype=float)
    for _ in range(max_rounds):
        value, err = panel_complex(f, edges)
        tol = max(abs_floor, rel_tol * abs(value))
        if err.sum() <= tol or edges.size - 1 >= max_panels:
            return value, err.sum(), edges.size - 1
        # split every panel contributing more than its fair share
        bad = err > tol / max(1, err.size)
        if not bad.any():
            return value, err.sum(), edges.size - 1
        keep = [edges[0]]
        for i in range(edges.size - 1):
            if bad[i]:
                keep.append(0.5 * (edges[i] + edges[i + 1]))
            keep.append(edges[i + 1])
        edges = np.asarray(keep)
    value, err = panel_complex(f, edges)
    return value, err.sum(), edges.size - 1


def geometric_edges(a, b, first, ratio=2.0):
    """Edges of [a, b] starting with panel width ``first`` growing by
    ``ratio`` (used for boundary layers and decaying tails)."""
    if not (b > a):
        raise ValueError("need b > a")
    edges = [a]
    w = float(first)
    while edges[-1] + w < b:
        edges.append(edges[-1] + w)
        w *= ratio
    edges.append(b)
    return np.asarray(edges)
