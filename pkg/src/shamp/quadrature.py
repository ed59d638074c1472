"""Composite Gauss-Legendre building blocks.

Meshes are described by panel edge arrays; :func:`panel_nodes` turns edges
into per-panel nodes and weights of shape ``(n_panels, order)`` so that the
accelerated kernels can return per-panel partial integrals.
"""
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def gauss_legendre(order):
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def panel_nodes(edges, order):
    """Nodes and weights of the composite rule on ``edges``."""
    e = np.asarray(edges, dtype=float)
    x, w = gauss_legendre(order)
    half = 0.5 * np.diff(e)[:, None]
    mid = 0.5 * (e[1:] + e[:-1])[:, None]
    return mid + half * x[None, :], half * w[None, :]


def bisect_edges(edges, times=1):
    """Split every panel into ``2**times`` equal parts."""
    e = np.asarray(edges, dtype=float)
    for _ in range(times):
        mid = 0.5 * (e[1:] + e[:-1])
        out = np.empty(2 * e.size - 1)
        out[0::2] = e
        out[1::2] = mid
        e = out
    return e


def graded_points(a, b, h_min, ratio=2.0, left=True, right=True):
    """Edges on ``[a, b]`` refined geometrically toward the graded ends.

    Panel widths shrink by ``ratio`` per panel toward a graded end until
    they fall below ``h_min``.
    """
    if not b > a:
        raise ValueError("need b > a")
    if left and right:
        m = 0.5 * (a + b)
        lo = graded_points(a, m, h_min, ratio, True, False)
        hi = graded_points(m, b, h_min, ratio, False, True)
        return np.concatenate([lo, hi[1:]])
    if not (left or right):
        return np.array([a, b], dtype=float)
    L = b - a
    n = max(int(np.ceil(np.log(L / h_min) / np.log(ratio))), 0) if L > h_min else 0
    d = L * ratio ** -np.arange(n + 1, dtype=float)
    if left:
        return np.concatenate([[a], a + d[::-1]])
    return np.concatenate([b - d, [b]])


def merge_edges(*arrays, tol=0.0):
    """Sorted union of edge arrays with (near-)duplicates removed."""
    e = np.unique(np.concatenate([np.asarray(a, dtype=float).ravel() for a in arrays]))
    if tol > 0 and e.size > 1:
        keep = np.concatenate([[True], np.diff(e) > tol * np.maximum(1.0, np.abs(e[1:]))])
        e = e[keep]
    return e


def geometric_lattice(lo, hi, n):
    """``n`` geometrically spaced points from ``lo`` to ``hi`` inclusive."""
    return np.geomspace(lo, hi, n)


def adaptive_gl(f, a, b, rtol=1e-10, atol=0.0, order=10, max_depth=40):
    """Adaptive bisection with a Gauss-Legendre panel rule.

    Returns ``(value, error_estimate, converged)``.  A panel is accepted once
    the rule on the panel and on its two halves agree to within the local
    share of the tolerance.
    """
    x, w = gauss_legendre(order)

    def rule(lo, hi):
        h = 0.5 * (hi - lo)
        return h * np.dot(w, f(0.5 * (lo + hi) + h * x))

    total = rule(a, b)
    stack = [(a, b, total, 0)]
    value = 0.0
    err = 0.0
    ok = True
    while stack:
        lo, hi, whole, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        left, right = rule(lo, mid), rule(mid, hi)
        e = abs(left + right - whole)
        share = (hi - lo) / (b - a)
        if e <= max(rtol * abs(total), atol) * share or depth >= max_depth:
            if depth >= max_depth and e > max(rtol * abs(total), atol) * share:
                ok = False
            value += left + right
            err += e
        else:
            stack.append((lo, mid, left, depth + 1))
            stack.append((mid, hi, right, depth + 1))
    return value, err, ok
