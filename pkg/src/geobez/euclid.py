"""Euclidean curve machinery: the flat-plane oracle used throughout the tests.

Everything here works on plain ``(n, d)`` float arrays and has no notion of a
mesh. The manifold schemes must reproduce these curves exactly on planar
meshes, which is what most of the test suite checks.
"""

from __future__ import annotations

from math import comb

import numpy as np


def bernstein_weights(k: int, t: float) -> np.ndarray:
    """Bernstein basis values ``B_i^k(t)`` for ``i = 0..k``."""
    t = float(t)
    return np.array([comb(k, i) * t**i * (1.0 - t) ** (k - i) for i in range(k + 1)])


def bezier_eval(points: np.ndarray, t: float) -> np.ndarray:
    """Evaluate a Bezier curve in Bernstein form at parameter ``t``."""
    points = np.asarray(points, dtype=float)
    k = len(points) - 1
    return bernstein_weights(k, t) @ points


def decasteljau_eval(points: np.ndarray, t: float) -> np.ndarray:
    """Evaluate by the De Casteljau recursion (pairwise affine averages)."""
    pts = np.asarray(points, dtype=float).copy()
    n = len(pts)
    for r in range(1, n):
        pts[: n - r] = (1.0 - t) * pts[: n - r] + t * pts[1 : n - r + 1]
    return pts[0]


def decasteljau_split(points: np.ndarray, t: float = 0.5) -> tuple[np.ndarray, np.ndarray]:
    """Subdivide a Bezier control polygon at ``t`` into left/right polygons."""
    pts = np.asarray(points, dtype=float).copy()
    n = len(pts)
    left = [pts[0].copy()]
    right = [pts[-1].copy()]
    for r in range(1, n):
        pts[: n - r] = (1.0 - t) * pts[: n - r] + t * pts[1 : n - r + 1]
        left.append(pts[0].copy())
        right.append(pts[n - r - 1].copy())
    return np.array(left), np.array(right[::-1])


def degree_elevate(points: np.ndarray) -> np.ndarray:
    """Rewrite a degree-k polygon as the equivalent degree-(k+1) polygon."""
    pts = np.asarray(points, dtype=float)
    k = len(pts) - 1
    out = [pts[0]]
    for i in range(1, k + 1):
        w = i / (k + 1)
        out.append(w * pts[i - 1] + (1.0 - w) * pts[i])
    out.append(pts[-1])
    return np.array(out)


def open_uniform_knots(k: int, level: int) -> np.ndarray:
    """Knot vector of the open-uniform refinement at a given level.

    Level ``n`` has ``2**n`` uniform non-empty spans on [0, 1] with the end
    knots repeated ``k + 1`` times.
    """
    interior = np.arange(1, 2**level) / 2**level
    return np.concatenate([np.zeros(k + 1), interior, np.ones(k + 1)])


def deboor_eval(points: np.ndarray, knots: np.ndarray, t: float) -> np.ndarray:
    """De Boor evaluation of one B-spline span.

    ``points`` are the k+1 control points of the span and ``knots`` the 2k
    knots surrounding it (the span itself is ``[knots[k-1], knots[k]]``).
    """
    d = [np.asarray(p, dtype=float).copy() for p in points]
    k = len(d) - 1
    u = np.asarray(knots, dtype=float)
    if len(u) != 2 * k:
        raise ValueError("expected 2k local knots")
    for r in range(1, k + 1):
        for i in range(k, r - 1, -1):
            den = u[i + k - r] - u[i - 1]
            alpha = 0.0 if den == 0.0 else (t - u[i - 1]) / den
            d[i] = (1.0 - alpha) * d[i - 1] + alpha * d[i]
    return d[k]


def bspline_eval(points: np.ndarray, knots: np.ndarray, k: int, t: float) -> np.ndarray:
    """Evaluate a full B-spline curve (Cox-de Boor via basis recursion)."""
    points = np.asarray(points, dtype=float)
    knots = np.asarray(knots, dtype=float)
    # find span: largest s with knots[s] <= t < knots[s+1] (clamp at the right end)
    s = int(np.searchsorted(knots, t, side="right") - 1)
    s = min(max(s, k), len(points) - 1)
    local = points[s - k : s + 1]
    win = knots[s - k + 1 : s + k + 1]
    return deboor_eval(local, win, t)


def polyline_min_distance(p: np.ndarray, samples: np.ndarray) -> float:
    """Min distance from point ``p`` to a densely sampled curve polyline."""
    p = np.asarray(p, dtype=float)
    seg = samples[1:] - samples[:-1]
    rel = p[None, :] - samples[:-1]
    denom = np.einsum("ij,ij->i", seg, seg)
    denom[denom == 0.0] = 1.0
    w = np.clip(np.einsum("ij,ij->i", rel, seg) / denom, 0.0, 1.0)
    proj = samples[:-1] + w[:, None] * seg
    return float(np.min(np.linalg.norm(proj - p, axis=1)))
