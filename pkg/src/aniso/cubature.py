"""Tensor Gauss-Legendre rules on boxes and triangles, and convex polygon clipping.

Everything the rectangle-based norms and the trilinear functional need; nothing
general-purpose beyond that.
"""

from __future__ import annotations

import heapq
import itertools
import warnings
from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def gauss_legendre01(order: int):
    """Gauss-Legendre nodes and weights on [0, 1]."""
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (x + 1.0), 0.5 * w


def box_rule(lo, hi, order: int):
    """Tensor Gauss nodes (m, d) and weights (m,) on the box [lo, hi]."""
    lo = np.asarray(lo, float)
    hi = np.asarray(hi, float)
    t, w = gauss_legendre01(order)
    d = lo.size
    nodes = np.stack(np.meshgrid(*([t] * d), indexing="ij"), -1).reshape(-1, d)
    weights = np.prod(np.stack(np.meshgrid(*([w] * d), indexing="ij"), -1).reshape(-1, d), axis=1)
    return lo + nodes * (hi - lo), weights * np.prod(hi - lo)


def integrate_box(func, lo, hi, rtol: float = 1e-10, order: int = 8, max_boxes: int = 4000):
    """Adaptive tensor Gauss quadrature of ``func`` over a box.

    Each panel is estimated with orders ``order`` and ``2 * order``; the panel with
    the largest discrepancy is bisected along every axis until the summed
    discrepancy drops below ``rtol`` times the total. Returns ``(value, error)``.
    """
    lo = np.asarray(lo, float)
    hi = np.asarray(hi, float)

    def panel(a, b):
        x1, w1 = box_rule(a, b, order)
        x2, w2 = box_rule(a, b, 2 * order)
        coarse = np.dot(w1, func(x1))
        fine = np.dot(w2, func(x2))
        return fine, abs(fine - coarse)

    val, err = panel(lo, hi)
    heap = [(-err, 0, lo, hi, val)]
    total, total_err = val, err
    counter = itertools.count(1)
    nboxes = 1
    while total_err > rtol * abs(total) and total_err > 0:
        if nboxes >= max_boxes:
            warnings.warn(f"box quadrature hit the panel cap with relative error {total_err / abs(total):.2e}",
                          RuntimeWarning, stacklevel=2)
            break
        neg_err, _, a, b, v = heapq.heappop(heap)
        total -= v
        total_err += neg_err
        mid = 0.5 * (a + b)
        for corner in itertools.product((0, 1), repeat=lo.size):
            c = np.asarray(corner, bool)
            ca = np.where(c, mid, a)
            cb = np.where(c, b, mid)
            cv, ce = panel(ca, cb)
            total += cv
            total_err += ce
            heapq.heappush(heap, (-ce, next(counter), ca, cb, cv))
        nboxes += 2**lo.size - 1
    return float(total), float(total_err)


def triangle_rule(v0, v1, v2, order: int):
    """Collapsed (Duffy) Gauss rule on a planar triangle: nodes (m, 2), weights (m,)."""
    t, w = gauss_legendre01(order)
    s, u = np.meshgrid(t, t, indexing="ij")
    ws = np.outer(w, w)
    v0, v1, v2 = (np.asarray(v, float) for v in (v0, v1, v2))
    e1 = v1 - v0
    e2 = v2 - v1
    det = abs(e1[0] * e2[1] - e1[1] * e2[0])
    pts = v0 + s[..., None] * e1 + (s * u)[..., None] * e2
    return pts.reshape(-1, 2), (ws * s * det).reshape(-1)


def clip_halfplane(poly: np.ndarray, a: float, b: float, c: float) -> np.ndarray:
    """Part of a convex polygon (k, 2) where a*x + b*z >= c (Sutherland-Hodgman)."""
    if len(poly) == 0:
        return poly
    out = []
    vals = poly[:, 0] * a + poly[:, 1] * b - c
    k = len(poly)
    for i in range(k):
        p, q = poly[i], poly[(i + 1) % k]
        fp, fq = vals[i], vals[(i + 1) % k]
        if fp >= 0:
            out.append(p)
        if (fp >= 0) != (fq >= 0):
            t = fp / (fp - fq)
            out.append(p + t * (q - p))
    if not out:
        return np.zeros((0, 2))
    return _dedup(np.asarray(out))


def _dedup(poly: np.ndarray, tol: float = 1e-300) -> np.ndarray:
    keep = []
    for i, p in enumerate(poly):
        if not keep or np.max(np.abs(p - keep[-1])) > tol:
            keep.append(p)
    if len(keep) > 1 and np.max(np.abs(keep[0] - keep[-1])) <= tol:
        keep.pop()
    return np.asarray(keep)


def polygon_area(poly: np.ndarray) -> float:
    if len(poly) < 3:
        return 0.0
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def split_polygon(poly: np.ndarray, lines) -> list:
    """Cut a convex polygon by lines a*x + b*z = c; returns the nonempty convex pieces."""
    pieces = [poly]
    for a, b, c in lines:
        nxt = []
        for p in pieces:
            for sgn in (1.0, -1.0):
                q = clip_halfplane(p, sgn * a, sgn * b, sgn * c)
                if len(q) >= 3:
                    nxt.append(q)
        pieces = nxt
    ref = polygon_area(poly)
    return [p for p in pieces if polygon_area(p) > 1e-14 * ref]


def polygon_rule(poly: np.ndarray, order: int):
    """Fan triangulation of a convex polygon with a Duffy rule on each triangle."""
    nodes, weights = [], []
    for i in range(1, len(poly) - 1):
        x, w = triangle_rule(poly[0], poly[i], poly[i + 1], order)
        nodes.append(x)
        weights.append(w)
    return np.concatenate(nodes), np.concatenate(weights)
