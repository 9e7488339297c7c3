"""Pure-Python fitness kernels. Same signatures as the compiled ``_ckernels``."""

from __future__ import annotations

import math

import numpy as np


def segment_hits_rect(ax, ay, bx, by, xmin, ymin, xmax, ymax):
    # Liang-Barsky clip of the closed segment against the closed box.
    dx = bx - ax
    dy = by - ay
    t0 = 0.0
    t1 = 1.0
    for p, q in ((-dx, ax - xmin), (dx, xmax - ax), (-dy, ay - ymin), (dy, ymax - ay)):
        if p == 0.0:
            if q < 0.0:
                return False
            continue
        r = q / p
        if p < 0.0:
            if r > t1:
                return False
            if r > t0:
                t0 = r
        else:
            if r < t0:
                return False
            if r < t1:
                t1 = r
    return True


def count_segment_hits(ax, ay, bx, by, rects):
    n = 0
    for xmin, ymin, xmax, ymax in np.asarray(rects, dtype=np.float64).reshape(-1, 4).tolist():
        if segment_hits_rect(ax, ay, bx, by, xmin, ymin, xmax, ymax):
            n += 1
    return n


def leg_matrices(points, rects):
    """Pairwise leg lengths and obstacle counts between ``points``."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2).tolist()
    boxes = np.asarray(rects, dtype=np.float64).reshape(-1, 4).tolist()
    n = len(pts)
    dist = [[0.0] * n for _ in range(n)]
    hits = [[0] * n for _ in range(n)]
    for i in range(n):
        ax, ay = pts[i]
        for j in range(i + 1, n):
            bx, by = pts[j]
            dx = bx - ax
            dy = by - ay
            # plain sqrt, not hypot: bit-identical to the compiled twin
            d = math.sqrt(dx * dx + dy * dy)
            c = 0
            for xmin, ymin, xmax, ymax in boxes:
                if segment_hits_rect(ax, ay, bx, by, xmin, ymin, xmax, ymax):
                    c += 1
            dist[i][j] = dist[j][i] = d
            hits[i][j] = hits[j][i] = c
    return np.array(dist, dtype=np.float64).reshape(n, n), np.array(hits, dtype=np.int64).reshape(n, n)


def population_sums(dist, hits, orders, origin):
    """Route totals for every row of ``orders`` (location indices), starting at ``origin``."""
    d = np.asarray(dist, dtype=np.float64).tolist()
    h = np.asarray(hits, dtype=np.int64).tolist()
    rows = np.asarray(orders, dtype=np.int64)
    dsum = np.zeros(rows.shape[0], dtype=np.float64)
    hsum = np.zeros(rows.shape[0], dtype=np.int64)
    for k, row in enumerate(rows.tolist()):
        prev = origin
        total = 0.0
        count = 0
        for idx in row:
            total += d[prev][idx]
            count += h[prev][idx]
            prev = idx
        dsum[k] = total
        hsum[k] = count
    return dsum, hsum
