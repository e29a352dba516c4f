"""Slow, obviously-correct reference routines.

These back the built-in self test and the test-suite. None of them shares
code with the fast paths they check.
"""
from __future__ import annotations

import itertools
import math
from collections import deque

import numpy as np

__all__ = [
    "label_components",
    "outer_boundary_pixels",
    "is_simply_connected",
    "brute_force_hull",
    "point_segment_distance",
    "brute_force_min_distance",
    "gsd_reference",
    "winding_number",
]

_N8 = [(dr, dc) for dr in (-1, 0, 1) for dc in (-1, 0, 1) if (dr, dc) != (0, 0)]
_N4 = [(-1, 0), (1, 0), (0, -1), (0, 1)]


def label_components(solid, connectivity: int = 8):
    """Breadth-first component labelling; returns (labels, count)."""
    solid = np.asarray(solid, dtype=bool)
    h, w = solid.shape
    labels = np.zeros((h, w), dtype=np.int64)
    steps = _N8 if connectivity == 8 else _N4
    count = 0
    for r in range(h):
        for c in range(w):
            if not solid[r, c] or labels[r, c]:
                continue
            count += 1
            labels[r, c] = count
            queue = deque([(r, c)])
            while queue:
                y, x = queue.popleft()
                for dy, dx in steps:
                    yy, xx = y + dy, x + dx
                    if 0 <= yy < h and 0 <= xx < w and solid[yy, xx] and not labels[yy, xx]:
                        labels[yy, xx] = count
                        queue.append((yy, xx))
    return labels, count


def outer_boundary_pixels(component) -> set:
    """Pixels of a component with a 4-neighbour outside it or off the image, as (x, y)."""
    comp = np.asarray(component, dtype=bool)
    h, w = comp.shape
    out = set()
    for r, c in zip(*np.nonzero(comp)):
        for dr, dc in _N4:
            rr, cc = r + dr, c + dc
            if not (0 <= rr < h and 0 <= cc < w) or not comp[rr, cc]:
                out.add((int(c), int(r)))
                break
    return out


def is_simply_connected(component) -> bool:
    """True when the 4-connected complement (with a frame of background) is one piece."""
    comp = np.pad(np.asarray(component, dtype=bool), 1)
    _, n = label_components(~comp, connectivity=4)
    return n == 1


def brute_force_hull(points) -> set:
    """Hull vertices: points p for which some directed pair (p, q) has every point on its left."""
    pts = [tuple(map(float, p)) for p in points]
    uniq = sorted(set(pts))
    verts = set()
    for p, q in itertools.permutations(uniq, 2):
        ok = True
        for r in uniq:
            cross = (q[0] - p[0]) * (r[1] - p[1]) - (q[1] - p[1]) * (r[0] - p[0])
            if cross < 0:
                ok = False
                break
            if cross == 0 and r not in (p, q):
                # collinear points must lie strictly between p and q
                dot = (r[0] - p[0]) * (q[0] - p[0]) + (r[1] - p[1]) * (q[1] - p[1])
                if dot < 0 or dot > (q[0] - p[0]) ** 2 + (q[1] - p[1]) ** 2:
                    ok = False
                    break
        if ok:
            verts.add(p)
            verts.add(q)
    return verts


def point_segment_distance(p, a, b):
    """Clamped distance from ``p`` to segment ``ab`` and the foot point."""
    ax, ay = a
    bx, by = b
    px, py = p
    dx, dy = bx - ax, by - ay
    t = ((px - ax) * dx + (py - ay) * dy) / (dx * dx + dy * dy)
    t = min(1.0, max(0.0, t))
    fx, fy = ax + t * dx, ay + t * dy
    return math.hypot(px - fx, py - fy), (fx, fy)


def brute_force_min_distance(a, b, points):
    """(distance, index, foot) of the first point achieving the minimum, or None."""
    best = None
    for k, p in enumerate(points):
        d, foot = point_segment_distance(p, a, b)
        if best is None or d < best[0] - 1e-12 * max(1.0, best[0]):
            best = (d, k, foot)
    return best


def gsd_reference(a, w_s, h_s, w_i, h_i, f) -> float:
    by_width = (a * w_s) / (f * w_i)
    by_height = (a * h_s) / (f * h_i)
    return by_width if by_width >= by_height else by_height


def winding_number(point, polygon) -> int:
    """Winding number of a closed polygon around ``point``."""
    x, y = point
    wn = 0
    n = len(polygon)
    for i in range(n):
        x0, y0 = polygon[i]
        x1, y1 = polygon[(i + 1) % n]
        cross = (x1 - x0) * (y - y0) - (x - x0) * (y1 - y0)
        if y0 <= y < y1 and cross > 0:
            wn += 1
        elif y1 <= y < y0 and cross < 0:
            wn -= 1
    return wn
