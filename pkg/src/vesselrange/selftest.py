"""Seeded oracle-equivalence checks run by ``vesselrange selftest``."""
from __future__ import annotations

import math

import numpy as np

from . import oracles
from .contours import BinaryMask, extract_contours
from .frames import CameraIntrinsics
from .hull import ImageSegment, convex_hull
from .ranging import gsd_factor, min_perpendicular_distance

SUITES = ("contour", "hull", "distance", "gsd")


def check_contours(seed: int = 1, trials: int = 40) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    for k in range(trials):
        solid = rng.random((24, 24)) < rng.uniform(0.2, 0.6)
        contours = extract_contours(BinaryMask(solid))
        labels, count = oracles.label_components(solid)
        if len(contours) != count:
            return False, f"mask {k}: {len(contours)} contours vs {count} components"
        for c in contours:
            x, y = c.points[0]
            comp = labels == labels[y, x]
            if oracles.is_simply_connected(comp):
                if set(map(tuple, c.points.tolist())) != oracles.outer_boundary_pixels(comp):
                    return False, f"mask {k}: contour {c.id} differs from boundary oracle"
    return True, f"{trials} masks"


def check_hull(seed: int = 2, trials: int = 20) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    for k in range(trials):
        pts = rng.integers(-20, 21, size=(30, 2)).astype(float)
        got = set(convex_hull(pts))
        if got != oracles.brute_force_hull(pts):
            return False, f"instance {k}: hull vertices differ"
    return True, f"{trials} point sets"


def check_distance(seed: int = 3, trials: int = 100) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    for k in range(trials):
        a, b = rng.uniform(-50, 50, (2, 2))
        if math.dist(a, b) < 1e-3:
            continue
        pts = rng.integers(-60, 61, size=(int(rng.integers(1, 60)), 2)).astype(float)
        d = b - a
        seg = ImageSegment(0, tuple(a), tuple(b), tuple(np.array([d[1], -d[0]]) / np.hypot(*d)))
        hit = min_perpendicular_distance(seg, pts)
        ref = oracles.brute_force_min_distance(tuple(a), tuple(b), [tuple(p) for p in pts])
        if abs(hit.pixel_distance - ref[0]) > 1e-9 or hit.index != ref[1]:
            return False, f"instance {k}: {hit.pixel_distance} vs {ref[0]}"
    return True, f"{trials} segments"


def check_gsd(seed: int = 4, trials: int = 50) -> tuple[bool, str]:
    rng = np.random.default_rng(seed)
    for k in range(trials):
        a = rng.uniform(1, 500)
        w_s, h_s = rng.uniform(1e-3, 3e-2, 2)
        w_i, h_i = (int(v) for v in rng.integers(64, 4096, 2))
        f = rng.uniform(1e-3, 5e-2)
        intr = CameraIntrinsics(w_i, h_i, w_s, h_s, f)
        got = gsd_factor(a, intr)
        ref = oracles.gsd_reference(a, w_s, h_s, w_i, h_i, f)
        if abs(got - ref) > 1e-12 * ref:
            return False, f"tuple {k}: {got} vs {ref}"
        if gsd_factor(2 * a, intr) != 2 * got:
            return False, f"tuple {k}: not linear in altitude"
    return True, f"{trials} tuples"


_CHECKS = {"contour": check_contours, "hull": check_hull, "distance": check_distance, "gsd": check_gsd}


def run_all():
    """Yield ``(suite, passed, detail)`` in fixed order."""
    for name in SUITES:
        try:
            passed, detail = _CHECKS[name]()
        except Exception as exc:  # a crashing suite is a failing suite
            passed, detail = False, f"{type(exc).__name__}: {exc}"
        yield name, passed, detail
