"""Vessel silhouette: convex deck outline, sections, and their image projection."""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DegenerateHullError, HullOutOfViewError
from .frames import ProjectionMap, project_points

__all__ = [
    "Section",
    "HullModel",
    "ImageSegment",
    "convex_hull",
    "discretize_sections",
    "make_hull",
    "load_hull",
    "save_hull",
    "project_sections",
    "polygon_area",
    "DEFAULT_OUTLINE",
]

# Tug-like deck outline, 24 m x 8 m, bow towards +x.
DEFAULT_OUTLINE = (
    (-12.0, -4.0),
    (6.0, -4.0),
    (12.0, -1.5),
    (12.0, 1.5),
    (6.0, 4.0),
    (-12.0, 4.0),
)


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def polygon_area(vertices) -> float:
    """Signed shoelace area; positive for counterclockwise (y-up) order."""
    v = np.asarray(vertices, dtype=float)
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def convex_hull(points) -> list[tuple[float, float]]:
    """Counterclockwise convex hull (monotone chain), collinear points dropped.

    The hull starts at the earliest input point that is a hull vertex, so an
    outline that is already convex keeps its vertex numbering.
    """
    pts = [(float(p[0]), float(p[1])) for p in points]
    uniq = sorted(set(pts))
    if len(uniq) < 3:
        raise DegenerateHullError("convex hull needs at least 3 distinct points")

    lower: list = []
    for p in uniq:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(uniq):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 3:
        raise DegenerateHullError("all points are collinear")

    index = {v: i for i, v in enumerate(hull)}
    start = next(index[p] for p in pts if p in index)
    return hull[start:] + hull[:start]


@dataclass(frozen=True)
class Section:
    id: int
    endpoint_a: tuple[float, float]
    endpoint_b: tuple[float, float]

    def __post_init__(self):
        if math.dist(self.endpoint_a, self.endpoint_b) < 1e-6:
            raise DegenerateHullError(f"section {self.id} is shorter than 1e-6 m")

    @property
    def length(self) -> float:
        return math.dist(self.endpoint_a, self.endpoint_b)


def discretize_sections(polygon, max_section_length: float) -> list[Section]:
    """Split every polygon edge into ``ceil(L / max_section_length)`` equal sections."""
    if not max_section_length > 0:
        raise ValueError("max_section_length must be positive")
    verts = [(float(x), float(y)) for x, y in polygon]
    sections: list[Section] = []
    n = len(verts)
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        length = math.dist(a, b)
        # tolerance keeps exact multiples (10 / 2.5) from gaining a section
        count = max(1, math.ceil(length / max_section_length - 1e-9))
        points = [a]
        for k in range(1, count):
            f = k / count
            points.append((a[0] + (b[0] - a[0]) * f, a[1] + (b[1] - a[1]) * f))
        points.append(b)
        for k in range(count):
            sections.append(Section(len(sections), points[k], points[k + 1]))
    return sections


@dataclass(frozen=True)
class HullModel:
    outline: tuple
    sections: tuple

    def __post_init__(self):
        outline = tuple((float(x), float(y)) for x, y in self.outline)
        object.__setattr__(self, "outline", outline)
        object.__setattr__(self, "sections", tuple(self.sections))
        n = len(outline)
        if n < 3:
            raise DegenerateHullError("outline needs at least 3 vertices")
        for i in range(n):
            if _cross(outline[i], outline[(i + 1) % n], outline[(i + 2) % n]) < -1e-9:
                raise DegenerateHullError("outline must be convex and counterclockwise")
        secs = self.sections
        for i, s in enumerate(secs):
            if s.id != i or s.endpoint_b != secs[(i + 1) % len(secs)].endpoint_a:
                raise DegenerateHullError("sections must chain head-to-tail around the outline")

    @property
    def perimeter(self) -> float:
        n = len(self.outline)
        return sum(math.dist(self.outline[i], self.outline[(i + 1) % n]) for i in range(n))

    @property
    def area(self) -> float:
        return polygon_area(self.outline)

    def __len__(self) -> int:
        return len(self.sections)


def make_hull(points, max_section_length: float) -> HullModel:
    outline = convex_hull(points)
    return HullModel(tuple(outline), tuple(discretize_sections(outline, max_section_length)))


def load_hull(path, max_section_length: float) -> HullModel:
    """Read a hull text file: one ``x y`` pair per line, ``#`` starts a comment."""
    points = []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected 'x y', got {raw!r}")
        try:
            points.append((float(parts[0]), float(parts[1])))
        except ValueError:
            raise ValueError(f"{path}:{lineno}: non-numeric vertex {raw!r}") from None
    return make_hull(points, max_section_length)


def save_hull(path, outline) -> None:
    lines = ["# vessel deck outline, meters, vessel frame, counterclockwise"]
    lines += [f"{x!r} {y!r}" for x, y in outline]
    Path(path).write_text("\n".join(lines) + "\n")


@dataclass(frozen=True)
class ImageSegment:
    section_id: int
    a: tuple[float, float]
    b: tuple[float, float]
    outward_normal: tuple[float, float]

    @property
    def length(self) -> float:
        return math.dist(self.a, self.b)

    @property
    def midpoint(self) -> tuple[float, float]:
        return ((self.a[0] + self.b[0]) / 2.0, (self.a[1] + self.b[1]) / 2.0)


def project_sections(hull: HullModel, pmap: ProjectionMap) -> list[ImageSegment]:
    """Project every hull section into the image.

    Each section start is projected once and reused as the previous
    section's end, so neighbouring segments share endpoints exactly.
    """
    starts = np.array([s.endpoint_a for s in hull.sections])
    pix = project_points(pmap, starts)  # raises BehindCameraError
    intr = pmap.intrinsics
    lo = pix.min(axis=0)
    hi = pix.max(axis=0)
    if hi[0] < -0.5 or hi[1] < -0.5 or lo[0] > intr.image_width - 0.5 or lo[1] > intr.image_height - 0.5:
        raise HullOutOfViewError("projected hull lies entirely outside the image")

    centroid = pix.mean(axis=0)
    segments = []
    n = len(pix)
    for i in range(n):
        a = pix[i]
        b = pix[(i + 1) % n]
        d = b - a
        normal = np.array([d[1], -d[0]]) / math.hypot(d[0], d[1])
        mid = (a + b) / 2.0
        if np.dot(centroid - mid, normal) > 0:
            normal = -normal
        segments.append(
            ImageSegment(
                hull.sections[i].id,
                (float(a[0]), float(a[1])),
                (float(b[0]), float(b[1])),
                (float(normal[0]), float(normal[1])),
            )
        )
    return segments
