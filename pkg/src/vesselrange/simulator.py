"""Flat synthetic harbour: scene model, rasterisation, mask noise and ground truth.

Every structure lies on the water plane z = 0, so a noise-free rendering only
carries pixel quantisation error. The ground-truth distances are computed in
continuous world coordinates from densely sampled obstacle outlines and are
independent of the image pipeline.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
import shapely
from shapely.geometry import MultiPolygon, Polygon

from .contours import SHIP, UNKNOWN, WATER, LabelMask
from .errors import PlacementError
from .frames import CameraIntrinsics, Pose, ProjectionMap, backproject_pixels, pose_to_transform
from .hull import DEFAULT_OUTLINE, HullModel, load_hull, make_hull, save_hull

__all__ = [
    "Obstacle",
    "Scene",
    "SceneParams",
    "GroundTruth",
    "vessel_world_outline",
    "points_in_polygon",
    "camera_footprint",
    "rasterize",
    "ground_truth",
    "generate_scene",
    "add_mask_noise",
    "save_scene",
    "load_scene",
    "default_hull",
]

CLASS_CODES = {"ship": SHIP, "dock": UNKNOWN}
MAX_PLACEMENT_ATTEMPTS = 1000


def default_hull(max_section_length: float = 3.0) -> HullModel:
    return make_hull(DEFAULT_OUTLINE, max_section_length)


@dataclass(frozen=True)
class Obstacle:
    vertices: tuple
    cls: str = "dock"

    def __post_init__(self):
        verts = tuple((float(x), float(y)) for x, y in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if self.cls not in CLASS_CODES:
            raise ValueError(f"obstacle class must be 'ship' or 'dock', got {self.cls!r}")
        if len(verts) < 3:
            raise ValueError("obstacle polygon needs at least 3 vertices")
        if not shapely.LinearRing(verts).is_simple:
            raise ValueError("obstacle polygon must not self-intersect")

    @property
    def polygon(self) -> Polygon:
        return Polygon(self.vertices)


def vessel_world_outline(hull: HullModel, pose: Pose) -> np.ndarray:
    """Hull outline placed in the world, as (n, 2) water-plane coordinates."""
    pts = np.column_stack([np.asarray(hull.outline), np.zeros(len(hull.outline))])
    return pose_to_transform(pose).apply(pts)[:, :2]


@dataclass(frozen=True)
class Scene:
    obstacles: tuple
    vessel_pose: Pose
    hull: HullModel
    rng_seed: int = 0
    hull_file: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        vessel = Polygon(vessel_world_outline(self.hull, self.vessel_pose))
        for k, ob in enumerate(self.obstacles):
            if ob.polygon.intersects(vessel):
                raise ValueError(f"obstacle {k} intersects the vessel hull")

    def vessel_polygon(self) -> Polygon:
        return Polygon(vessel_world_outline(self.hull, self.vessel_pose))


@dataclass(frozen=True)
class GroundTruth:
    distances: tuple

    def __len__(self) -> int:
        return len(self.distances)


def points_in_polygon(points: np.ndarray, vertices) -> np.ndarray:
    """Even-odd crossing test for (n, 2) points against one polygon."""
    poly = np.asarray(vertices, dtype=float)
    px, py = points[:, 0], points[:, 1]
    inside = np.zeros(len(points), dtype=bool)
    x0, y0 = poly[:, 0], poly[:, 1]
    x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
    for xa, ya, xb, yb in zip(x0, y0, x1, y1):
        if ya == yb:
            continue
        straddle = (ya > py) != (yb > py)
        x_cross = xa + (py - ya) * (xb - xa) / (yb - ya)
        inside ^= straddle & (px < x_cross)
    return inside


def _fill(labels_flat, xy, valid, vertices, code) -> None:
    poly = np.asarray(vertices)
    lo, hi = poly.min(axis=0), poly.max(axis=0)
    box = valid & (xy[:, 0] >= lo[0]) & (xy[:, 0] <= hi[0]) & (xy[:, 1] >= lo[1]) & (xy[:, 1] <= hi[1])
    idx = np.nonzero(box)[0]
    if len(idx):
        labels_flat[idx[points_in_polygon(xy[idx], poly)]] = code


def rasterize(scene: Scene, pmap: ProjectionMap, intrinsics: Optional[CameraIntrinsics] = None) -> LabelMask:
    """Label every pixel by casting its centre onto the water plane."""
    intr = intrinsics or pmap.intrinsics
    w, h = intr.image_width, intr.image_height
    uu, vv = np.meshgrid(np.arange(w, dtype=float), np.arange(h, dtype=float))
    world, hit = backproject_pixels(pmap, np.column_stack([uu.ravel(), vv.ravel()]))
    xy = world[:, :2]
    labels = np.full(w * h, WATER, dtype=np.uint8)
    # reverse order so the first obstacle in the list wins overlaps
    for ob in reversed(scene.obstacles):
        _fill(labels, xy, hit, ob.vertices, CLASS_CODES[ob.cls])
    _fill(labels, xy, hit, vessel_world_outline(scene.hull, scene.vessel_pose), SHIP)
    return LabelMask(labels.reshape(h, w))


def camera_footprint(pmap: ProjectionMap) -> Polygon:
    """Water-plane quadrilateral spanned by the corner pixel centres."""
    intr = pmap.intrinsics
    w, h = intr.image_width - 1, intr.image_height - 1
    corners = np.array([[0, 0], [w, 0], [w, h], [0, h]], dtype=float)
    world, hit = backproject_pixels(pmap, corners)
    if not hit.all():
        raise ValueError("image corners do not all see the water plane")
    return Polygon(world[:, :2])


def _sample_rings(geom, spacing: float) -> np.ndarray:
    """Points along every boundary ring of ``geom``, at most ``spacing`` apart."""
    polys = [geom] if isinstance(geom, Polygon) else list(getattr(geom, "geoms", []))
    chunks = []
    for poly in polys:
        if not isinstance(poly, Polygon) or poly.is_empty:
            continue
        for ring in [poly.exterior, *poly.interiors]:
            c = np.asarray(ring.coords)[:, :2]
            for p, q in zip(c[:-1], c[1:]):
                n = max(1, math.ceil(math.dist(p, q) / spacing))
                f = np.arange(n)[:, None] / n
                chunks.append(p + f * (q - p))
    return np.concatenate(chunks) if chunks else np.zeros((0, 2))


def _ring_edges(geom) -> np.ndarray:
    """(m, 2, 2) array of every boundary edge of ``geom``."""
    polys = [geom] if isinstance(geom, Polygon) else list(getattr(geom, "geoms", []))
    edges = []
    for poly in polys:
        if not isinstance(poly, Polygon) or poly.is_empty:
            continue
        for ring in [poly.exterior, *poly.interiors]:
            c = np.asarray(ring.coords)[:, :2]
            edges.append(np.stack([c[:-1], c[1:]], axis=1))
    return np.concatenate(edges) if edges else np.zeros((0, 2, 2))


def _line_crossings(edges: np.ndarray, origins: np.ndarray, directions: np.ndarray, eps: float = 1e-7) -> np.ndarray:
    """Points where edges cross the given lines, plus neighbours ``eps`` either side.

    The distance minimum restricted to one section region can sit exactly on
    a region boundary; uniform sampling alone only gets within one spacing
    of it.
    """
    if len(edges) == 0 or len(origins) == 0:
        return np.zeros((0, 2))
    p = edges[:, None, 0, :]
    d = edges[:, None, 1, :] - p
    u = directions[None, :, :]
    rel = origins[None, :, :] - p
    denom = u[..., 0] * d[..., 1] - u[..., 1] * d[..., 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        s = (u[..., 0] * rel[..., 1] - u[..., 1] * rel[..., 0]) / denom
    ok = np.isfinite(s) & (s >= 0.0) & (s <= 1.0)
    ei, li = np.nonzero(ok)
    if len(ei) == 0:
        return np.zeros((0, 2))
    dd = d[ei, 0]
    step = eps / np.maximum(np.hypot(dd[:, 0], dd[:, 1]), eps)
    out = []
    for shift in (-step, 0.0, step):
        f = np.clip(s[ei, li] + shift, 0.0, 1.0)
        out.append(p[ei, 0] + f[:, None] * dd)
    return np.concatenate(out)


def ground_truth(scene: Scene, footprint: Optional[Polygon] = None, spacing: float = 0.01) -> GroundTruth:
    """Brute-force per-section distance from the hull to the obstacle outlines.

    Obstacles are merged (and clipped to ``footprint`` when given) before
    their outlines are sampled every ``spacing`` meters. Sample points are
    assigned to sections with the same band / corner-wedge rule the image
    pipeline applies, evaluated here in world coordinates.
    """
    hull = scene.hull
    sections = hull.sections
    if not scene.obstacles:
        return GroundTruth(tuple(None for _ in sections))
    geom = shapely.union_all([ob.polygon for ob in scene.obstacles])
    if footprint is not None:
        geom = geom.intersection(footprint)
    if geom.geom_type not in ("Polygon", "MultiPolygon"):
        geom = MultiPolygon([g for g in getattr(geom, "geoms", []) if isinstance(g, Polygon)])
    samples = _sample_rings(geom, spacing)
    if len(samples) == 0:
        return GroundTruth(tuple(None for _ in sections))

    tf = pose_to_transform(scene.vessel_pose)
    ends = np.array([s.endpoint_a for s in sections] + [sections[0].endpoint_a])
    ends = tf.apply(np.column_stack([ends, np.zeros(len(ends))]))[:, :2]
    out = []

    starts, stops = ends[:-1], ends[1:]
    direction = stops - starts
    seg_len = np.hypot(direction[:, 0], direction[:, 1])
    unit = direction / seg_len[:, None]
    normal = np.column_stack([unit[:, 1], -unit[:, 0]])  # right of travel = outside for CCW

    # Region boundaries: the perpendicular at every section start, and the
    # equal-overshoot line (normal bisector) at every corner.
    prev_unit = np.roll(unit, 1, axis=0)
    bisector = normal + np.roll(normal, 1, axis=0)
    corner = np.abs(prev_unit[:, 0] * unit[:, 1] - prev_unit[:, 1] * unit[:, 0]) > 1e-12
    origins = np.concatenate([starts, starts[corner]])
    directions = np.concatenate([normal, bisector[corner]])
    samples = np.concatenate([samples, _line_crossings(_ring_edges(geom), origins, directions)])

    along = np.empty((len(samples), len(sections)))
    across = np.empty_like(along)
    for s in range(len(sections)):
        rel = samples - starts[s]
        along[:, s] = rel @ unit[s]
        across[:, s] = rel @ normal[s]
    outside = across >= 0.0
    in_band = outside & (along >= 0.0) & (along <= seg_len)
    clamped = np.clip(along, 0.0, seg_len)
    dist = np.hypot(along - clamped, across)

    owner = in_band.copy()
    stray = ~in_band.any(axis=1) & outside.any(axis=1)
    if stray.any():
        rows = np.nonzero(stray)[0]
        to_start = np.hypot(along[rows], across[rows])
        to_stop = np.hypot(along[rows] - seg_len, across[rows])
        corner = np.where(outside[rows], np.minimum(to_start, to_stop), np.inf)
        gap = np.abs(along[rows] - clamped[rows])
        lowest = corner.min(axis=1, keepdims=True)
        tied = corner <= lowest + 1e-9 * np.maximum(1.0, lowest)
        gap = np.where(tied, gap, np.inf)
        smallest = gap.min(axis=1, keepdims=True)
        pick = np.argmax(gap <= smallest + 1e-9 * np.maximum(1.0, smallest), axis=1)
        owner[rows, pick] = True

    for s in range(len(sections)):
        d = dist[owner[:, s], s]
        out.append(float(d.min()) if len(d) else None)
    return GroundTruth(tuple(out))


@dataclass(frozen=True)
class SceneParams:
    n_obstacles: int = 3
    berth_gap_range: tuple = (2.0, 8.0)
    obstacle_size_range: tuple = (2.0, 6.0)
    berth_length: float = 60.0
    berth_depth: float = 10.0

    def __post_init__(self):
        for name in ("berth_gap_range", "obstacle_size_range"):
            lo, hi = getattr(self, name)
            if not (0 < lo <= hi):
                raise ValueError(f"{name} must be positive and ordered, got {(lo, hi)}")
        if self.n_obstacles < 0:
            raise ValueError("n_obstacles must be non-negative")


def _random_convex(rng: np.random.Generator, radius: float) -> np.ndarray:
    k = int(rng.integers(5, 9))
    ang = np.sort(rng.uniform(0.0, 2.0 * math.pi, k))
    rad = radius * rng.uniform(0.6, 1.0, k)
    pts = np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])
    hull = shapely.convex_hull(shapely.MultiPoint(pts))
    return np.asarray(hull.exterior.coords)[:-1]


def generate_scene(seed: int, params: Optional[SceneParams] = None, hull: Optional[HullModel] = None) -> Scene:
    """Random berth scene around a vessel at the world origin; deterministic in ``seed``."""
    params = params or SceneParams()
    hull = hull or default_hull()
    rng = np.random.default_rng(seed)
    pose = Pose(0.0, 0.0, 0.0, yaw=float(rng.uniform(-math.pi, math.pi)))
    tf = pose_to_transform(pose)

    def to_world(local) -> tuple:
        loc = np.asarray(local, dtype=float)
        w = tf.apply(np.column_stack([loc, np.zeros(len(loc))]))[:, :2]
        return tuple(map(tuple, w.tolist()))

    outline = np.asarray(hull.outline)
    min_gap = params.berth_gap_range[0]
    side = 1.0 if rng.uniform() < 0.5 else -1.0
    gap = float(rng.uniform(*params.berth_gap_range))
    edge = outline[:, 1].max() if side > 0 else -outline[:, 1].min()
    near, far = edge + gap, edge + gap + params.berth_depth
    half = params.berth_length / 2.0
    wall = np.array([[-half, near], [half, near], [half, far], [-half, far]])
    wall[:, 1] *= side
    if side < 0:
        wall = wall[::-1]
    obstacles = [Obstacle(to_world(wall), "dock")]

    vessel_local = Polygon(outline)
    placed = [Polygon(wall)]
    centroid = np.asarray(vessel_local.centroid.coords[0])
    reach = float(np.max(np.linalg.norm(outline - centroid, axis=1)))
    rejections = 0
    while len(obstacles) < params.n_obstacles + 1:
        radius = float(rng.uniform(*params.obstacle_size_range))
        shape = _random_convex(rng, radius)
        theta = float(rng.uniform(0.0, 2.0 * math.pi))
        gap = float(rng.uniform(*params.berth_gap_range))
        direction = np.array([math.cos(theta), math.sin(theta)])
        ray = shapely.LineString([centroid, centroid + direction * (reach + 1.0)])
        boundary = np.asarray(ray.intersection(vessel_local.exterior).coords[-1])
        candidate = Polygon(shape + boundary + direction * (gap + radius))
        if vessel_local.distance(candidate) < min_gap or any(p.distance(candidate) < min_gap for p in placed):
            rejections += 1
            if rejections >= MAX_PLACEMENT_ATTEMPTS:
                raise PlacementError(
                    f"could not place obstacle {len(obstacles)} after {rejections} attempts"
                )
            continue
        placed.append(candidate)
        cls = "ship" if rng.uniform() < 0.5 else "dock"
        obstacles.append(Obstacle(to_world(np.asarray(candidate.exterior.coords)[:-1]), cls))
    return Scene(tuple(obstacles), pose, hull, int(seed))


def add_mask_noise(mask: LabelMask, seed: int, flip_rate: float) -> LabelMask:
    """Flip boundary pixels to a random differing 4-neighbour's class."""
    if not 0.0 <= flip_rate < 0.5:
        raise ValueError("flip_rate must be in [0, 0.5)")
    lab = mask.labels
    h, w = lab.shape
    # neighbour classes: up, down, left, right; -1 outside the image
    padded = np.full((h + 2, w + 2), -1, dtype=np.int16)
    padded[1:-1, 1:-1] = lab
    neigh = np.stack(
        [padded[:-2, 1:-1], padded[2:, 1:-1], padded[1:-1, :-2], padded[1:-1, 2:]]
    )
    differs = (neigh >= 0) & (neigh != lab[None].astype(np.int16))
    count = differs.sum(axis=0)
    boundary = count > 0

    rng = np.random.default_rng(seed)
    flip = boundary & (rng.random((h, w)) < flip_rate)
    pick = np.minimum((rng.random((h, w)) * count).astype(np.int64), np.maximum(count - 1, 0))
    rank = np.cumsum(differs, axis=0) - 1
    chosen = differs & (rank == pick[None])
    new_class = np.max(np.where(chosen, neigh, -1), axis=0)
    out = lab.copy()
    out[flip] = new_class[flip].astype(np.uint8)
    return LabelMask(out)


def save_scene(path, scene: Scene, hull_file: Optional[str] = None) -> None:
    """Write a scene as JSON; the hull outline goes to ``hull_file`` beside it."""
    path = Path(path)
    hull_file = hull_file or scene.hull_file or (path.stem + "_hull.txt")
    hull_path = path.parent / hull_file
    if not hull_path.exists():
        save_hull(hull_path, scene.hull.outline)
    doc = {
        "vessel_pose": scene.vessel_pose.to_dict(),
        "hull_file": hull_file,
        "obstacles": [{"class": ob.cls, "vertices": [list(v) for v in ob.vertices]} for ob in scene.obstacles],
        "seed": scene.rng_seed,
    }
    path.write_text(json.dumps(doc, indent=2) + "\n")


_SCENE_KEYS = {"vessel_pose", "hull_file", "obstacles", "seed"}
_POSE_KEYS = {"x", "y", "z", "yaw", "pitch", "roll"}


def load_scene(path, max_section_length: float = 3.0) -> Scene:
    path = Path(path)
    doc = json.loads(path.read_text())
    if not isinstance(doc, dict):
        raise ValueError(f"{path}: scene must be a JSON object")
    unknown = set(doc) - _SCENE_KEYS
    if unknown:
        raise ValueError(f"{path}: unknown scene keys {sorted(unknown)}")
    missing = _SCENE_KEYS - set(doc)
    if missing:
        raise ValueError(f"{path}: missing scene keys {sorted(missing)}")
    pose_doc = doc["vessel_pose"]
    if not isinstance(pose_doc, dict) or set(pose_doc) - _POSE_KEYS:
        raise ValueError(f"{path}: vessel_pose must use keys {sorted(_POSE_KEYS)}")
    hull = load_hull(path.parent / doc["hull_file"], max_section_length)
    obstacles = []
    for k, ob in enumerate(doc["obstacles"]):
        if set(ob) != {"class", "vertices"}:
            raise ValueError(f"{path}: obstacles[{k}] must have exactly 'class' and 'vertices'")
        obstacles.append(Obstacle(tuple(tuple(v) for v in ob["vertices"]), ob["class"]))
    return Scene(tuple(obstacles), Pose(**pose_doc), hull, int(doc["seed"]), doc["hull_file"])
