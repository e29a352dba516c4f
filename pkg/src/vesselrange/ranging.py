"""Per-section obstacle distances: band assignment, minimisation and GSD scaling."""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .contours import LabelMask, binarize, extract_contours, split_vessel_and_obstacles
from .errors import InvalidAltitudeError, InvalidConfigurationError
from .frames import CameraIntrinsics, Pose, RigidTransform, build_projection
from .hull import HullModel, ImageSegment, polygon_area, project_sections

__all__ = [
    "SectionDistance",
    "FrameReport",
    "SectionHit",
    "assign_points_to_sections",
    "min_perpendicular_distance",
    "gsd_factor",
    "build_report",
    "estimate_distances",
    "REPORT_HEADER",
]

REPORT_HEADER = (
    "section_id,pixel_distance,metric_distance,closest_px_x,closest_px_y,"
    "hull_px_x,hull_px_y,obstacle_id"
)
ABSENT = "??"

# Reduction over the width/height scales; tests swap it to check the self test.
_GSD_REDUCE = max


@dataclass(frozen=True)
class SectionDistance:
    section_id: int
    pixel_distance: Optional[float] = None
    metric_distance: Optional[float] = None
    closest_contour_point: Optional[tuple] = None
    closest_hull_point: Optional[tuple] = None
    obstacle_contour_id: Optional[int] = None

    @property
    def present(self) -> bool:
        return self.pixel_distance is not None


@dataclass(frozen=True)
class FrameReport:
    sections: tuple
    altitude: float
    gsd_factor: float
    uav_pose: Optional[Pose] = None
    vessel_pose: Optional[Pose] = None
    warnings: tuple = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.sections)

    def metric_distances(self) -> list:
        return [s.metric_distance for s in self.sections]

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(REPORT_HEADER + "\n")
        for s in self.sections:
            if not s.present:
                out.write(f"{s.section_id}" + f",{ABSENT}" * 7 + "\n")
                continue
            cx, cy = s.closest_contour_point
            hx, hy = s.closest_hull_point
            out.write(
                f"{s.section_id},{s.pixel_distance:.6f},{s.metric_distance:.6f},"
                f"{_fmt(cx)},{_fmt(cy)},{hx:.6f},{hy:.6f},{s.obstacle_contour_id}\n"
            )
        return out.getvalue()


def _fmt(v) -> str:
    return str(int(v)) if float(v).is_integer() else f"{v:.6f}"


class SectionHit(NamedTuple):
    pixel_distance: float
    contour_point: tuple
    hull_point: tuple
    index: int


def _segments_as_arrays(segments: Sequence[ImageSegment]):
    a = np.array([s.a for s in segments], dtype=float).reshape(-1, 2)
    b = np.array([s.b for s in segments], dtype=float).reshape(-1, 2)
    n = np.array([s.outward_normal for s in segments], dtype=float).reshape(-1, 2)
    return a, b, n


def assign_points_to_sections(segments: Sequence[ImageSegment], points) -> list[np.ndarray]:
    """Indices of the candidate points of every section.

    A point belongs to a section's perpendicular band when its projection
    parameter lies in [0, 1] and it sits on the outward side. Points outside
    the hull that fall in no band (the wedges at convex corners) go to the
    outward section with the nearest endpoint; ties prefer the section whose
    band is closer, then the lower id.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    nseg = len(segments)
    if len(pts) == 0 or nseg == 0:
        return [np.zeros(0, dtype=np.intp) for _ in range(nseg)]
    a, b, n = _segments_as_arrays(segments)
    ab = b - a
    length2 = np.einsum("sk,sk->s", ab, ab)
    rel = pts[:, None, :] - a[None, :, :]
    t = np.einsum("psk,sk->ps", rel, ab) / length2
    outward = np.einsum("psk,sk->ps", rel, n) >= 0.0
    member = outward & (t >= 0.0) & (t <= 1.0)

    orphan = ~member.any(axis=1) & outward.any(axis=1)
    if orphan.any():
        idx = np.nonzero(orphan)[0]
        o_rel = rel[idx]
        o_t = t[idx]
        d_a = np.linalg.norm(o_rel, axis=2)
        d_b = np.linalg.norm(pts[idx][:, None, :] - b[None, :, :], axis=2)
        endpoint = np.minimum(d_a, d_b)
        overshoot = np.maximum(np.maximum(-o_t, o_t - 1.0), 0.0) * np.sqrt(length2)
        endpoint = np.where(outward[idx], endpoint, np.inf)
        best = endpoint.min(axis=1, keepdims=True)
        near = endpoint <= best + 1e-9 * np.maximum(1.0, best)
        overshoot = np.where(near, overshoot, np.inf)
        ov_best = overshoot.min(axis=1, keepdims=True)
        chosen = np.argmax(overshoot <= ov_best + 1e-9 * np.maximum(1.0, ov_best), axis=1)
        member[idx, chosen] = True
    return [np.nonzero(member[:, s])[0] for s in range(nseg)]


def min_perpendicular_distance(segment: ImageSegment, candidates) -> Optional[SectionHit]:
    """Closest candidate to the segment under clamped orthogonal projection.

    Candidates are assumed ordered by (contour id, point index); among equal
    distances the earliest candidate wins.
    """
    pts = np.asarray(candidates, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        return None
    a = np.asarray(segment.a, dtype=float)
    ab = np.asarray(segment.b, dtype=float) - a
    t = np.clip((pts - a) @ ab / ab.dot(ab), 0.0, 1.0)
    foot = a + t[:, None] * ab
    d = np.hypot(pts[:, 0] - foot[:, 0], pts[:, 1] - foot[:, 1])
    best = d.min()
    k = int(np.nonzero(d <= best + 1e-12 * max(1.0, best))[0][0])
    return SectionHit(
        float(d[k]),
        (float(pts[k, 0]), float(pts[k, 1])),
        (float(foot[k, 0]), float(foot[k, 1])),
        k,
    )


def gsd_factor(altitude: float, intrinsics: CameraIntrinsics) -> float:
    """Meters per pixel at ``altitude`` (the larger of the two axis scales)."""
    if not (math.isfinite(altitude) and altitude > 0):
        raise InvalidAltitudeError(f"altitude must be positive, got {altitude}")
    i = intrinsics
    return _GSD_REDUCE(
        altitude * i.sensor_width / (i.focal_length * i.image_width),
        altitude * i.sensor_height / (i.focal_length * i.image_height),
    )


def build_report(
    hull: HullModel,
    segments: Sequence[ImageSegment],
    section_distances: Sequence,
    gsd: float,
    metadata: Optional[dict] = None,
) -> FrameReport:
    """Assemble a frame report.

    ``section_distances`` holds, per segment, either None or a pair
    ``(SectionHit, obstacle_contour_id)``.
    """
    metadata = dict(metadata or {})
    if len(segments) != len(hull.sections) or len(section_distances) != len(segments):
        raise ValueError("one distance entry per hull section is required")
    rows = []
    for seg, entry in zip(segments, section_distances):
        if entry is None:
            rows.append(SectionDistance(seg.section_id))
            continue
        hit, contour_id = entry
        rows.append(
            SectionDistance(
                seg.section_id,
                hit.pixel_distance,
                gsd * hit.pixel_distance,
                hit.contour_point,
                hit.hull_point,
                contour_id,
            )
        )
    return FrameReport(
        tuple(rows),
        float(metadata.get("altitude", float("nan"))),
        gsd,
        metadata.get("uav_pose"),
        metadata.get("vessel_pose"),
        tuple(metadata.get("warnings", ())),
    )


def estimate_distances(
    mask: LabelMask,
    uav_pose: Pose,
    vessel_pose: Pose,
    intrinsics: CameraIntrinsics,
    extrinsic: Optional[RigidTransform],
    hull: HullModel,
    *,
    vessel_threshold: float = 0.5,
    vessel_dilation: float = 3.0,
    anomaly_ratio: float = 1.25,
) -> FrameReport:
    """Run the full per-frame pipeline on a label mask."""
    if (mask.width, mask.height) != (intrinsics.image_width, intrinsics.image_height):
        raise InvalidConfigurationError(
            f"mask is {mask.width}x{mask.height} but intrinsics declare "
            f"{intrinsics.image_width}x{intrinsics.image_height}"
        )
    pmap = build_projection(intrinsics, uav_pose, vessel_pose, extrinsic)
    segments = project_sections(hull, pmap)
    contours = extract_contours(binarize(mask))
    vessel_ids, obstacles, warnings = split_vessel_and_obstacles(
        contours,
        segments,
        (mask.width, mask.height),
        threshold=vessel_threshold,
        dilation=vessel_dilation,
    )
    warnings = list(warnings)
    if vessel_ids:
        hull_area = abs(polygon_area([s.a for s in segments]))
        vessel_area = sum(contours[i].area() for i in vessel_ids)
        if vessel_area > anomaly_ratio * hull_area:
            warnings.append(
                f"vessel-contour-anomaly: vessel blob area {vessel_area:.1f} px exceeds "
                f"projected hull area {hull_area:.1f} px by more than "
                f"{(anomaly_ratio - 1) * 100:.0f}%"
            )

    if obstacles:
        points = np.concatenate([c.points for c in obstacles]).astype(float)
        owner = np.concatenate([np.full(len(c), c.id) for c in obstacles])
    else:
        points = np.zeros((0, 2))
        owner = np.zeros(0, dtype=int)
    candidates = assign_points_to_sections(segments, points)
    found = []
    for seg, idx in zip(segments, candidates):
        hit = min_perpendicular_distance(seg, points[idx])
        found.append(None if hit is None else (hit, int(owner[idx[hit.index]])))

    gsd = gsd_factor(pmap.camera_altitude, intrinsics)
    meta = {
        "altitude": pmap.camera_altitude,
        "uav_pose": uav_pose,
        "vessel_pose": vessel_pose,
        "warnings": warnings,
    }
    return build_report(hull, segments, found, gsd, meta)
