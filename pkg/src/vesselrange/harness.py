"""Altitude sweeps over synthetic scenes, error statistics and frame annotation."""
from __future__ import annotations

import io
import logging
import math
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .contours import LabelMask
from .errors import VesselRangeError
from .frames import CameraIntrinsics, Pose, RigidTransform, build_projection
from .hull import HullModel, ImageSegment
from .ranging import FrameReport, estimate_distances, gsd_factor
from .simulator import (
    SceneParams,
    add_mask_noise,
    camera_footprint,
    default_hull,
    generate_scene,
    ground_truth,
    rasterize,
)

__all__ = [
    "DEFAULT_ALTITUDES",
    "DEFAULT_INTRINSICS",
    "SweepConfig",
    "EvalRecord",
    "AltitudeSummary",
    "sample_seed",
    "run_sample",
    "run_sweep",
    "summarize",
    "records_to_csv",
    "summary_to_csv",
    "annotate_frame",
    "COLORS",
    "altitude_bound",
    "spearman_rho",
]

log = logging.getLogger(__name__)

DEFAULT_ALTITUDES = tuple(float(a) for a in range(30, 151, 10))
# 640x360 frames, square pixels, 90 degree horizontal field of view.
DEFAULT_INTRINSICS = CameraIntrinsics(640, 360, 0.0064, 0.0036, 0.0032)

COLORS = {
    "water": (60, 120, 180),
    "ship": (200, 80, 60),
    "unknown": (150, 150, 150),
    "hull": (0, 0, 0),
    "distance": (255, 220, 0),
}


@dataclass(frozen=True)
class SweepConfig:
    altitudes: tuple = DEFAULT_ALTITUDES
    samples_per_altitude: int = 100
    scene_params: SceneParams = field(default_factory=SceneParams)
    noise: float = 0.0
    base_seed: int = 0
    intrinsics: CameraIntrinsics = DEFAULT_INTRINSICS
    extrinsic: Optional[RigidTransform] = None
    hull: Optional[HullModel] = None
    jitter_fraction: float = 0.1
    vessel_threshold: float = 0.5
    vessel_dilation: float = 3.0

    def __post_init__(self):
        object.__setattr__(self, "altitudes", tuple(float(a) for a in self.altitudes))
        if not self.altitudes or any(not (a > 0) for a in self.altitudes):
            raise ValueError("altitudes must be positive")
        if self.samples_per_altitude < 1:
            raise ValueError("samples_per_altitude must be at least 1")


@dataclass(frozen=True)
class EvalRecord:
    altitude: float
    sample_index: int
    section_id: int
    estimated: Optional[float]
    truth: Optional[float]

    @property
    def abs_error(self) -> Optional[float]:
        if self.estimated is None or self.truth is None:
            return None
        return abs(self.estimated - self.truth)


@dataclass(frozen=True)
class AltitudeSummary:
    altitude: float
    n: int
    mean_abs_error: float
    std_dev: float
    median: float
    q1: float
    q3: float
    outlier_count: int
    n_missing: int = 0
    n_both_absent: int = 0


def sample_seed(base_seed: int, altitude: float, sample: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([int(base_seed), int(round(altitude * 1000)), int(sample)])


def run_sample(config: SweepConfig, altitude: float, sample: int):
    """Simulate, measure and score one frame.

    Returns ``(records, report, truth)``.
    """
    hull = config.hull or default_hull()
    rng = np.random.default_rng(sample_seed(config.base_seed, altitude, sample))
    scene_seed = int(rng.integers(2**63))
    jitter = rng.uniform(-config.jitter_fraction * altitude, config.jitter_fraction * altitude, 2)
    noise_seed = int(rng.integers(2**63))

    scene = generate_scene(scene_seed, config.scene_params, hull)
    vp = scene.vessel_pose
    uav = Pose(vp.x + jitter[0], vp.y + jitter[1], altitude)
    pmap = build_projection(config.intrinsics, uav, vp, config.extrinsic)
    mask = rasterize(scene, pmap)
    if config.noise > 0:
        mask = add_mask_noise(mask, noise_seed, config.noise)
    report = estimate_distances(
        mask,
        uav,
        vp,
        config.intrinsics,
        config.extrinsic,
        hull,
        vessel_threshold=config.vessel_threshold,
        vessel_dilation=config.vessel_dilation,
    )
    truth = ground_truth(scene, camera_footprint(pmap))
    records = [
        EvalRecord(altitude, sample, s.section_id, s.metric_distance, t)
        for s, t in zip(report.sections, truth.distances)
    ]
    return records, report, truth


def _sample_records(args):
    config, altitude, sample = args
    try:
        return run_sample(config, altitude, sample)[0]
    except VesselRangeError as exc:
        log.warning("altitude %g sample %d skipped: %s", altitude, sample, exc)
        return []


def run_sweep(config: SweepConfig, jobs: int = 1) -> list[EvalRecord]:
    """Evaluate every (altitude, sample) pair; output sorted by (altitude, sample, section)."""
    work = [(config, a, s) for a in config.altitudes for s in range(config.samples_per_altitude)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_sample_records, work, chunksize=4))
    else:
        chunks = [_sample_records(w) for w in work]
    records = [r for chunk in chunks for r in chunk]
    records.sort(key=lambda r: (r.altitude, r.sample_index, r.section_id))
    return records


def _quartiles(values: np.ndarray):
    return tuple(float(v) for v in np.percentile(values, [25, 50, 75], method="linear"))


def summarize(records: Sequence[EvalRecord]) -> list[AltitudeSummary]:
    """Per-altitude error statistics (linear-interpolation quartiles, 1.5 IQR fence)."""
    if not records:
        raise ValueError("no records to summarize")
    groups: dict = defaultdict(list)
    missing: dict = defaultdict(int)
    both_absent: dict = defaultdict(int)
    for r in records:
        err = r.abs_error
        if err is None:
            missing[r.altitude] += 1
            if r.estimated is None and r.truth is None:
                both_absent[r.altitude] += 1
        else:
            groups[r.altitude].append(err)
    out = []
    for altitude in sorted(set(groups) | set(missing)):
        values = np.sort(np.asarray(groups.get(altitude, []), dtype=float))
        if len(values) == 0:
            log.warning("altitude %g has no scored records; omitted from summary", altitude)
            continue
        q1, med, q3 = _quartiles(values)
        fence = q3 + 1.5 * (q3 - q1)
        out.append(
            AltitudeSummary(
                altitude,
                len(values),
                float(np.mean(values)),
                float(np.std(values)),
                med,
                q1,
                q3,
                int(np.sum(values > fence)),
                missing[altitude],
                both_absent[altitude],
            )
        )
    return out


def _num(v: Optional[float]) -> str:
    return "" if v is None else f"{v:.6f}"


def records_to_csv(records: Sequence[EvalRecord]) -> str:
    out = io.StringIO()
    out.write("altitude,sample,section_id,estimated,truth,abs_error\n")
    for r in records:
        out.write(
            f"{r.altitude:g},{r.sample_index},{r.section_id},"
            f"{_num(r.estimated)},{_num(r.truth)},{_num(r.abs_error)}\n"
        )
    return out.getvalue()


def summary_to_csv(summaries: Sequence[AltitudeSummary]) -> str:
    out = io.StringIO()
    out.write("altitude,n,mean,std,median,q1,q3,outliers\n")
    for s in summaries:
        out.write(
            f"{s.altitude:g},{s.n},{s.mean_abs_error:.6f},{s.std_dev:.6f},"
            f"{s.median:.6f},{s.q1:.6f},{s.q3:.6f},{s.outlier_count}\n"
        )
    return out.getvalue()


# 5x7 bitmap of '?'
_QUESTION = np.array(
    [
        [0, 1, 1, 1, 0],
        [1, 0, 0, 0, 1],
        [0, 0, 0, 0, 1],
        [0, 0, 0, 1, 0],
        [0, 0, 1, 0, 0],
        [0, 0, 0, 0, 0],
        [0, 0, 1, 0, 0],
    ],
    dtype=bool,
)


def _draw_line(img: np.ndarray, p0, p1, color) -> None:
    """Bresenham line between rounded endpoints, clipped to the image."""
    x0, y0 = int(round(p0[0])), int(round(p0[1]))
    x1, y1 = int(round(p1[0])), int(round(p1[1]))
    h, w = img.shape[:2]
    dx, dy = abs(x1 - x0), -abs(y1 - y0)
    sx = 1 if x0 < x1 else -1
    sy = 1 if y0 < y1 else -1
    err = dx + dy
    # guard against absurd off-screen endpoints
    limit = 4 * (w + h) + dx - dy
    for _ in range(limit + 1):
        if 0 <= x0 < w and 0 <= y0 < h:
            img[y0, x0] = color
        if x0 == x1 and y0 == y1:
            break
        e2 = 2 * err
        if e2 >= dy:
            err += dy
            x0 += sx
        if e2 <= dx:
            err += dx
            y0 += sy


def _draw_text_qq(img: np.ndarray, center, color) -> None:
    glyph = np.hstack([_QUESTION, np.zeros((7, 1), bool), _QUESTION])
    gh, gw = glyph.shape
    top = int(round(center[1])) - gh // 2
    left = int(round(center[0])) - gw // 2
    h, w = img.shape[:2]
    for r, c in zip(*np.nonzero(glyph)):
        y, x = top + r, left + c
        if 0 <= y < h and 0 <= x < w:
            img[y, x] = color


def annotate_frame(
    mask: LabelMask,
    report: FrameReport,
    segments: Sequence[ImageSegment],
    contours=None,
) -> np.ndarray:
    """Render an RGB (h, w, 3) overlay of classes, hull sections and distances.

    ``contours`` is accepted for call-site symmetry with the pipeline and is
    not drawn.
    """
    palette = np.array([COLORS["water"], COLORS["ship"], COLORS["unknown"]], dtype=np.uint8)
    img = palette[mask.labels].copy()
    for seg in segments:
        _draw_line(img, seg.a, seg.b, COLORS["hull"])
    by_id = {s.section_id: s for s in report.sections}
    for seg in segments:
        sd = by_id.get(seg.section_id)
        if sd is not None and sd.present:
            _draw_line(img, sd.closest_hull_point, sd.closest_contour_point, COLORS["distance"])
    for seg in segments:
        sd = by_id.get(seg.section_id)
        if sd is None or not sd.present:
            _draw_text_qq(img, seg.midpoint, COLORS["hull"])
    return img


def altitude_bound(altitude: float, intrinsics: CameraIntrinsics = DEFAULT_INTRINSICS) -> float:
    """Three ground sample distances, the quantisation error allowance."""
    return 3.0 * gsd_factor(altitude, intrinsics)


def spearman_rho(x, y) -> float:
    """Spearman rank correlation (average ranks for ties); 0 for constant input."""
    from scipy.stats import spearmanr

    if np.ptp(np.asarray(x, dtype=float)) == 0 or np.ptp(np.asarray(y, dtype=float)) == 0:
        return 0.0
    rho = spearmanr(x, y).statistic
    return float(rho) if not math.isnan(rho) else 0.0
