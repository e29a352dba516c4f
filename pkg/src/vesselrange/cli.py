"""Command-line entry point: ``vesselrange {estimate,simulate,sweep,selftest}``.

Exit codes: 0 success, 1 input/parse error, 2 geometric precondition
failure (hull out of view, hull behind camera), 3 self-test failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .contours import binarize, extract_contours, load_label_mask, save_label_mask
from .errors import (
    BehindCameraError,
    ConfigError,
    HullOutOfViewError,
    InvalidConfigurationError,
    MaskFormatError,
    VesselRangeError,
)
from .frames import CameraIntrinsics, Pose, RigidTransform, build_projection, pose_to_transform
from .harness import SweepConfig, annotate_frame, records_to_csv, run_sweep, summarize, summary_to_csv
from .hull import HullModel, load_hull, project_sections
from .netpbm import write_ppm
from .ranging import estimate_distances
from .simulator import SceneParams, camera_footprint, ground_truth, load_scene, rasterize

log = logging.getLogger("vesselrange")

EXIT_OK, EXIT_INPUT, EXIT_GEOMETRY, EXIT_SELFTEST = 0, 1, 2, 3

_POSE_KEYS = ("x", "y", "z", "yaw", "pitch", "roll")
_INTRINSIC_KEYS = {
    "image_width",
    "image_height",
    "sensor_width",
    "sensor_height",
    "focal_length",
    "principal_point",
}
_SCENE_PARAM_KEYS = {"n_obstacles", "berth_gap_range", "obstacle_size_range", "berth_length", "berth_depth"}
_CONFIG_KEYS = {
    "intrinsics",
    "camera_extrinsic",
    "hull_file",
    "max_section_length",
    "vessel_pose",
    "uav_pose",
    "vessel_threshold",
    "vessel_dilation",
    "anomaly_ratio",
    "scene_params",
}

# Camera mount in the body frame: looking straight down, image right = body +x.
NADIR_MOUNT = Pose(roll=math.pi)


@dataclass(frozen=True)
class RunConfig:
    intrinsics: CameraIntrinsics
    hull_file: Optional[Path] = None
    camera_mount: Pose = NADIR_MOUNT
    max_section_length: float = 3.0
    vessel_pose: Optional[Pose] = None
    uav_pose: Optional[Pose] = None
    vessel_threshold: float = 0.5
    vessel_dilation: float = 3.0
    anomaly_ratio: float = 1.25
    scene_params: SceneParams = field(default_factory=SceneParams)

    @property
    def extrinsic(self) -> RigidTransform:
        """Camera-from-body transform of the configured mount."""
        return pose_to_transform(self.camera_mount).inverse()

    def load_hull(self) -> HullModel:
        if self.hull_file is None:
            raise ConfigError("config.hull_file: required for this command")
        try:
            return load_hull(self.hull_file, self.max_section_length)
        except OSError as exc:
            raise ConfigError(f"config.hull_file: cannot read {self.hull_file}: {exc}") from None
        except ValueError as exc:
            raise ConfigError(f"config.hull_file: {exc}") from None


def _number(value, where: str, positive: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"{where}: expected a finite number, got {value!r}")
    if positive and not value > 0:
        raise ConfigError(f"{where}: must be > 0, got {value!r}")
    return float(value)


def _object(value, where: str, allowed, required=()) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(f"{where}: expected an object")
    unknown = sorted(set(value) - set(allowed))
    if unknown:
        raise ConfigError(f"{where}.{unknown[0]}: unknown key")
    for key in required:
        if key not in value:
            raise ConfigError(f"{where}.{key}: missing required key")
    return value


def _pose(value, where: str) -> Pose:
    doc = _object(value, where, _POSE_KEYS)
    return Pose(**{k: _number(v, f"{where}.{k}") for k, v in doc.items()})


def _pair(value, where: str) -> tuple:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError(f"{where}: expected a two-element list")
    return tuple(_number(v, f"{where}[{i}]") for i, v in enumerate(value))


def parse_config(doc, base_dir: Path = Path(".")) -> RunConfig:
    """Validate a config document; every error names the offending field."""
    doc = _object(doc, "config", _CONFIG_KEYS, required=("intrinsics",))
    intr_doc = _object(
        doc["intrinsics"],
        "config.intrinsics",
        _INTRINSIC_KEYS,
        required=sorted(_INTRINSIC_KEYS - {"principal_point"}),
    )
    kwargs = {}
    for key in ("image_width", "image_height"):
        v = intr_doc[key]
        if isinstance(v, bool) or not isinstance(v, int) or v <= 0:
            raise ConfigError(f"config.intrinsics.{key}: expected a positive integer, got {v!r}")
        kwargs[key] = v
    for key in ("sensor_width", "sensor_height", "focal_length"):
        kwargs[key] = _number(intr_doc[key], f"config.intrinsics.{key}", positive=True)
    if "principal_point" in intr_doc:
        kwargs["principal_point"] = _pair(intr_doc["principal_point"], "config.intrinsics.principal_point")
    intrinsics = CameraIntrinsics(**kwargs)

    out = {"intrinsics": intrinsics}
    if "hull_file" in doc:
        if not isinstance(doc["hull_file"], str):
            raise ConfigError("config.hull_file: expected a path string")
        out["hull_file"] = (base_dir / doc["hull_file"]).resolve()
    if "camera_extrinsic" in doc:
        out["camera_mount"] = _pose(doc["camera_extrinsic"], "config.camera_extrinsic")
    for key in ("vessel_pose", "uav_pose"):
        if key in doc:
            out[key] = _pose(doc[key], f"config.{key}")
    for key in ("max_section_length", "vessel_dilation", "anomaly_ratio"):
        if key in doc:
            out[key] = _number(doc[key], f"config.{key}", positive=True)
    if "vessel_threshold" in doc:
        t = _number(doc["vessel_threshold"], "config.vessel_threshold")
        if not 0.0 < t <= 1.0:
            raise ConfigError("config.vessel_threshold: must be in (0, 1]")
        out["vessel_threshold"] = t
    if "scene_params" in doc:
        sp = _object(doc["scene_params"], "config.scene_params", _SCENE_PARAM_KEYS)
        params = {}
        for key, v in sp.items():
            where = f"config.scene_params.{key}"
            if key == "n_obstacles":
                if isinstance(v, bool) or not isinstance(v, int) or v < 0:
                    raise ConfigError(f"{where}: expected a non-negative integer")
                params[key] = v
            elif key in ("berth_gap_range", "obstacle_size_range"):
                params[key] = _pair(v, where)
            else:
                params[key] = _number(v, where, positive=True)
        try:
            out["scene_params"] = SceneParams(**params)
        except ValueError as exc:
            raise ConfigError(f"config.scene_params: {exc}") from None
    return RunConfig(**out)


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    try:
        return parse_config(doc, path.parent)
    except InvalidConfigurationError as exc:
        raise ConfigError(f"config.intrinsics: {exc}") from None


def parse_altitudes(text: str) -> list[float]:
    """``start:stop:step`` (stop included when reached exactly) or ``a,b,c``."""
    try:
        if ":" in text:
            start, stop, step = (float(p) for p in text.split(":"))
            if step <= 0 or stop < start:
                raise ValueError
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            values = [start + k * step for k in range(count)]
        else:
            values = [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise ConfigError(f"--altitudes: cannot parse {text!r}") from None
    if not values or any(not (v > 0) for v in values):
        raise ConfigError(f"--altitudes: values must be positive, got {text!r}")
    return values


def _write(path, data) -> None:
    p = Path(path)
    if isinstance(data, str):
        p.write_text(data)
    else:
        p.write_bytes(data)


def cmd_estimate(args) -> int:
    cfg = load_config(args.config)
    for key in ("vessel_pose", "uav_pose"):
        if getattr(cfg, key) is None:
            raise ConfigError(f"config.{key}: required for estimate")
    hull = cfg.load_hull()
    try:
        mask = load_label_mask(args.mask)
    except OSError as exc:
        raise MaskFormatError(f"cannot read mask {args.mask}: {exc}") from None
    except MaskFormatError as exc:
        raise MaskFormatError(f"{args.mask}: {exc}") from None
    report = estimate_distances(
        mask,
        cfg.uav_pose,
        cfg.vessel_pose,
        cfg.intrinsics,
        cfg.extrinsic,
        hull,
        vessel_threshold=cfg.vessel_threshold,
        vessel_dilation=cfg.vessel_dilation,
        anomaly_ratio=cfg.anomaly_ratio,
    )
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    _write(args.out_report, report.to_csv())
    if args.out_annot:
        pmap = build_projection(cfg.intrinsics, cfg.uav_pose, cfg.vessel_pose, cfg.extrinsic)
        segments = project_sections(hull, pmap)
        contours = extract_contours(binarize(mask))
        write_ppm(args.out_annot, annotate_frame(mask, report, segments, contours))
    return EXIT_OK


def truth_to_csv(distances) -> str:
    lines = ["section_id,truth"]
    lines += [f"{i},{'??' if d is None else f'{d:.6f}'}" for i, d in enumerate(distances)]
    return "\n".join(lines) + "\n"


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    if not (math.isfinite(args.altitude) and args.altitude > 0):
        raise ConfigError(f"--altitude: invalid-altitude, must be > 0, got {args.altitude}")
    try:
        scene = load_scene(args.scene, cfg.max_section_length)
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"invalid scene {args.scene}: {exc}") from None
    vp = scene.vessel_pose
    base = cfg.uav_pose or Pose(vp.x, vp.y, 0.0)
    uav = Pose(base.x, base.y, args.altitude, base.yaw, base.pitch, base.roll)
    pmap = build_projection(cfg.intrinsics, uav, vp, cfg.extrinsic)
    mask = rasterize(scene, pmap)
    save_label_mask(args.out_mask, mask)
    if args.out_truth:
        truth = ground_truth(scene, camera_footprint(pmap))
        _write(args.out_truth, truth_to_csv(truth.distances))
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    altitudes = parse_altitudes(args.altitudes)
    if args.samples < 1:
        raise ConfigError("--samples: must be at least 1")
    if not 0.0 <= args.noise < 0.5:
        raise ConfigError("--noise: must be in [0, 0.5)")
    hull = cfg.load_hull() if cfg.hull_file is not None else None
    sweep = SweepConfig(
        altitudes=tuple(altitudes),
        samples_per_altitude=args.samples,
        scene_params=cfg.scene_params,
        noise=args.noise,
        base_seed=args.seed,
        intrinsics=cfg.intrinsics,
        extrinsic=cfg.extrinsic,
        hull=hull,
        vessel_threshold=cfg.vessel_threshold,
        vessel_dilation=cfg.vessel_dilation,
    )
    records = run_sweep(sweep, jobs=args.jobs)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "records.csv").write_text(records_to_csv(records))
    summaries = summarize(records) if records else []
    (out / "summary.csv").write_text(summary_to_csv(summaries))
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .selftest import run_all

    ok = True
    for name, passed, detail in run_all():
        print(f"{name:<10} {'PASS' if passed else 'FAIL'}  {detail}")
        ok &= passed
    return EXIT_OK if ok else EXIT_SELFTEST


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vesselrange", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="measure per-section distances on a label mask")
    p.add_argument("--config", required=True)
    p.add_argument("--mask", required=True, help="P5 label mask (0 water, 128 ship, 255 unknown)")
    p.add_argument("--out-report", required=True, help="CSV report path")
    p.add_argument("--out-annot", help="optional PPM annotation path")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("simulate", help="rasterise a scene file into a label mask")
    p.add_argument("--scene", required=True)
    p.add_argument("--config", required=True)
    p.add_argument("--altitude", required=True, type=float)
    p.add_argument("--out-mask", required=True)
    p.add_argument("--out-truth", help="optional ground-truth CSV path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="altitude sweep over random synthetic scenes")
    p.add_argument("--config", required=True)
    p.add_argument("--altitudes", default="30:150:10")
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--noise", type=float, default=0.0, help="mask flip rate")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("selftest", help="run the built-in oracle equivalence checks")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except (HullOutOfViewError, BehindCameraError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY
    except (VesselRangeError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
