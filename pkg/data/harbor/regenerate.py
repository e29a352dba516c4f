"""Rebuild the bundled harbour example and its golden outputs.

Run from the repository root:  python data/harbor/regenerate.py
"""
import hashlib
import json
from pathlib import Path

from vesselrange.cli import main
from vesselrange.harness import DEFAULT_INTRINSICS
from vesselrange.simulator import generate_scene, save_scene

HERE = Path(__file__).resolve().parent

scene = generate_scene(2024)
save_scene(HERE / "scene.json", scene, hull_file="hull.txt")
vp = scene.vessel_pose
config = {
    "intrinsics": DEFAULT_INTRINSICS.to_dict(),
    "camera_extrinsic": {"x": 0.0, "y": 0.0, "z": 0.0, "yaw": 0.0, "pitch": 0.0, "roll": 3.141592653589793},
    "hull_file": "hull.txt",
    "max_section_length": 3.0,
    "vessel_pose": vp.to_dict(),
    "uav_pose": {"x": vp.x + 3.0, "y": vp.y - 2.0, "z": 50.0, "yaw": 0.0, "pitch": 0.0, "roll": 0.0},
    "vessel_threshold": 0.5,
    "vessel_dilation": 3.0,
}
(HERE / "config.json").write_text(json.dumps(config, indent=2) + "\n")

args = ["--scene", HERE / "scene.json", "--config", HERE / "config.json", "--altitude", "50"]
assert main(["simulate", *map(str, args), "--out-mask", str(HERE / "mask.pgm"), "--out-truth", str(HERE / "truth.csv")]) == 0
assert main([
    "estimate", "--config", str(HERE / "config.json"), "--mask", str(HERE / "mask.pgm"),
    "--out-report", str(HERE / "report_golden.csv"), "--out-annot", str(HERE / "annotation.ppm"),
]) == 0
digest = hashlib.sha256((HERE / "annotation.ppm").read_bytes()).hexdigest()
(HERE / "annotation.sha256").write_text(digest + "\n")
print("annotation sha256", digest)
