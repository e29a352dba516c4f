"""
Ranging in a single frame
=========================

Generate a random berth scene, render a perfect label mask from 50 m, and
compare the per-section distances measured in the image with the ground
truth computed in world coordinates. The annotated frame is written next
to this script's temporary output directory.
"""
import tempfile
from pathlib import Path

from vesselrange.frames import Pose, build_projection
from vesselrange.harness import DEFAULT_INTRINSICS, annotate_frame
from vesselrange.hull import project_sections
from vesselrange.netpbm import write_ppm
from vesselrange.ranging import estimate_distances
from vesselrange.simulator import add_mask_noise, camera_footprint, generate_scene, ground_truth, rasterize

scene = generate_scene(seed=7)
print(f"{len(scene.obstacles)} obstacles around a vessel with yaw {scene.vessel_pose.yaw:.2f} rad")

uav = Pose(2.0, -1.0, 50.0)
pmap = build_projection(DEFAULT_INTRINSICS, uav, scene.vessel_pose)
mask = rasterize(scene, pmap)

report = estimate_distances(mask, uav, scene.vessel_pose, DEFAULT_INTRINSICS, None, scene.hull)
truth = ground_truth(scene, camera_footprint(pmap))
print(f"gsd {report.gsd_factor:.4f} m/px; quantisation allowance {3 * report.gsd_factor:.3f} m")

print("section  estimate   truth")
for s, t in zip(report.sections, truth.distances):
    est = "??" if not s.present else f"{s.metric_distance:8.3f}"
    tru = "??" if t is None else f"{t:8.3f}"
    print(f"{s.section_id:7d}  {est:>8}  {tru:>8}")

# A noisy mask, as a segmentation network might produce it.
noisy = add_mask_noise(mask, seed=1, flip_rate=0.05)
noisy_report = estimate_distances(noisy, uav, scene.vessel_pose, DEFAULT_INTRINSICS, None, scene.hull)
print("noisy-mask warnings:", list(noisy_report.warnings))

out = Path(tempfile.mkdtemp(prefix="vesselrange-"))
write_ppm(out / "frame.ppm", annotate_frame(mask, report, project_sections(scene.hull, pmap)))
(out / "report.csv").write_text(report.to_csv())
print("annotated frame and report written to", out)
