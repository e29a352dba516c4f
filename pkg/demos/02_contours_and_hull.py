"""
Obstacle outlines and hull sections
===================================

A hand-drawn label mask holds a vessel and two obstacles. Border following
turns each solid blob into a closed outline; the projected hull picks out
which outline is the vessel itself.
"""
import numpy as np

from vesselrange.contours import SHIP, UNKNOWN, LabelMask, binarize, extract_contours, split_vessel_and_obstacles
from vesselrange.frames import CameraIntrinsics, Pose, build_projection
from vesselrange.hull import make_hull, project_sections

# 80x60 image, one pixel per 0.1 m at 10 m altitude.
intr = CameraIntrinsics(80, 60, 0.0008, 0.0006, 0.001)
hull = make_hull([(-2, -1), (2, -1), (2.5, 0), (2, 1), (-2, 1)], max_section_length=1.0)
print(f"{len(hull)} hull sections, perimeter {hull.perimeter:.2f} m")

pmap = build_projection(intr, Pose(z=10.0), Pose())
segments = project_sections(hull, pmap)

# Paint the mask: vessel in the middle, a dock to the south, a boat to the east.
labels = np.zeros((60, 80), np.uint8)
labels[20:40, 20:60] = SHIP  # vessel silhouette (roughly)
labels[25:35, 60:64] = SHIP  # its bow
labels[48:58, 10:70] = UNKNOWN  # dock
labels[24:36, 68:76] = SHIP  # another boat
mask = LabelMask(labels)

contours = extract_contours(binarize(mask))
for c in contours:
    print(f"contour {c.id}: {len(c)} border pixels, area {c.area():.0f} px, starts at {tuple(c.points[0].tolist())}")

vessel_ids, obstacles, warnings = split_vessel_and_obstacles(contours, segments)
print("vessel contour ids:", vessel_ids)
print("obstacle contour ids:", [c.id for c in obstacles])
print("warnings:", warnings)
