"""
From vessel coordinates to pixels
=================================

A nadir camera 80 m above the water looks down at a vessel. We build the
projection map and push a few deck points through it, then cast pixels
back onto the water plane.
"""
import math

import numpy as np

from vesselrange.frames import Pose, backproject_to_water, build_projection, project_point
from vesselrange.harness import DEFAULT_INTRINSICS
from vesselrange.ranging import gsd_factor

# 640x360 frames with a 90 degree horizontal field of view.
intr = DEFAULT_INTRINSICS
print("focal lengths in pixels:", intr.fx, intr.fy, "principal point:", intr.principal_point)

# The vessel sits at the world origin, bow pointing north-east.
vessel = Pose(0.0, 0.0, 0.0, yaw=math.radians(45))
# The UAV hovers slightly east of it.
uav = Pose(5.0, 0.0, 80.0)
pmap = build_projection(intr, uav, vessel)
print("camera altitude:", pmap.camera_altitude)

# The bow (12 m ahead) and the stern land on a line at 45 degrees on screen.
for name, p in [("origin", (0, 0, 0)), ("bow", (12, 0, 0)), ("stern", (-12, 0, 0))]:
    print(f"{name:>6} ->", np.round(project_point(pmap, p), 3))

# One pixel on the ground at this altitude:
gsd = gsd_factor(pmap.camera_altitude, intr)
print(f"ground sample distance: {gsd:.4f} m/px")

# Casting the bow pixel back to the water returns the bow in world coordinates.
bow_px = project_point(pmap, (12, 0, 0))
print("bow back on the water:", np.round(backproject_to_water(pmap, bow_px), 6))
