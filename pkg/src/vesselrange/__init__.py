"""Vessel-to-obstacle ranging from a nadir UAV camera and GPS poses.

A semantic label mask is reduced to obstacle outlines, the vessel hull is
projected into the image, and each hull section gets the metric distance
to its nearest obstacle through the ground sample distance.
"""
from .contours import BinaryMask, Contour, LabelMask, binarize, extract_contours, split_vessel_and_obstacles
from .errors import VesselRangeError
from .frames import (
    CameraIntrinsics,
    Pose,
    ProjectionMap,
    RigidTransform,
    backproject_to_water,
    build_projection,
    nadir_extrinsic,
    pose_to_transform,
    project_point,
)
from .hull import HullModel, ImageSegment, Section, convex_hull, discretize_sections, make_hull, project_sections
from .ranging import (
    FrameReport,
    SectionDistance,
    assign_points_to_sections,
    build_report,
    estimate_distances,
    gsd_factor,
    min_perpendicular_distance,
)

__version__ = "0.1.0"
