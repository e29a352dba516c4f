"""Coordinate frames, rigid transforms and the pinhole projection chain.

Conventions
-----------
World frame: ENU, x east, y north, z up. The water surface is the plane z = 0.
Body/vessel frames: x forward, y left, z up; orientation is yaw-pitch-roll
applied in Z-Y-X order, so ``R = Rz(yaw) @ Ry(pitch) @ Rx(roll)``.
Camera frame: +z along the optical axis, +x image right, +y image down.
Image frame: origin top-left, +u right, +v down. Integer pixel coordinates
address pixel centres.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BehindCameraError,
    InvalidConfigurationError,
    InvalidPoseError,
    NoIntersectionError,
)

__all__ = [
    "Pose",
    "RigidTransform",
    "CameraIntrinsics",
    "ProjectionMap",
    "normalize_angle",
    "rotation_zyx",
    "pose_to_transform",
    "transform_to_pose",
    "nadir_extrinsic",
    "build_projection",
    "project_point",
    "project_points",
    "project_world_points",
    "backproject_to_water",
    "backproject_pixels",
]


def normalize_angle(angle: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    wrapped = math.remainder(angle, 2.0 * math.pi)
    if wrapped <= -math.pi:
        wrapped += 2.0 * math.pi
    return wrapped


def rotation_zyx(yaw: float, pitch: float, roll: float) -> np.ndarray:
    cy, sy = math.cos(yaw), math.sin(yaw)
    cp, sp = math.cos(pitch), math.sin(pitch)
    cr, sr = math.cos(roll), math.sin(roll)
    return np.array(
        [
            [cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr],
            [sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr],
            [-sp, cp * sr, cp * cr],
        ]
    )


@dataclass(frozen=True)
class Pose:
    """6-DoF pose of a body in the world frame (meters, radians)."""

    x: float = 0.0
    y: float = 0.0
    z: float = 0.0
    yaw: float = 0.0
    pitch: float = 0.0
    roll: float = 0.0

    def __post_init__(self):
        values = (self.x, self.y, self.z, self.yaw, self.pitch, self.roll)
        if not all(math.isfinite(float(v)) for v in values):
            raise InvalidPoseError(f"pose components must be finite: {values}")
        for name in ("x", "y", "z"):
            object.__setattr__(self, name, float(getattr(self, name)))
        for name in ("yaw", "pitch", "roll"):
            object.__setattr__(self, name, normalize_angle(float(getattr(self, name))))

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def to_dict(self) -> dict:
        return {
            "x": self.x,
            "y": self.y,
            "z": self.z,
            "yaw": self.yaw,
            "pitch": self.pitch,
            "roll": self.roll,
        }


@dataclass(frozen=True, eq=False)
class RigidTransform:
    """Proper rigid motion ``p -> rotation @ p + translation``."""

    rotation: np.ndarray = field(default_factory=lambda: np.eye(3))
    translation: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        rot = np.array(self.rotation, dtype=float).reshape(3, 3)
        trans = np.array(self.translation, dtype=float).reshape(3)
        if not (np.all(np.isfinite(rot)) and np.all(np.isfinite(trans))):
            raise InvalidPoseError("transform entries must be finite")
        if np.max(np.abs(rot @ rot.T - np.eye(3))) > 1e-9 or abs(np.linalg.det(rot) - 1.0) > 1e-9:
            raise InvalidPoseError("rotation must be orthonormal with determinant +1")
        rot.setflags(write=False)
        trans.setflags(write=False)
        object.__setattr__(self, "rotation", rot)
        object.__setattr__(self, "translation", trans)

    @classmethod
    def identity(cls) -> "RigidTransform":
        return cls()

    def matrix(self) -> np.ndarray:
        """4x4 homogeneous matrix."""
        out = np.eye(4)
        out[:3, :3] = self.rotation
        out[:3, 3] = self.translation
        return out

    def compose(self, other: "RigidTransform") -> "RigidTransform":
        """``self @ other``: apply ``other`` first."""
        return RigidTransform(
            self.rotation @ other.rotation,
            self.rotation @ other.translation + self.translation,
        )

    __matmul__ = compose

    def inverse(self) -> "RigidTransform":
        rt = self.rotation.T
        return RigidTransform(rt, -rt @ self.translation)

    def apply(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        return pts @ self.rotation.T + self.translation


def pose_to_transform(pose: Pose) -> RigidTransform:
    """World-from-body transform of ``pose``."""
    if not isinstance(pose, Pose):
        raise InvalidPoseError(f"expected Pose, got {type(pose).__name__}")
    return RigidTransform(rotation_zyx(pose.yaw, pose.pitch, pose.roll), pose.position)


def transform_to_pose(transform: RigidTransform) -> Pose:
    """Inverse of :func:`pose_to_transform` (away from pitch = +-pi/2)."""
    r = transform.rotation
    pitch = math.asin(max(-1.0, min(1.0, -r[2, 0])))
    yaw = math.atan2(r[1, 0], r[0, 0])
    roll = math.atan2(r[2, 1], r[2, 2])
    t = transform.translation
    return Pose(t[0], t[1], t[2], yaw, pitch, roll)


def nadir_extrinsic() -> RigidTransform:
    """Camera-from-body transform of a downward-looking camera at the body origin.

    Image right follows body +x and image down follows body -y.
    """
    return pose_to_transform(Pose(roll=math.pi)).inverse()


@dataclass(frozen=True)
class CameraIntrinsics:
    image_width: int
    image_height: int
    sensor_width: float
    sensor_height: float
    focal_length: float
    principal_point: tuple | None = None

    def __post_init__(self):
        if int(self.image_width) != self.image_width or int(self.image_height) != self.image_height:
            raise InvalidConfigurationError("image dimensions must be integers")
        object.__setattr__(self, "image_width", int(self.image_width))
        object.__setattr__(self, "image_height", int(self.image_height))
        for name in ("image_width", "image_height", "sensor_width", "sensor_height", "focal_length"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidConfigurationError(f"{name} must be strictly positive, got {value}")
        if self.principal_point is None:
            pp = ((self.image_width - 1) / 2.0, (self.image_height - 1) / 2.0)
        else:
            pp = tuple(float(v) for v in self.principal_point)
            if len(pp) != 2 or not all(math.isfinite(v) for v in pp):
                raise InvalidConfigurationError("principal_point must be two finite numbers")
        object.__setattr__(self, "principal_point", pp)

    @property
    def fx(self) -> float:
        return self.focal_length * self.image_width / self.sensor_width

    @property
    def fy(self) -> float:
        return self.focal_length * self.image_height / self.sensor_height

    @property
    def cx(self) -> float:
        return self.principal_point[0]

    @property
    def cy(self) -> float:
        return self.principal_point[1]

    @property
    def K(self) -> np.ndarray:
        return np.array([[self.fx, 0.0, self.cx], [0.0, self.fy, self.cy], [0.0, 0.0, 1.0]])

    def to_dict(self) -> dict:
        return {
            "image_width": self.image_width,
            "image_height": self.image_height,
            "sensor_width": self.sensor_width,
            "sensor_height": self.sensor_height,
            "focal_length": self.focal_length,
            "principal_point": list(self.principal_point),
        }


@dataclass(frozen=True, eq=False)
class ProjectionMap:
    """Vessel-frame to pixel mapping for one frame.

    ``matrix`` is the 3x4 product K [R|t]. The world-frame pieces of the
    chain are kept so pixels can be cast back onto the water plane.
    """

    matrix: np.ndarray
    camera_altitude: float
    intrinsics: CameraIntrinsics
    camera_from_world: RigidTransform
    world_from_vessel: RigidTransform

    @property
    def camera_from_vessel(self) -> RigidTransform:
        return self.camera_from_world @ self.world_from_vessel

    @property
    def camera_center(self) -> np.ndarray:
        return self.camera_from_world.inverse().translation


def build_projection(
    intrinsics: CameraIntrinsics,
    uav_pose: Pose,
    vessel_pose: Pose,
    camera_extrinsic: RigidTransform | None = None,
) -> ProjectionMap:
    """Compose K * T(camera<-body) * T(body<-world) * T(world<-vessel)."""
    if camera_extrinsic is None:
        camera_extrinsic = nadir_extrinsic()
    world_from_body = pose_to_transform(uav_pose)
    world_from_vessel = pose_to_transform(vessel_pose)
    camera_from_world = camera_extrinsic @ world_from_body.inverse()
    altitude = float(camera_from_world.inverse().translation[2])
    if not altitude > 0.0:
        raise InvalidConfigurationError(
            f"camera must be above the water plane, altitude = {altitude}"
        )
    camera_from_vessel = camera_from_world @ world_from_vessel
    matrix = intrinsics.K @ camera_from_vessel.matrix()[:3, :]
    matrix.setflags(write=False)
    return ProjectionMap(matrix, altitude, intrinsics, camera_from_world, world_from_vessel)


def _divide(homog: np.ndarray) -> np.ndarray:
    depth = homog[..., 2]
    if np.any(~(depth > 0.0)):
        raise BehindCameraError("point has non-positive depth in the camera frame")
    return homog[..., :2] / depth[..., None]


def project_points(pmap: ProjectionMap, points) -> np.ndarray:
    """Project an (N, 3) array of vessel-frame points to (N, 2) pixels."""
    pts = np.asarray(points, dtype=float)
    if pts.shape[-1] == 2:
        pts = np.concatenate([pts, np.zeros(pts.shape[:-1] + (1,))], axis=-1)
    homog = pts @ pmap.matrix[:, :3].T + pmap.matrix[:, 3]
    return _divide(homog)


def project_point(pmap: ProjectionMap, point) -> np.ndarray:
    """Project one vessel-frame point; the result may fall outside the image."""
    pt = np.asarray(point, dtype=float).reshape(-1)
    if not np.all(np.isfinite(pt)):
        raise InvalidPoseError("point must be finite")
    return project_points(pmap, pt[None, :])[0]


def project_world_points(pmap: ProjectionMap, points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.shape[-1] == 2:
        pts = np.concatenate([pts, np.zeros(pts.shape[:-1] + (1,))], axis=-1)
    cam = pmap.camera_from_world.apply(pts)
    return _divide(cam @ pmap.intrinsics.K.T)


def backproject_pixels(pmap: ProjectionMap, pixels) -> tuple[np.ndarray, np.ndarray]:
    """Intersect the viewing rays of (N, 2) pixels with the plane z = 0.

    Returns ``(points, hit)`` where ``hit`` flags rays that reach the water
    in front of the camera; rows of ``points`` where ``hit`` is false are nan.
    """
    px = np.asarray(pixels, dtype=float).reshape(-1, 2)
    intr = pmap.intrinsics
    rays_cam = np.column_stack(
        [(px[:, 0] - intr.cx) / intr.fx, (px[:, 1] - intr.cy) / intr.fy, np.ones(len(px))]
    )
    world_from_camera = pmap.camera_from_world.inverse()
    rays = rays_cam @ world_from_camera.rotation.T
    origin = world_from_camera.translation
    dz = rays[:, 2]
    with np.errstate(divide="ignore", invalid="ignore"):
        s = -origin[2] / dz
    hit = (dz < 0.0) & np.isfinite(s) & (s > 0.0)
    points = origin + s[:, None] * rays
    points[~hit] = np.nan
    points[hit, 2] = 0.0
    return points, hit


def backproject_to_water(pmap: ProjectionMap, pixel) -> np.ndarray:
    """World point on z = 0 seen at ``pixel``."""
    points, hit = backproject_pixels(pmap, np.asarray(pixel, dtype=float)[None, :])
    if not hit[0]:
        raise NoIntersectionError(f"ray through pixel {tuple(pixel)} never reaches the water")
    return points[0]
