import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_intrinsics, random_pose
from vesselrange.errors import BehindCameraError, InvalidConfigurationError, InvalidPoseError, NoIntersectionError
from vesselrange.frames import (
    CameraIntrinsics,
    Pose,
    RigidTransform,
    backproject_pixels,
    backproject_to_water,
    build_projection,
    nadir_extrinsic,
    normalize_angle,
    pose_to_transform,
    project_point,
    project_points,
    rotation_zyx,
    transform_to_pose,
)
from vesselrange.harness import DEFAULT_INTRINSICS

angles = st.floats(-math.pi, math.pi, allow_nan=False)


def _rot_x(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[1, 0, 0], [0, c, -s], [0, s, c]])


def _rot_y(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, 0, s], [0, 1, 0], [-s, 0, c]])


def _rot_z(a):
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])


def test_normalize_angle_range():
    assert normalize_angle(math.pi) == pytest.approx(math.pi)
    assert normalize_angle(-math.pi) == pytest.approx(math.pi)
    assert normalize_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2)
    assert normalize_angle(0.25) == 0.25


@given(angles, angles, angles)
def test_rotation_matches_elementary_product(yaw, pitch, roll):
    expected = _rot_z(yaw) @ _rot_y(pitch) @ _rot_x(roll)
    np.testing.assert_allclose(rotation_zyx(yaw, pitch, roll), expected, atol=1e-12)


def test_yaw_quarter_turn_maps_east_to_north():
    t = pose_to_transform(Pose(yaw=math.pi / 2))
    np.testing.assert_allclose(t.apply([1.0, 0.0, 0.0]), [0.0, 1.0, 0.0], atol=1e-12)


def test_pose_rejects_non_finite():
    with pytest.raises(InvalidPoseError):
        Pose(x=float("nan"))


def test_transform_rejects_non_rotation():
    with pytest.raises(InvalidPoseError):
        RigidTransform(np.diag([1.0, 1.0, -1.0]))


@settings(max_examples=100)
@given(angles, st.floats(-1.4, 1.4), angles)
def test_pose_transform_round_trip(yaw, pitch, roll):
    pose = Pose(1.0, -2.0, 3.0, yaw, pitch, roll)
    back = transform_to_pose(pose_to_transform(pose))
    np.testing.assert_allclose(
        rotation_zyx(back.yaw, back.pitch, back.roll), rotation_zyx(yaw, pitch, roll), atol=1e-9
    )
    np.testing.assert_allclose(back.position, pose.position)


def test_compose_associative_and_inverse():
    rng = np.random.default_rng(5)
    a, b, c = (pose_to_transform(random_pose(rng, tilt=3.0)) for _ in range(3))
    np.testing.assert_allclose(((a @ b) @ c).matrix(), (a @ (b @ c)).matrix(), atol=1e-9)
    np.testing.assert_allclose((a @ a.inverse()).matrix(), np.eye(4), atol=1e-12)
    pts = rng.normal(size=(10, 3))
    np.testing.assert_allclose((a @ b).apply(pts), a.apply(b.apply(pts)), atol=1e-9)


def test_intrinsics_defaults():
    intr = DEFAULT_INTRINSICS
    assert intr.fx == pytest.approx(320.0)
    assert intr.fy == pytest.approx(320.0)
    assert intr.principal_point == (319.5, 179.5)


@pytest.mark.parametrize("field", ["sensor_width", "focal_length", "image_width"])
def test_intrinsics_reject_non_positive(field):
    kwargs = dict(image_width=10, image_height=10, sensor_width=1.0, sensor_height=1.0, focal_length=1.0)
    kwargs[field] = 0
    with pytest.raises(InvalidConfigurationError):
        CameraIntrinsics(**kwargs)


def test_nadir_projection_of_vessel_origin_is_principal_point():
    pmap = build_projection(DEFAULT_INTRINSICS, Pose(z=50.0), Pose())
    np.testing.assert_allclose(project_point(pmap, [0, 0, 0]), [319.5, 179.5], atol=1e-12)
    # East goes right, north goes up the image.
    np.testing.assert_allclose(project_point(pmap, [10, 0, 0]), [319.5 + 64.0, 179.5], atol=1e-9)
    np.testing.assert_allclose(project_point(pmap, [0, 10, 0]), [319.5, 179.5 - 64.0], atol=1e-9)


def test_nadir_pixel_scale_equals_inverse_gsd():
    for altitude in (30.0, 75.0, 150.0):
        pmap = build_projection(DEFAULT_INTRINSICS, Pose(z=altitude), Pose(yaw=0.4))
        d = project_point(pmap, [1, 0, 0]) - project_point(pmap, [0, 0, 0])
        assert np.hypot(*d) == pytest.approx(DEFAULT_INTRINSICS.fx / altitude, rel=1e-12)


def test_translation_invariance():
    base = build_projection(DEFAULT_INTRINSICS, Pose(z=40.0), Pose(yaw=0.3))
    moved = build_projection(DEFAULT_INTRINSICS, Pose(123.0, -45.0, 40.0), Pose(123.0, -45.0, 0.0, 0.3))
    np.testing.assert_allclose(base.matrix, moved.matrix, atol=1e-9)


def test_altitude_must_be_positive():
    with pytest.raises(InvalidConfigurationError):
        build_projection(DEFAULT_INTRINSICS, Pose(z=0.0), Pose())


def test_point_behind_camera():
    pmap = build_projection(DEFAULT_INTRINSICS, Pose(z=10.0), Pose())
    with pytest.raises(BehindCameraError):
        project_point(pmap, [0, 0, 20.0])


def test_explicit_matrix_oracle():
    rng = np.random.default_rng(11)
    for _ in range(50):
        intr = random_intrinsics(rng)
        uav, vessel = random_pose(rng), random_pose(rng, z_range=(0.0, 0.0))
        pmap = build_projection(intr, uav, vessel)
        r_wb = _rot_z(uav.yaw) @ _rot_y(uav.pitch) @ _rot_x(uav.roll)
        r_wv = _rot_z(vessel.yaw) @ _rot_y(vessel.pitch) @ _rot_x(vessel.roll)
        r_bc = _rot_x(math.pi)  # camera axes expressed in the body frame
        p = rng.uniform(-10, 10, 3) * [1, 1, 0]
        world = r_wv @ p + vessel.position
        body = r_wb.T @ (world - uav.position)
        cam = r_bc.T @ body
        if cam[2] <= 0:
            continue
        u = intr.fx * cam[0] / cam[2] + intr.cx
        v = intr.fy * cam[1] / cam[2] + intr.cy
        np.testing.assert_allclose(project_point(pmap, p), [u, v], atol=1e-9, rtol=0)


def test_backproject_round_trip():
    rng = np.random.default_rng(3)
    pmap = build_projection(DEFAULT_INTRINSICS, Pose(1, 2, 60.0), Pose(yaw=1.0))
    px = rng.uniform([0, 0], [639, 359], size=(200, 2))
    pts, hit = backproject_pixels(pmap, px)
    assert hit.all()
    np.testing.assert_allclose(pts[:, 2], 0.0)
    vessel_pts = pmap.world_from_vessel.inverse().apply(pts)
    np.testing.assert_allclose(project_points(pmap, vessel_pts), px, atol=1e-6)


def test_backproject_horizon_miss():
    # Camera pitched to look at the sky: no ray reaches the water.
    ext = pose_to_transform(Pose()).inverse()  # camera +z along body +z (up)
    pmap = build_projection(DEFAULT_INTRINSICS, Pose(z=10.0), Pose(), ext)
    with pytest.raises(NoIntersectionError):
        backproject_to_water(pmap, (319.5, 179.5))


def test_nadir_extrinsic_looks_down():
    ext = nadir_extrinsic()
    # Body -z (down) is camera +z (forward).
    np.testing.assert_allclose(ext.rotation @ [0, 0, -1], [0, 0, 1], atol=1e-12)
