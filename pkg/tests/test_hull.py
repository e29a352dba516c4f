import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vesselrange.errors import BehindCameraError, DegenerateHullError, HullOutOfViewError
from vesselrange.frames import Pose, build_projection
from vesselrange.harness import DEFAULT_INTRINSICS
from vesselrange.hull import (
    DEFAULT_OUTLINE,
    HullModel,
    convex_hull,
    discretize_sections,
    load_hull,
    make_hull,
    polygon_area,
    project_sections,
    save_hull,
)
from vesselrange.oracles import brute_force_hull

SQUARE = [(0, 0), (10, 0), (10, 10), (0, 10)]


def test_square_hull_drops_interior_and_collinear():
    pts = SQUARE + [(5, 5), (5, 0), (2, 3)]
    assert convex_hull(pts) == [(0, 0), (10, 0), (10, 10), (0, 10)]


def test_hull_is_counterclockwise_even_for_clockwise_input():
    hull = convex_hull(list(reversed(SQUARE)))
    assert polygon_area(hull) == pytest.approx(100.0)


def test_degenerate_inputs():
    with pytest.raises(DegenerateHullError):
        convex_hull([(0, 0), (1, 1)])
    with pytest.raises(DegenerateHullError):
        convex_hull([(0, 0), (1, 1), (2, 2), (3, 3)])


def test_hull_matches_brute_force_oracle():
    rng = np.random.default_rng(0)
    for _ in range(50):
        pts = rng.integers(-20, 20, size=(int(rng.integers(3, 25)), 2)).astype(float)
        try:
            hull = convex_hull(pts)
        except DegenerateHullError:
            continue
        assert set(hull) == brute_force_hull(pts)


@settings(max_examples=60)
@given(st.lists(st.tuples(st.integers(-50, 50), st.integers(-50, 50)), min_size=3, max_size=40))
def test_hull_contains_all_points(points):
    try:
        hull = convex_hull(points)
    except DegenerateHullError:
        return
    n = len(hull)
    for p in points:
        for i in range(n):
            a, b = hull[i], hull[(i + 1) % n]
            assert (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) >= 0


@pytest.mark.parametrize("max_len,count", [(10.0, 4), (4.0, 12), (2.5, 16), (100.0, 4)])
def test_square_discretization_counts(max_len, count):
    assert len(discretize_sections(SQUARE, max_len)) == count


def test_sections_tile_perimeter():
    hull = make_hull(DEFAULT_OUTLINE, 3.0)
    assert len(hull) == 22
    assert sum(s.length for s in hull.sections) == pytest.approx(hull.perimeter, rel=1e-12)
    assert all(s.length <= 3.0 + 1e-12 for s in hull.sections)
    for s, nxt in zip(hull.sections, hull.sections[1:] + hull.sections[:1]):
        assert s.endpoint_b == nxt.endpoint_a


def test_hull_model_rejects_clockwise_outline():
    cw = list(reversed(SQUARE))
    with pytest.raises(DegenerateHullError):
        HullModel(cw, discretize_sections(cw, 5.0))


def test_projected_segments_share_endpoints_and_face_out():
    hull = make_hull(DEFAULT_OUTLINE, 3.0)
    pmap = build_projection(DEFAULT_INTRINSICS, Pose(2, 1, 60.0), Pose(yaw=0.7))
    segs = project_sections(hull, pmap)
    assert len(segs) == len(hull)
    centroid = np.mean([s.a for s in segs], axis=0)
    for s, nxt in zip(segs, segs[1:] + segs[:1]):
        assert s.b == nxt.a
        assert np.dot(np.subtract(s.midpoint, centroid), s.outward_normal) > 0
        assert math.hypot(*s.outward_normal) == pytest.approx(1.0)


def test_nadir_projection_scales_lengths():
    hull = make_hull(SQUARE, 10.0)
    pmap = build_projection(DEFAULT_INTRINSICS, Pose(5, 5, 100.0), Pose())
    for s in project_sections(hull, pmap):
        assert s.length == pytest.approx(10.0 * DEFAULT_INTRINSICS.fx / 100.0, rel=1e-12)


def test_yaw_half_turn_is_point_symmetric():
    hull = make_hull(DEFAULT_OUTLINE, 3.0)
    a = project_sections(hull, build_projection(DEFAULT_INTRINSICS, Pose(z=50.0), Pose()))
    b = project_sections(hull, build_projection(DEFAULT_INTRINSICS, Pose(z=50.0), Pose(yaw=math.pi)))
    c = np.array([319.5, 179.5])
    for sa, sb in zip(a, b):
        np.testing.assert_allclose(2 * c - np.array(sa.a), sb.a, atol=1e-9)


def test_out_of_view_and_behind_camera():
    hull = make_hull(DEFAULT_OUTLINE, 3.0)
    with pytest.raises(HullOutOfViewError):
        project_sections(hull, build_projection(DEFAULT_INTRINSICS, Pose(500, 0, 30.0), Pose()))
    with pytest.raises(BehindCameraError):
        project_sections(hull, build_projection(DEFAULT_INTRINSICS, Pose(z=30.0, roll=math.pi), Pose()))


def test_hull_file_round_trip(tmp_path):
    path = tmp_path / "hull.txt"
    save_hull(path, DEFAULT_OUTLINE)
    text = path.read_text() + "\n# trailing comment\n\n"
    path.write_text(text)
    hull = load_hull(path, 3.0)
    assert hull.outline == tuple(DEFAULT_OUTLINE)


def test_hull_file_errors(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("0 0\n1 x\n")
    with pytest.raises(ValueError, match=":2:"):
        load_hull(path, 1.0)
