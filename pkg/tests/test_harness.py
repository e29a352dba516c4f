import hashlib
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vesselrange.cli import load_config
from vesselrange.contours import LabelMask, binarize, extract_contours, load_label_mask
from vesselrange.frames import Pose, build_projection
from vesselrange.harness import (
    COLORS,
    DEFAULT_ALTITUDES,
    EvalRecord,
    SweepConfig,
    annotate_frame,
    altitude_bound,
    records_to_csv,
    run_sample,
    run_sweep,
    sample_seed,
    spearman_rho,
    summarize,
    summary_to_csv,
)
from vesselrange.hull import project_sections
from vesselrange.netpbm import encode_ppm
from vesselrange.ranging import estimate_distances


def _records(values, altitude=50.0):
    return [EvalRecord(altitude, k, 0, v, 0.0) for k, v in enumerate(values)]


def test_default_altitudes():
    assert DEFAULT_ALTITUDES == tuple(float(a) for a in range(30, 151, 10))
    assert len(DEFAULT_ALTITUDES) == 13


def test_summary_of_one_to_five():
    (s,) = summarize(_records([1, 2, 3, 4, 5]))
    assert (s.median, s.q1, s.q3, s.mean_abs_error) == (3.0, 2.0, 4.0, 3.0)
    assert s.std_dev == pytest.approx(np.sqrt(2.0))
    assert s.outlier_count == 0 and s.n == 5


def test_summary_outlier_fence():
    (s,) = summarize(_records([1, 1, 1, 100]))
    assert s.outlier_count == 1


def test_summary_single_record():
    (s,) = summarize(_records([2.5]))
    assert s.mean_abs_error == s.median == 2.5 and s.std_dev == 0.0


def test_summary_counts_missing_and_skips_empty_groups():
    recs = _records([1.0, 2.0]) + [
        EvalRecord(50.0, 9, 1, None, 3.0),
        EvalRecord(50.0, 9, 2, None, None),
        EvalRecord(60.0, 0, 0, None, None),
    ]
    (s,) = summarize(recs)
    assert s.altitude == 50.0 and s.n_missing == 2 and s.n_both_absent == 1


def test_summary_rejects_empty():
    with pytest.raises(ValueError):
        summarize([])


@settings(max_examples=50)
@given(st.lists(st.floats(0, 100), min_size=1, max_size=40), st.randoms())
def test_summary_permutation_invariant(values, rnd):
    shuffled = list(values)
    rnd.shuffle(shuffled)
    a = summarize(_records(values))[0]
    b = summarize(_records(shuffled))[0]
    assert a.median == b.median and a.q1 == b.q1 and a.q3 == b.q3
    assert a.outlier_count == b.outlier_count
    assert a.mean_abs_error == pytest.approx(b.mean_abs_error)


def test_sample_seed_separates_inputs():
    a = sample_seed(0, 30.0, 1).generate_state(2).tolist()
    assert a == sample_seed(0, 30.0, 1).generate_state(2).tolist()
    assert a != sample_seed(0, 40.0, 1).generate_state(2).tolist()
    assert a != sample_seed(1, 30.0, 1).generate_state(2).tolist()


def test_sweep_record_count_and_determinism():
    cfg = SweepConfig(altitudes=(40.0, 80.0), samples_per_altitude=2, base_seed=3)
    recs = run_sweep(cfg)
    assert len(recs) == 2 * 2 * 22
    assert sorted({r.altitude for r in recs}) == [40.0, 80.0]
    assert records_to_csv(recs) == records_to_csv(run_sweep(cfg))


def test_sweep_parallel_matches_serial():
    cfg = SweepConfig(altitudes=(50.0,), samples_per_altitude=3, noise=0.02, base_seed=1)
    assert run_sweep(cfg, jobs=2) == run_sweep(cfg)


def test_run_sample_noise_free_mostly_within_bound():
    cfg = SweepConfig(altitudes=(60.0,), samples_per_altitude=1)
    records, report, truth = run_sample(cfg, 60.0, 0)
    scored = [r for r in records if r.abs_error is not None]
    assert scored
    bound = altitude_bound(60.0)
    assert sum(r.abs_error <= bound for r in scored) >= 0.9 * len(scored)


def test_csv_layout():
    recs = [EvalRecord(30.0, 0, 1, 1.5, None)]
    assert records_to_csv(recs).splitlines() == [
        "altitude,sample,section_id,estimated,truth,abs_error",
        "30,0,1,1.500000,,",
    ]
    text = summary_to_csv(summarize(_records([1, 2, 3])))
    assert text.splitlines()[0] == "altitude,n,mean,std,median,q1,q3,outliers"


def test_spearman():
    assert spearman_rho([1, 2, 3, 4], [10, 20, 30, 40]) == pytest.approx(1.0)
    assert spearman_rho([1, 2, 3, 4], [4, 3, 2, 1]) == pytest.approx(-1.0)
    assert spearman_rho([1, 2, 3], [5, 5, 5]) == 0.0


def _harbor_frame(harbor_dir):
    cfg = load_config(harbor_dir / "config.json")
    hull = cfg.load_hull()
    mask = load_label_mask(harbor_dir / "mask.pgm")
    report = estimate_distances(mask, cfg.uav_pose, cfg.vessel_pose, cfg.intrinsics, cfg.extrinsic, hull)
    pmap = build_projection(cfg.intrinsics, cfg.uav_pose, cfg.vessel_pose, cfg.extrinsic)
    return mask, report, project_sections(hull, pmap)


def test_annotation_golden_hash(harbor_dir):
    mask, report, segments = _harbor_frame(harbor_dir)
    img = annotate_frame(mask, report, segments, extract_contours(binarize(mask)))
    digest = hashlib.sha256(encode_ppm(img)).hexdigest()
    assert digest == (harbor_dir / "annotation.sha256").read_text().strip()


def test_annotation_distance_line_endpoints(harbor_dir):
    mask, report, segments = _harbor_frame(harbor_dir)
    img = annotate_frame(mask, report, segments)
    yellow = np.all(img == COLORS["distance"], axis=2)
    for s in report.sections:
        if s.present:
            cx, cy = (int(round(v)) for v in s.closest_contour_point)
            assert yellow[cy, cx]


def test_annotation_all_absent_has_question_marks_only():
    mask = LabelMask(np.zeros((360, 640), np.uint8))
    from vesselrange.simulator import default_hull
    from vesselrange.harness import DEFAULT_INTRINSICS

    hull = default_hull()
    report = estimate_distances(mask, Pose(z=50.0), Pose(), DEFAULT_INTRINSICS, None, hull)
    segs = project_sections(hull, build_projection(DEFAULT_INTRINSICS, Pose(z=50.0), Pose()))
    img = annotate_frame(mask, report, segs)
    assert not np.all(img == COLORS["distance"], axis=2).any()
    black = np.all(img == COLORS["hull"], axis=2)
    # Glyphs sit on the section midpoints.
    for seg in segs:
        x, y = (int(round(v)) for v in seg.midpoint)
        assert black[y - 4 : y + 5, x - 6 : x + 7].sum() > 10
