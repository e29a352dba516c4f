"""
Error against altitude
======================

Sweep the camera altitude from 30 m to 150 m over random scenes, with and
without segmentation noise, and summarise the absolute distance error per
altitude. Five samples per altitude keep this quick; the full protocol
uses a hundred.
"""
from vesselrange.harness import DEFAULT_ALTITUDES, SweepConfig, altitude_bound, run_sweep, spearman_rho, summarize

for noise in (0.0, 0.02):
    config = SweepConfig(altitudes=DEFAULT_ALTITUDES, samples_per_altitude=5, noise=noise, base_seed=0)
    summaries = summarize(run_sweep(config))
    print(f"\nflip rate {noise}")
    print("altitude   n   mean    median  q3      outliers  3*gsd")
    for s in summaries:
        print(
            f"{s.altitude:8g} {s.n:4d} {s.mean_abs_error:7.3f} {s.median:7.3f} {s.q3:7.3f} "
            f"{s.outlier_count:6d}   {altitude_bound(s.altitude):6.3f}"
        )
    rho = spearman_rho([s.altitude for s in summaries], [s.mean_abs_error for s in summaries])
    print(f"rank correlation of mean error with altitude: {rho:.3f}")
