"""Tour of the metric family: why ARI alone cannot separate failure modes.

Run: python3 demos/01_metrics_tour.py
"""

import numpy as np

from segrand import (
    SegmentationMap,
    adjusted_metrics,
    build_contingency,
    evaluate_pair,
    expected_sum_squares,
    unadjusted_metrics,
)


def show(title, truth, pred):
    table = build_contingency(truth, pred)
    ari, arp, arr = adjusted_metrics(table)
    rp, rr = unadjusted_metrics(table)
    flags = "".join(
        "*" if v.degenerate else " " for v in (ari, arp, arr, rp, rr)
    )
    print(
        f"{title:<34} ari={ari.value:+.3f} arp={arp.value:+.3f} arr={arr.value:+.3f}"
        f"  rp={rp.value:.3f} rr={rr.value:.3f}  [{flags.strip() or 'no'} degenerate]"
    )


truth = SegmentationMap(np.repeat(np.arange(4), 6).reshape(1, 24))

print("Ground truth: four objects of six pixels each.\n")

# A perfect prediction may use completely different label ids.
show("relabelled copy", truth, SegmentationMap((truth.labels + 17) * 3))

# Oversegmentation: each object is cut in two. Precision stays perfect:
# every predicted segment still lies inside one true object.
halves = SegmentationMap(truth.labels * 2 + (np.arange(24).reshape(1, 24) % 2))
show("oversegmented (split in half)", truth, halves)

# Undersegmentation: objects merged pairwise. Recall stays perfect:
# every true co-assignment is preserved.
merged = SegmentationMap(truth.labels // 2)
show("undersegmented (merged pairs)", truth, merged)

# A chance-worse prediction scores below zero.
anti = SegmentationMap(np.tile(np.arange(2), 12).reshape(1, 24))
show("adversarial interleaving", truth, anti)

# One cluster for everything: the adjusted recall denominator vanishes,
# so it falls back to the unadjusted value 1 and is flagged.
show("single-cluster prediction", truth, SegmentationMap(np.zeros((1, 24), dtype=int)))

print("\nThe chance expectation behind the adjustment, for the half-split case:")
table = build_contingency(truth, halves)
print(f"  S = {table.sum_sq_cells}, A = {table.row_sq_sum}, B = {table.col_sq_sum},",
      f"m = {table.total}, E = {expected_sum_squares(table):.4f}")

print("\nForeground masking drops ground-truth background (label 0) pixels:")
t = SegmentationMap(np.array([[0, 1, 1, 2, 2]]))
p = SegmentationMap(np.array([[9, 4, 4, 8, 8]]))
report = evaluate_pair(t, p, background_ids={0})
print(f"  fg_ari={report.fg_ari.value} on {report.fg_pixel_count}/{report.pixel_count} pixels,",
      f"{report.truth_object_count} objects")
