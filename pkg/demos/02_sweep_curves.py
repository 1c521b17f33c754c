"""Over/under-segmentation sweep on a synthetic checkerboard.

A 4x4 checkerboard truth is degraded to k predicted classes: merged below
16 classes, split above. ARR stays perfect on the merge branch, ARP on
the split branch, and ARI dips on both sides, so the pair of curves
separates the two failure modes that ARI alone conflates.

Run: python3 demos/02_sweep_curves.py  (writes sweep.csv, and sweep.png if
matplotlib is installed)
"""

from segrand import GridSpec, sweep_curves
from segrand.io import write_report

spec = GridSpec(grid_rows=4, grid_cols=4, cell_height=16, cell_width=16)
curve = sweep_curves(spec, k_min=1, k_max=40)

write_report(curve, "sweep.csv")
print("wrote sweep.csv")

print(f"\n{'k':>3} {'ari':>7} {'arp':>7} {'arr':>7}")
for row in curve.rows:
    marks = []
    if row.k < spec.class_count:
        marks.append("merge")
    elif row.k > spec.class_count:
        marks.append("split")
    else:
        marks.append("exact")
    print(f"{row.k:>3} {row.ari.value:>7.3f} {row.arp.value:>7.3f} "
          f"{row.arr.value:>7.3f}  {marks[0]}")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    ks = [r.k for r in curve.rows]
    plt.figure(figsize=(6, 3.5))
    plt.plot(ks, [r.ari.value for r in curve.rows], label="ARI")
    plt.plot(ks, [r.arp.value for r in curve.rows], label="ARP")
    plt.plot(ks, [r.arr.value for r in curve.rows], label="ARR")
    plt.axvline(spec.class_count, color="gray", ls=":", lw=1)
    plt.xlabel("predicted classes k")
    plt.ylabel("score")
    plt.legend()
    plt.tight_layout()
    plt.savefig("sweep.png", dpi=120)
    print("\nwrote sweep.png")
except ImportError:
    print("\nmatplotlib not installed; skipped the plot")
