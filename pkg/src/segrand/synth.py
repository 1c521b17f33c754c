"""Synthetic checkerboard truths and deterministic merge/split degradations.

The degradations are built so that the merge branch is a pure coarsening of
the checkerboard (recall stays perfect) and the split branch a pure
refinement (precision stays perfect), with a fixed deterministic
order so that two runs produce identical outputs:

* ``merge_to`` repeatedly merges the lowest-index remaining class into its
  nearest remaining horizontal neighbour; at a row end it falls through to
  the class below in the same column, then to the next class in row-major
  order.  Classes already touched in the current pass are skipped, so one
  pass pairs neighbours instead of growing a single blob.
* ``split_to`` repeatedly bisects the currently largest class (ties go to
  the lowest label) across its longer axis, cutting horizontally on a tie;
  the top/left part keeps the old label.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .core import SegmentationMap, build_contingency
from .errors import InvalidKError
from .metrics import MetricValue, adjusted_metrics


@dataclass(frozen=True)
class GridSpec:
    """Checkerboard geometry: a grid of uniform rectangular cells."""

    grid_rows: int = 4
    grid_cols: int = 4
    cell_height: int = 16
    cell_width: int = 16

    def __post_init__(self) -> None:
        for name in ("grid_rows", "grid_cols", "cell_height", "cell_width"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")

    @property
    def class_count(self) -> int:
        return self.grid_rows * self.grid_cols

    @property
    def pixel_count(self) -> int:
        return self.class_count * self.cell_height * self.cell_width

    @property
    def image_shape(self) -> tuple[int, int]:
        return (self.grid_rows * self.cell_height, self.grid_cols * self.cell_width)


@dataclass(frozen=True)
class SweepRow:
    k: int
    ari: MetricValue
    arp: MetricValue
    arr: MetricValue


@dataclass(frozen=True)
class SweepCurve:
    """Metric triples as a function of the predicted class count."""

    rows: tuple[SweepRow, ...]

    def __post_init__(self) -> None:
        ks = [r.k for r in self.rows]
        if any(b <= a for a, b in zip(ks, ks[1:])):
            raise ValueError("k must be strictly increasing")


def make_checkerboard(spec: GridSpec) -> SegmentationMap:
    """Ground-truth map whose label is the row-major cell index."""
    base = np.arange(spec.class_count, dtype=np.int64).reshape(spec.grid_rows, spec.grid_cols)
    labels = np.repeat(np.repeat(base, spec.cell_height, axis=0), spec.cell_width, axis=1)
    return SegmentationMap(labels)


def _require_checkerboard(seg: SegmentationMap, spec: GridSpec) -> None:
    if seg != make_checkerboard(spec):
        raise ValueError("input map must be the checkerboard generated from spec")


def _merge_cell_labels(rows: int, cols: int, k: int) -> list[int]:
    """Final label per grid cell after merging down to k classes."""
    n = rows * cols
    cell_class = list(range(n))
    alive = set(range(n))
    min_cell = {c: c for c in range(n)}

    def find_target(cid: int) -> int:
        r0, c0 = divmod(min_cell[cid], cols)
        same_row = [
            d for d in alive
            if d != cid and min_cell[d] // cols == r0 and min_cell[d] % cols > c0
        ]
        if same_row:
            return min(same_row, key=lambda d: min_cell[d])
        below = [
            d for d in alive
            if d != cid and min_cell[d] % cols == c0 and min_cell[d] // cols > r0
        ]
        if below:
            return min(below, key=lambda d: min_cell[d])
        after = [d for d in alive if d != cid and min_cell[d] > min_cell[cid]]
        if after:
            return min(after, key=lambda d: min_cell[d])
        return max((d for d in alive if d != cid), key=lambda d: min_cell[d])

    while len(alive) > k:
        order = sorted(alive, key=lambda c: min_cell[c])
        touched: set[int] = set()
        for cid in order:
            if len(alive) <= k:
                break
            if cid not in alive or cid in touched:
                continue
            target = find_target(cid)
            touched.add(cid)
            touched.add(target)
            for cell in range(n):
                if cell_class[cell] == cid:
                    cell_class[cell] = target
            min_cell[target] = min(min_cell[target], min_cell[cid])
            alive.remove(cid)
    return cell_class


def merge_to(seg: SegmentationMap, spec: GridSpec, k: int) -> SegmentationMap:
    """Coarsen the checkerboard to exactly k classes; unchanged at k = K.

    Raises:
        InvalidKError: k outside [1, class_count].
    """
    if not 1 <= k <= spec.class_count:
        raise InvalidKError(f"merge target k={k} outside [1, {spec.class_count}]")
    _require_checkerboard(seg, spec)
    mapping = np.asarray(_merge_cell_labels(spec.grid_rows, spec.grid_cols, k), dtype=np.int64)
    return SegmentationMap(mapping[seg.labels])


def split_to(seg: SegmentationMap, spec: GridSpec, k: int) -> SegmentationMap:
    """Refine the checkerboard to exactly k classes; unchanged at k = K.

    Raises:
        InvalidKError: k outside [class_count, pixel_count].
    """
    if not spec.class_count <= k <= spec.pixel_count:
        raise InvalidKError(
            f"split target k={k} outside [{spec.class_count}, {spec.pixel_count}]"
        )
    _require_checkerboard(seg, spec)

    rects: dict[int, tuple[int, int, int, int]] = {}
    heap: list[tuple[int, int]] = []
    for idx in range(spec.class_count):
        gr, gc = divmod(idx, spec.grid_cols)
        rects[idx] = (gr * spec.cell_height, gc * spec.cell_width, spec.cell_height, spec.cell_width)
        heap.append((-(spec.cell_height * spec.cell_width), idx))
    heapq.heapify(heap)

    next_label = spec.class_count
    while len(rects) < k:
        neg_area, label = heapq.heappop(heap)
        top, left, h, w = rects[label]
        if h >= w:
            h1 = h // 2
            first = (top, left, h1, w)
            second = (top + h1, left, h - h1, w)
        else:
            w1 = w // 2
            first = (top, left, h, w1)
            second = (top, left + w1, h, w - w1)
        rects[label] = first
        rects[next_label] = second
        heapq.heappush(heap, (-(first[2] * first[3]), label))
        heapq.heappush(heap, (-(second[2] * second[3]), next_label))
        next_label += 1

    height, width = spec.image_shape
    out = np.empty((height, width), dtype=np.int64)
    for label, (top, left, h, w) in rects.items():
        out[top : top + h, left : left + w] = label
    return SegmentationMap(out)


def prediction_at(spec: GridSpec, k: int) -> SegmentationMap:
    """The sweep's prediction at class count k: a merge below K, a split above."""
    checker = make_checkerboard(spec)
    if k < spec.class_count:
        return merge_to(checker, spec, k)
    return split_to(checker, spec, k)


def sweep_curves(spec: GridSpec, k_min: int = 1, k_max: int = 40) -> SweepCurve:
    """Score merge/split degradations against the checkerboard for each k.

    No foreground masking is applied (the toy scene has no background).

    Raises:
        InvalidKError: unless 1 <= k_min <= class_count <= k_max <= pixel_count.
    """
    if not (1 <= k_min <= spec.class_count <= k_max <= spec.pixel_count):
        raise InvalidKError(
            f"need 1 <= k_min <= {spec.class_count} <= k_max <= {spec.pixel_count}, "
            f"got k_min={k_min}, k_max={k_max}"
        )
    truth = make_checkerboard(spec)
    rows = []
    for k in range(k_min, k_max + 1):
        pred = prediction_at(spec, k)
        ari, arp, arr = adjusted_metrics(build_contingency(truth, pred))
        rows.append(SweepRow(k=k, ari=ari, arp=arp, arr=arr))
    return SweepCurve(rows=tuple(rows))
