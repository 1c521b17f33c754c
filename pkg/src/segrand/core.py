"""Label-map containers, foreground masking, and contingency-table construction.

Conventions used throughout the library:

* rows of the contingency table index classes of the *truth* map, columns
  index classes of the *prediction* map;
* background is defined solely by ground-truth label ids, and masking drops
  the affected pixels from both maps;
* counts and square sums are kept as exact Python integers so that no
  downstream product (up to ``m**4``) can overflow.

All containers are immutable after construction and every operation is a
pure function, so values can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional

import numpy as np

from .errors import EmptySelectionError, ShapeMismatchError

# Compacted tables at most this large take the dense counting fast path.
_DENSE_CELL_LIMIT = 4096


def _readonly(arr: np.ndarray) -> np.ndarray:
    view = arr.view()
    view.flags.writeable = False
    return view


class SegmentationMap:
    """Dense grid of non-negative integer class labels.

    Accepts 2-D ``(height, width)`` or 3-D ``(frames, height, width)``
    arrays; a 1-D sequence is treated as a single row. The wrapped array is
    exposed read-only and is not copied when the input is already a
    contiguous integer array.
    """

    __slots__ = ("labels",)

    def __init__(self, labels) -> None:
        arr = np.asarray(labels)
        if arr.dtype == np.bool_ or not np.issubdtype(arr.dtype, np.integer):
            raise TypeError(f"labels must be an integer array, got dtype {arr.dtype}")
        if arr.ndim == 1:
            arr = arr.reshape(1, -1)
        if arr.ndim not in (2, 3):
            raise ValueError(f"labels must be 2-D or 3-D, got shape {arr.shape}")
        if arr.size < 1:
            raise ValueError("a label map must contain at least one pixel")
        arr = np.ascontiguousarray(arr)
        if int(arr.min()) < 0:
            raise ValueError("labels must be non-negative")
        self.labels = _readonly(arr)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.labels.shape

    @property
    def ndim(self) -> int:
        return self.labels.ndim

    @property
    def pixel_count(self) -> int:
        return int(self.labels.size)

    def aligned_with(self, other: "SegmentationMap") -> bool:
        return self.shape == other.shape

    def __eq__(self, other) -> bool:
        if not isinstance(other, SegmentationMap):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.labels, other.labels))

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"SegmentationMap(shape={self.shape}, classes={len(np.unique(self.labels))})"


class ForegroundMask:
    """Boolean keep-grid aligned with a segmentation map."""

    __slots__ = ("keep", "kept_count")

    def __init__(self, keep) -> None:
        arr = np.asarray(keep)
        if arr.dtype != np.bool_:
            raise TypeError(f"mask must be boolean, got dtype {arr.dtype}")
        if arr.ndim == 1:
            arr = arr.reshape(1, -1)
        if arr.ndim not in (2, 3):
            raise ValueError(f"mask must be 2-D or 3-D, got shape {arr.shape}")
        self.keep = _readonly(np.ascontiguousarray(arr))
        self.kept_count = int(np.count_nonzero(arr))

    @property
    def shape(self) -> tuple[int, ...]:
        return self.keep.shape

    def __repr__(self) -> str:
        return f"ForegroundMask(shape={self.shape}, kept={self.kept_count})"


@dataclass(frozen=True)
class ContingencyTable:
    """Sparse matching matrix between a truth and a prediction labelling.

    ``cells[(i, j)]`` counts pixels carrying truth label ``i`` and predicted
    label ``j``; only strictly positive counts are stored. The square sums
    feed every closed-form metric:

    * ``sum_sq_cells``  S = sum of squared cell counts,
    * ``row_sq_sum``    A = sum of squared truth marginals,
    * ``col_sq_sum``    B = sum of squared prediction marginals.

    All fields are exact Python integers.
    """

    cells: Mapping[tuple[int, int], int]
    row_marginals: Mapping[int, int]
    col_marginals: Mapping[int, int]
    total: int
    sum_sq_cells: int
    row_sq_sum: int
    col_sq_sum: int

    def __post_init__(self) -> None:
        if not self.cells:
            raise ValueError("a contingency table needs at least one cell")
        if any(c <= 0 for c in self.cells.values()):
            raise ValueError("stored cells must be strictly positive")
        total = sum(self.cells.values())
        if total != self.total:
            raise ValueError(f"total {self.total} != sum of cells {total}")
        if sum(self.row_marginals.values()) != total or sum(self.col_marginals.values()) != total:
            raise ValueError("marginals are inconsistent with the total")
        s = sum(c * c for c in self.cells.values())
        a = sum(c * c for c in self.row_marginals.values())
        b = sum(c * c for c in self.col_marginals.values())
        if (s, a, b) != (self.sum_sq_cells, self.row_sq_sum, self.col_sq_sum):
            raise ValueError("square sums do not match the stored cells")
        if not (total <= s <= min(a, b) <= max(a, b) <= total * total):
            raise ValueError("square sums violate m <= S <= min(A, B) <= max(A, B) <= m^2")

    @classmethod
    def from_cells(cls, cells: Mapping[tuple[int, int], int]) -> "ContingencyTable":
        """Build a table (marginals and square sums included) from raw cells."""
        ordered = dict(sorted((tuple(k), int(v)) for k, v in cells.items()))
        rows: dict[int, int] = {}
        cols: dict[int, int] = {}
        for (i, j), c in ordered.items():
            rows[i] = rows.get(i, 0) + c
            cols[j] = cols.get(j, 0) + c
        return cls(
            cells=ordered,
            row_marginals=dict(sorted(rows.items())),
            col_marginals=dict(sorted(cols.items())),
            total=sum(ordered.values()),
            sum_sq_cells=sum(c * c for c in ordered.values()),
            row_sq_sum=sum(c * c for c in rows.values()),
            col_sq_sum=sum(c * c for c in cols.values()),
        )

    @property
    def n_rows(self) -> int:
        return len(self.row_marginals)

    @property
    def n_cols(self) -> int:
        return len(self.col_marginals)


def foreground_mask(truth: SegmentationMap, background_ids: Iterable[int]) -> ForegroundMask:
    """Mask keeping exactly the pixels whose truth label is not background.

    An all-false mask is legal here; operations that need kept pixels reject
    it downstream.
    """
    ids = sorted({int(b) for b in background_ids})
    if not ids:
        keep = np.ones(truth.shape, dtype=bool)
    else:
        keep = ~np.isin(truth.labels, np.asarray(ids, dtype=np.int64))
    return ForegroundMask(keep)


def build_contingency(
    truth: SegmentationMap,
    pred: SegmentationMap,
    mask: Optional[ForegroundMask] = None,
) -> ContingencyTable:
    """Count co-occurring (truth, prediction) label pairs in one pass.

    Args:
        truth: ground-truth map; its labels index the rows.
        pred: predicted map, aligned with ``truth``; labels index columns.
        mask: optional foreground mask; when given, only kept pixels are
            counted and it must keep at least one pixel.

    Raises:
        ShapeMismatchError: the maps (or the mask) are not aligned.
        EmptySelectionError: the mask keeps zero pixels.
    """
    if not truth.aligned_with(pred):
        raise ShapeMismatchError(f"truth shape {truth.shape} != pred shape {pred.shape}")
    t = truth.labels.reshape(-1)
    p = pred.labels.reshape(-1)
    if mask is not None:
        if mask.shape != truth.shape:
            raise ShapeMismatchError(f"mask shape {mask.shape} != map shape {truth.shape}")
        if mask.kept_count < 1:
            raise EmptySelectionError("mask keeps zero pixels")
        sel = mask.keep.reshape(-1)
        t = t[sel]
        p = p[sel]

    t_vals, t_inv = np.unique(t, return_inverse=True)
    p_vals, p_inv = np.unique(p, return_inverse=True)
    n_i = int(t_vals.size)
    n_j = int(p_vals.size)
    key = t_inv.astype(np.int64) * n_j + p_inv.astype(np.int64)
    if n_i * n_j <= _DENSE_CELL_LIMIT:
        dense = np.bincount(key, minlength=n_i * n_j)
        nz = np.flatnonzero(dense)
        cell_keys, cell_counts = nz, dense[nz]
    else:
        cell_keys, cell_counts = np.unique(key, return_counts=True)

    row_counts = np.bincount(t_inv, minlength=n_i)
    col_counts = np.bincount(p_inv, minlength=n_j)

    cells = {
        (int(t_vals[k // n_j]), int(p_vals[k % n_j])): int(c)
        for k, c in zip(cell_keys.tolist(), cell_counts.tolist())
    }
    rows = {int(v): int(c) for v, c in zip(t_vals.tolist(), row_counts.tolist())}
    cols = {int(v): int(c) for v, c in zip(p_vals.tolist(), col_counts.tolist())}
    return ContingencyTable(
        cells=cells,
        row_marginals=rows,
        col_marginals=cols,
        total=int(t.size),
        sum_sq_cells=sum(c * c for c in cells.values()),
        row_sq_sum=sum(c * c for c in rows.values()),
        col_sq_sum=sum(c * c for c in cols.values()),
    )


def relabel_compact(seg: SegmentationMap) -> SegmentationMap:
    """Remap labels to 0..K-1 in order of first appearance.

    Every metric is invariant under this relabelling; it only canonicalizes
    the id space for dense fast paths and compact storage.
    """
    flat = seg.labels.reshape(-1)
    vals, first, inv = np.unique(flat, return_index=True, return_inverse=True)
    order = np.argsort(first, kind="stable")
    rank = np.empty(vals.size, dtype=np.int64)
    rank[order] = np.arange(vals.size)
    return SegmentationMap(rank[inv].reshape(seg.shape))
