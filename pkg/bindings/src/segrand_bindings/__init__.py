"""Array-facing wrappers around the segrand metric core.

Functions here accept plain 2-D or 3-D contiguous integer arrays and
return flat dictionaries, so callers need no segrand types.  Inputs are
wrapped as read-only views; a copy is made only when an array is
non-contiguous, and caller memory is never mutated.  Shape and dtype
violations raise standard ``ValueError``/``TypeError`` with the core
error named in the message.  All wrapped operations are pure functions
over immutable values and are safe to call from multiple threads.
"""

from __future__ import annotations

from typing import Iterable, Optional

import numpy as np

import segrand
from segrand import (
    SegmentationMap,
    adjusted_metrics,
    build_contingency,
    evaluate_pair,
    unadjusted_metrics,
)
from segrand.synth import GridSpec, sweep_curves

__version__ = segrand.__version__  # mirrors the core

__all__ = [
    "py_adjusted_metrics",
    "py_evaluate",
    "py_sweep_curves",
    "py_unadjusted_metrics",
    "__version__",
]

#: metric keys of a bound report, in core report order
REPORT_KEYS = ("ari", "arp", "arr", "rp", "rr", "fg_ari", "fg_arp", "fg_arr")


def _as_map(name: str, array) -> SegmentationMap:
    arr = np.asarray(array)
    if arr.dtype == np.bool_ or not np.issubdtype(arr.dtype, np.integer):
        raise TypeError(
            f"{name} must be an integer array, got dtype {arr.dtype} "
            "(core: SegmentationMap requires integer labels)"
        )
    if arr.ndim not in (2, 3):
        raise ValueError(
            f"{name} must be 2-D or 3-D, got shape {arr.shape} (core: ShapeMismatch)"
        )
    return SegmentationMap(arr)


def _pair(truth_array, pred_array) -> tuple[SegmentationMap, SegmentationMap]:
    truth = _as_map("truth_array", truth_array)
    pred = _as_map("pred_array", pred_array)
    if truth.shape != pred.shape:
        raise ValueError(
            f"arrays must share a shape, got {truth.shape} vs {pred.shape} "
            "(core: ShapeMismatch)"
        )
    return truth, pred


def _unpack(value) -> tuple[Optional[float], Optional[bool]]:
    if value is None:
        return None, None
    return value.value, value.degenerate


def py_evaluate(
    truth_array,
    pred_array,
    background_ids: Iterable[int] = (0,),
    fg: bool = True,
) -> dict:
    """Score one (truth, prediction) array pair; mirrors the core report.

    With ``fg`` true (the default, matching ``segrand eval``), metrics are
    computed on the pixels whose truth label is not in ``background_ids``
    and fill the ``fg_*`` keys; with ``fg`` false, metrics cover every
    pixel and fill ``ari``/``arp``/``arr``/``rp``/``rr``.

    Returns:
        dict with keys ``ari, arp, arr, rp, rr, fg_ari, fg_arp, fg_arr``
        (float or None), ``pixel_count, fg_pixel_count,
        truth_object_count`` (int), ``degeneracy`` (str), and
        ``degenerate`` (per-metric bool-or-None flags).
    """
    truth, pred = _pair(truth_array, pred_array)
    report = evaluate_pair(
        truth,
        pred,
        background_ids=frozenset(int(b) for b in background_ids),
        compute_fg=fg,
        compute_global=not fg,
    )
    values = {}
    flags = {}
    for key, field in zip(REPORT_KEYS, ("ari", "arp", "arr", "rp_unadj", "rr_unadj",
                                        "fg_ari", "fg_arp", "fg_arr")):
        values[key], flags[key] = _unpack(getattr(report, field))
    return {
        **values,
        "pixel_count": report.pixel_count,
        "fg_pixel_count": report.fg_pixel_count,
        "truth_object_count": report.truth_object_count,
        "degeneracy": report.degeneracy.value,
        "degenerate": flags,
    }


def py_adjusted_metrics(truth_array, pred_array) -> dict:
    """Chance-adjusted (ari, arp, arr) over all pixels of two arrays."""
    truth, pred = _pair(truth_array, pred_array)
    ari, arp, arr = adjusted_metrics(build_contingency(truth, pred))
    return {
        "ari": ari.value,
        "arp": arp.value,
        "arr": arr.value,
        "degenerate": {"ari": ari.degenerate, "arp": arp.degenerate, "arr": arr.degenerate},
    }


def py_unadjusted_metrics(truth_array, pred_array) -> dict:
    """Plain Rand precision/recall (rp, rr) over all pixels of two arrays."""
    truth, pred = _pair(truth_array, pred_array)
    rp, rr = unadjusted_metrics(build_contingency(truth, pred))
    return {
        "rp": rp.value,
        "rr": rr.value,
        "degenerate": {"rp": rp.degenerate, "rr": rr.degenerate},
    }


def py_sweep_curves(
    grid: tuple[int, int] = (4, 4),
    cell: tuple[int, int] = (16, 16),
    k_min: int = 1,
    k_max: int = 40,
) -> list[dict]:
    """Checkerboard merge/split sweep as a list of ``{k, ari, arp, arr}`` rows."""
    spec = GridSpec(grid_rows=grid[0], grid_cols=grid[1],
                    cell_height=cell[0], cell_width=cell[1])
    curve = sweep_curves(spec, k_min=k_min, k_max=k_max)
    return [
        {"k": row.k, "ari": row.ari.value, "arp": row.arp.value, "arr": row.arr.value}
        for row in curve.rows
    ]
