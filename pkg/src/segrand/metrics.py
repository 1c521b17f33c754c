"""Closed-form Rand-family metrics over contingency tables.

The adjusted index, precision, and recall share one numerator ``S - E`` and
differ only in the scale ``gamma`` of the denominator ``gamma - E``:

* precision uses the prediction square sum ``B`` (score is 1 whenever the
  prediction only splits truth objects),
* recall uses the truth square sum ``A`` (score is 1 whenever the prediction
  only merges truth objects),
* the index uses ``(A + B) / 2``, which makes it exactly the harmonic mean
  of the other two.

``E`` is the expectation of ``S`` when the prediction is replaced by a
uniformly shuffled relabelling with the same class sizes (hypergeometric
cell marginals).  All ratios are evaluated in exact rational arithmetic and
rounded to a double only at the end, so algebraically equal quantities are
bit-for-bit equal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .core import ContingencyTable, SegmentationMap, build_contingency, foreground_mask
from .errors import (
    DegenerateTotalError,
    EmptyInputError,
    EmptySelectionError,
    ImpossibleTableError,
    ShapeMismatchError,
)

# Degeneracy tests are exact: with rational arithmetic a denominator is
# degenerate iff it is exactly zero, in which case the numerator provably
# vanishes too (B - E factors as (B-m)(m^2-A)/(m(m-1)), so a zero forces
# either an all-singleton side, S = m = E, or a constant side, S = B = E).
# A relative threshold like 1e-9*m^2 would misclassify valid large-m tables
# whose chance normalizer is tiny but meaningful.


class Degeneracy(Enum):
    """Why (if at all) a report needed the 0/0 fallback rule."""

    NONE = "none"
    TRIVIAL_IDENTICAL = "trivial_identical"
    ZERO_DENOMINATOR = "zero_denominator"


@dataclass(frozen=True)
class MetricValue:
    """A metric score plus whether it came from the 0/0 fallback rule."""

    value: float
    degenerate: bool = False


@dataclass(frozen=True)
class AdjustmentTerms:
    """The scalars entering every adjusted metric of one table."""

    sum_sq_cells: int       # S
    expected_sum_sq: float  # E
    gamma_precision: int    # B, the prediction square sum
    gamma_recall: int       # A, the truth square sum
    gamma_rand: float       # (A + B) / 2
    total: int              # m


@dataclass(frozen=True)
class MetricReport:
    """Per-sample metric values; fields are None when not requested."""

    ari: Optional[MetricValue]
    arp: Optional[MetricValue]
    arr: Optional[MetricValue]
    rp_unadj: Optional[MetricValue]
    rr_unadj: Optional[MetricValue]
    fg_ari: Optional[MetricValue]
    fg_arp: Optional[MetricValue]
    fg_arr: Optional[MetricValue]
    pixel_count: int
    fg_pixel_count: int
    truth_object_count: int
    degeneracy: Degeneracy


@dataclass(frozen=True)
class MetricSummary:
    """Moments of one metric within one group of reports."""

    finite_count: int
    degenerate_count: int
    mean: Optional[float]
    std: Optional[float]


@dataclass(frozen=True)
class SummaryRow:
    """Aggregated statistics for one group of reports."""

    group: str
    count: int
    metrics: dict[str, MetricSummary]


#: metric keys of a report, in output order
REPORT_METRIC_KEYS = ("ari", "arp", "arr", "fg_ari", "fg_arp", "fg_arr", "rp", "rr")

_KEY_TO_FIELD = {
    "ari": "ari",
    "arp": "arp",
    "arr": "arr",
    "fg_ari": "fg_ari",
    "fg_arp": "fg_arp",
    "fg_arr": "fg_arr",
    "rp": "rp_unadj",
    "rr": "rr_unadj",
}


def _require_pairs(table: ContingencyTable) -> None:
    if table.total < 2:
        raise DegenerateTotalError(
            f"need at least two pixels for pair-based metrics, got {table.total}"
        )


def _expected_exact(a_sq: int, b_sq: int, m: int) -> Fraction:
    # E[S] under a marginal-preserving uniform shuffle of the prediction:
    # A*B/(m(m-1)) + (m^2 - A - B)/(m-1), equal to m + (A-m)(B-m)/(m(m-1)).
    return Fraction(a_sq * b_sq, m * (m - 1)) + Fraction(m * m - a_sq - b_sq, m - 1)


def expected_sum_squares(table: ContingencyTable) -> float:
    """Expected sum of squared cells under chance relabelling of the prediction.

    Exact rational evaluation followed by one correctly-rounded conversion,
    so the relative error is below 1e-15.

    Raises:
        DegenerateTotalError: the table has fewer than two pixels.
    """
    _require_pairs(table)
    return float(_expected_exact(table.row_sq_sum, table.col_sq_sum, table.total))


def adjustment_terms(table: ContingencyTable) -> AdjustmentTerms:
    """The (S, E, gamma) scalars shared by the adjusted metrics."""
    _require_pairs(table)
    a, b, m = table.row_sq_sum, table.col_sq_sum, table.total
    return AdjustmentTerms(
        sum_sq_cells=table.sum_sq_cells,
        expected_sum_sq=float(_expected_exact(a, b, m)),
        gamma_precision=b,
        gamma_recall=a,
        gamma_rand=float(Fraction(a + b, 2)),
        total=m,
    )


def _unadjusted_ratio(s: int, gamma: Union[int, Fraction], m: int) -> MetricValue:
    num = Fraction(s - m)
    den = Fraction(gamma) - m
    if den == 0:
        if num == 0:
            return MetricValue(1.0, degenerate=True)
        raise ImpossibleTableError(f"unadjusted ratio {num}/0 on a supposedly valid table")
    return MetricValue(float(num / den))


def _adjusted_ratio(
    s: int, e: Fraction, gamma: Union[int, Fraction], m: int
) -> MetricValue:
    num = Fraction(s) - e
    den = Fraction(gamma) - e
    if den == 0:
        if num == 0:
            # 0/0: fall back to the unadjusted value, flagged.
            return MetricValue(_unadjusted_ratio(s, gamma, m).value, degenerate=True)
        raise ImpossibleTableError(
            f"adjusted denominator 0 with numerator {float(num):g} on a supposedly valid table"
        )
    return MetricValue(float(num / den))


def adjusted_metrics(
    table: ContingencyTable,
) -> tuple[MetricValue, MetricValue, MetricValue]:
    """Chance-adjusted (index, precision, recall) for one table.

    Returns:
        ``(ari, arp, arr)``.  ``arp`` is the chance-adjusted fraction of
        prediction-co-assigned pixel pairs that are also truth-co-assigned;
        ``arr`` is the converse; ``ari`` is their harmonic mean.  A 0/0
        ratio resolves to the corresponding unadjusted value and is flagged
        degenerate.

    Raises:
        DegenerateTotalError: fewer than two pixels.
        ImpossibleTableError: a vanishing denominator with a non-vanishing
            numerator (never happens for tables built from label maps).
    """
    _require_pairs(table)
    s, a, b, m = table.sum_sq_cells, table.row_sq_sum, table.col_sq_sum, table.total
    e = _expected_exact(a, b, m)
    ari = _adjusted_ratio(s, e, Fraction(a + b, 2), m)
    arp = _adjusted_ratio(s, e, b, m)
    arr = _adjusted_ratio(s, e, a, m)
    return ari, arp, arr


def unadjusted_metrics(table: ContingencyTable) -> tuple[MetricValue, MetricValue]:
    """Plain (not chance-adjusted) Rand precision and recall ``(rp, rr)``.

    ``rp = (S - m)/(B - m)`` and ``rr = (S - m)/(A - m)``, the exact ratios
    of co-assigned pixel pairs.  An all-singleton side makes the ratio 0/0,
    which resolves to 1 and is flagged degenerate.
    """
    _require_pairs(table)
    s, a, b, m = table.sum_sq_cells, table.row_sq_sum, table.col_sq_sum, table.total
    return _unadjusted_ratio(s, b, m), _unadjusted_ratio(s, a, m)


def evaluate_pair(
    truth: SegmentationMap,
    pred: SegmentationMap,
    *,
    background_ids: Iterable[int] = (0,),
    compute_fg: bool = True,
    compute_global: bool = False,
) -> MetricReport:
    """Score one (truth, prediction) pair.

    Foreground metrics are computed on the pixels whose truth label is not
    in ``background_ids``; global metrics use every pixel.  The unadjusted
    ``rp``/``rr`` values accompany the global metrics.

    Raises:
        ShapeMismatchError: the maps are not aligned.
        EmptySelectionError: foreground metrics requested but fewer than two
            pixels survive the mask.
    """
    if not truth.aligned_with(pred):
        raise ShapeMismatchError(f"truth shape {truth.shape} != pred shape {pred.shape}")
    bg = frozenset(int(b) for b in background_ids)
    mask = foreground_mask(truth, bg)
    uniq = np.unique(truth.labels)
    n_objects = sum(1 for v in uniq.tolist() if v not in bg)

    ari = arp = arr = rp = rr = None
    fg_ari = fg_arp = fg_arr = None
    tables = []
    if compute_global:
        table = build_contingency(truth, pred)
        ari, arp, arr = adjusted_metrics(table)
        rp, rr = unadjusted_metrics(table)
        tables.append(table)
    if compute_fg:
        if mask.kept_count < 2:
            raise EmptySelectionError(
                f"foreground keeps {mask.kept_count} pixel(s); need at least 2"
            )
        fg_table = build_contingency(truth, pred, mask)
        fg_ari, fg_arp, fg_arr = adjusted_metrics(fg_table)
        tables.append(fg_table)

    values = [v for v in (ari, arp, arr, rp, rr, fg_ari, fg_arp, fg_arr) if v is not None]
    if any(v.degenerate for v in values):
        if tables and all(len(t.cells) == 1 for t in tables):
            degeneracy = Degeneracy.TRIVIAL_IDENTICAL
        else:
            degeneracy = Degeneracy.ZERO_DENOMINATOR
    else:
        degeneracy = Degeneracy.NONE

    return MetricReport(
        ari=ari,
        arp=arp,
        arr=arr,
        rp_unadj=rp,
        rr_unadj=rr,
        fg_ari=fg_ari,
        fg_arp=fg_arp,
        fg_arr=fg_arr,
        pixel_count=truth.pixel_count,
        fg_pixel_count=mask.kept_count,
        truth_object_count=n_objects,
        degeneracy=degeneracy,
    )


def _moments(values: Sequence[float]) -> tuple[Optional[float], Optional[float]]:
    n = len(values)
    if n == 0:
        return None, None
    mean = math.fsum(values) / n
    if n == 1:
        return mean, 0.0
    var = math.fsum((x - mean) ** 2 for x in values) / (n - 1)
    return mean, math.sqrt(var)


def aggregate(reports: Sequence[MetricReport], group_by: str = "none") -> list[SummaryRow]:
    """Summarize reports: count, mean, and sample standard deviation per metric.

    Degenerate values are excluded from the moments and counted separately;
    averaging is per-sample-then-mean.  ``group_by`` is ``"none"`` for a
    single row or ``"truth_object_count"`` for one row per distinct
    foreground object count (ascending).

    Raises:
        EmptyInputError: no reports were given.
    """
    if not reports:
        raise EmptyInputError("cannot aggregate zero reports")
    if group_by not in ("none", "truth_object_count"):
        raise ValueError(f"unknown group_by {group_by!r}")

    if group_by == "none":
        groups: list[tuple[str, list[MetricReport]]] = [("all", list(reports))]
    else:
        by_count: dict[int, list[MetricReport]] = {}
        for r in reports:
            by_count.setdefault(r.truth_object_count, []).append(r)
        groups = [(str(k), by_count[k]) for k in sorted(by_count)]

    rows = []
    for name, members in groups:
        stats: dict[str, MetricSummary] = {}
        for key in REPORT_METRIC_KEYS:
            field = _KEY_TO_FIELD[key]
            present = [getattr(r, field) for r in members]
            finite = [v.value for v in present if v is not None and not v.degenerate]
            degenerate = sum(1 for v in present if v is not None and v.degenerate)
            mean, std = _moments(finite)
            stats[key] = MetricSummary(
                finite_count=len(finite),
                degenerate_count=degenerate,
                mean=mean,
                std=std,
            )
        rows.append(SummaryRow(group=name, count=len(members), metrics=stats))
    return rows
