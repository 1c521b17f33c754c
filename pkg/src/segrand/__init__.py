"""Rand-index family metrics for segmentation and clustering evaluation.

The adjusted Rand index (ARI) scores how well two labellings of the same
pixels agree, corrected for chance.  This package adds its precision/recall
decomposition: the adjusted Rand precision (ARP) stays perfect when a
prediction merely splits ground-truth objects, the adjusted Rand recall
(ARR) stays perfect when it merely merges them, and the ARI is exactly
their harmonic mean.  Everything is computed from one sparse contingency
table in exact integer/rational arithmetic.
"""

from .core import (
    ContingencyTable,
    ForegroundMask,
    SegmentationMap,
    build_contingency,
    foreground_mask,
    relabel_compact,
)
from .errors import (
    DegenerateTotalError,
    DuplicateSampleIdError,
    EmptyInputError,
    EmptyManifestError,
    EmptySelectionError,
    ImpossibleTableError,
    InvalidKError,
    InvalidSampleCountError,
    IoFailureError,
    LabelOutOfRangeError,
    MalformedHeaderError,
    SegrandError,
    ShapeMismatchError,
    TooLargeForExactError,
    TruncatedDataError,
    UnsupportedFormatError,
)
from .metrics import (
    AdjustmentTerms,
    Degeneracy,
    MetricReport,
    MetricSummary,
    MetricValue,
    SummaryRow,
    adjusted_metrics,
    adjustment_terms,
    aggregate,
    evaluate_pair,
    expected_sum_squares,
    unadjusted_metrics,
)
from .oracle import (
    MonteCarloEstimate,
    PairCounts,
    pair_count,
    permutation_expectation_exact,
    permutation_expectation_monte_carlo,
)
from .synth import (
    GridSpec,
    SweepCurve,
    SweepRow,
    make_checkerboard,
    merge_to,
    split_to,
    sweep_curves,
)

__version__ = "0.1.0"

__all__ = [
    "AdjustmentTerms",
    "ContingencyTable",
    "Degeneracy",
    "DegenerateTotalError",
    "DuplicateSampleIdError",
    "EmptyInputError",
    "EmptyManifestError",
    "EmptySelectionError",
    "ForegroundMask",
    "GridSpec",
    "ImpossibleTableError",
    "InvalidKError",
    "InvalidSampleCountError",
    "IoFailureError",
    "LabelOutOfRangeError",
    "MalformedHeaderError",
    "MetricReport",
    "MetricSummary",
    "MetricValue",
    "MonteCarloEstimate",
    "PairCounts",
    "SegmentationMap",
    "SegrandError",
    "ShapeMismatchError",
    "SummaryRow",
    "SweepCurve",
    "SweepRow",
    "TooLargeForExactError",
    "TruncatedDataError",
    "UnsupportedFormatError",
    "adjusted_metrics",
    "adjustment_terms",
    "aggregate",
    "build_contingency",
    "evaluate_pair",
    "expected_sum_squares",
    "foreground_mask",
    "make_checkerboard",
    "merge_to",
    "pair_count",
    "permutation_expectation_exact",
    "permutation_expectation_monte_carlo",
    "relabel_compact",
    "split_to",
    "sweep_curves",
    "unadjusted_metrics",
    "__version__",
]
