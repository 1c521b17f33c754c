"""Brute-force ground truths for the closed-form metrics.

Nothing here shares code with the contingency formulas: pair counts come
from exhaustive O(N^2) enumeration of pixel pairs, and the chance
expectation comes from averaging over actual relabellings of the
prediction.  Tests and the ``selfcheck`` command use these to validate the
fast paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np

from .core import ContingencyTable, ForegroundMask, SegmentationMap
from .errors import (
    DegenerateTotalError,
    InvalidSampleCountError,
    ShapeMismatchError,
    TooLargeForExactError,
)

#: largest pixel count accepted by the exact (factorial) enumeration
EXACT_PIXEL_LIMIT = 10

# Monte-Carlo shuffles are drawn in fixed-size chunks, each from its own
# child of numpy's SeedSequence (PCG64), so the estimate does not depend on
# the order in which chunks are evaluated.
_MC_CHUNK = 1024
_BATCH_CELL_LIMIT = 4096


@dataclass(frozen=True)
class PairCounts:
    """Agreement counts over all unordered pixel pairs."""

    both_same: int   # co-assigned in truth and in prediction
    truth_only: int  # co-assigned in truth only
    pred_only: int   # co-assigned in prediction only
    both_diff: int   # separated in both

    @property
    def total_pairs(self) -> int:
        return self.both_same + self.truth_only + self.pred_only + self.both_diff


@dataclass(frozen=True)
class MonteCarloEstimate:
    """Sample mean of S over seeded uniform shuffles, with standard error."""

    mean: float
    stderr: float
    samples: int


def pair_count(
    truth: SegmentationMap,
    pred: SegmentationMap,
    mask: Optional[ForegroundMask] = None,
) -> PairCounts:
    """Classify every unordered kept-pixel pair by truth/prediction agreement.

    The unadjusted precision and recall are exactly
    ``both_same / (both_same + pred_only)`` and
    ``both_same / (both_same + truth_only)``.

    Raises:
        ShapeMismatchError: inputs are not aligned.
        DegenerateTotalError: fewer than two kept pixels.
    """
    if not truth.aligned_with(pred):
        raise ShapeMismatchError(f"truth shape {truth.shape} != pred shape {pred.shape}")
    t = truth.labels.reshape(-1)
    p = pred.labels.reshape(-1)
    if mask is not None:
        if mask.shape != truth.shape:
            raise ShapeMismatchError(f"mask shape {mask.shape} != map shape {truth.shape}")
        sel = mask.keep.reshape(-1)
        t = t[sel]
        p = p[sel]
    m = int(t.size)
    if m < 2:
        raise DegenerateTotalError(f"need at least two kept pixels, got {m}")

    iu, ju = np.triu_indices(m, k=1)
    same_t = t[iu] == t[ju]
    same_p = p[iu] == p[ju]
    both_same = int(np.count_nonzero(same_t & same_p))
    truth_only = int(np.count_nonzero(same_t & ~same_p))
    pred_only = int(np.count_nonzero(~same_t & same_p))
    total = m * (m - 1) // 2
    return PairCounts(
        both_same=both_same,
        truth_only=truth_only,
        pred_only=pred_only,
        both_diff=total - both_same - truth_only - pred_only,
    )


@lru_cache(maxsize=4096)
def _exact_mean_sum_sq(row_sizes: tuple[int, ...], col_sizes: tuple[int, ...]) -> Fraction:
    """Mean of S over all distinct arrangements of the prediction labels.

    Truth positions are grouped by class; at each position one remaining
    prediction class is placed, so every distinct label sequence (multiset
    permutation) is visited exactly once.  S is accumulated incrementally:
    raising a cell from c to c+1 adds 2c+1.
    """
    positions = [i for i, a in enumerate(row_sizes) for _ in range(a)]
    m = len(positions)
    remaining = list(col_sizes)
    cells: dict[tuple[int, int], int] = {}
    total = 0
    count = 0

    def walk(pos: int, s: int) -> None:
        nonlocal total, count
        if pos == m:
            total += s
            count += 1
            return
        row = positions[pos]
        for j, left in enumerate(remaining):
            if left == 0:
                continue
            remaining[j] = left - 1
            c = cells.get((row, j), 0)
            cells[(row, j)] = c + 1
            walk(pos + 1, s + 2 * c + 1)
            cells[(row, j)] = c
            remaining[j] = left

    walk(0, 0)
    return Fraction(total, count)


def permutation_expectation_exact(table: ContingencyTable) -> float:
    """Exact mean of S over every distinct relabelling of the prediction.

    Class sizes on both sides are held fixed; the average runs over all
    multiset permutations of the prediction labels against a fixed truth
    labelling.  Only the marginal size multisets matter, so results are
    cached on them.

    Raises:
        TooLargeForExactError: more than ``EXACT_PIXEL_LIMIT`` pixels.
    """
    m = table.total
    if m > EXACT_PIXEL_LIMIT:
        raise TooLargeForExactError(
            f"exact enumeration supports at most {EXACT_PIXEL_LIMIT} pixels, got {m}"
        )
    rows = tuple(sorted(table.row_marginals.values()))
    cols = tuple(sorted(table.col_marginals.values()))
    return float(_exact_mean_sum_sq(rows, cols))


def permutation_expectation_monte_carlo(
    table: ContingencyTable, samples: int, seed: int
) -> MonteCarloEstimate:
    """Estimate the chance expectation of S by seeded uniform shuffles.

    Deterministic for a given ``(samples, seed)``: shuffles are drawn in
    fixed chunks with independently derived child seeds and combined with
    exact integer sums, so evaluation order cannot change the result.

    Raises:
        InvalidSampleCountError: ``samples < 1``.
    """
    if samples < 1:
        raise InvalidSampleCountError(f"samples must be >= 1, got {samples}")
    row_sizes = [c for _, c in sorted(table.row_marginals.items())]
    col_sizes = [c for _, c in sorted(table.col_marginals.items())]
    n_i, n_j = len(row_sizes), len(col_sizes)
    m = table.total
    t_codes = np.repeat(np.arange(n_i, dtype=np.int64), row_sizes)
    p_base = np.repeat(np.arange(n_j, dtype=np.int64), col_sizes)
    n_cells = n_i * n_j

    n_chunks = -(-samples // _MC_CHUNK)
    children = np.random.SeedSequence(seed).spawn(n_chunks)
    total = 0
    total_sq = 0
    done = 0
    for child in children:
        k = min(_MC_CHUNK, samples - done)
        done += k
        rng = np.random.default_rng(child)
        perms = rng.permuted(np.tile(p_base, (k, 1)), axis=1)
        keys = t_codes[np.newaxis, :] * n_j + perms
        if n_cells <= _BATCH_CELL_LIMIT:
            flat = (keys + (np.arange(k, dtype=np.int64) * n_cells)[:, np.newaxis]).reshape(-1)
            counts = np.bincount(flat, minlength=k * n_cells).reshape(k, n_cells)
            s_vals = np.einsum("ij,ij->i", counts, counts)
        else:
            s_vals = np.fromiter(
                (
                    int(np.sum(np.unique(row, return_counts=True)[1].astype(np.int64) ** 2))
                    for row in keys
                ),
                dtype=np.int64,
                count=k,
            )
        as_ints = s_vals.tolist()
        total += sum(as_ints)
        total_sq += sum(x * x for x in as_ints)

    mean = float(Fraction(total, samples))
    if samples == 1:
        stderr = math.nan
    else:
        var = Fraction(total_sq, 1) - Fraction(total * total, samples)
        stderr = math.sqrt(float(var / (samples - 1)) / samples)
    return MonteCarloEstimate(mean=mean, stderr=stderr, samples=samples)
