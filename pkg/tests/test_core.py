"""seg-core: maps, masks, contingency tables."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from segrand import (
    ContingencyTable,
    EmptySelectionError,
    SegmentationMap,
    ShapeMismatchError,
    build_contingency,
    foreground_mask,
    relabel_compact,
)
from tests.conftest import random_pair, seg


class TestSegmentationMap:
    def test_one_dimensional_becomes_single_row(self):
        m = seg([0, 0, 1, 1])
        assert m.shape == (1, 4)
        assert m.pixel_count == 4

    def test_rejects_float_dtype(self):
        with pytest.raises(TypeError):
            SegmentationMap(np.zeros((2, 2), dtype=np.float64))

    def test_rejects_bool_dtype(self):
        with pytest.raises(TypeError):
            SegmentationMap(np.zeros((2, 2), dtype=bool))

    def test_rejects_negative_labels(self):
        with pytest.raises(ValueError):
            seg([[0, -1]])

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            SegmentationMap(np.zeros((0, 3), dtype=np.int64))

    def test_rejects_4d(self):
        with pytest.raises(ValueError):
            SegmentationMap(np.zeros((1, 1, 1, 1), dtype=np.int64))

    def test_labels_are_readonly(self):
        m = seg([[1, 2], [3, 4]])
        with pytest.raises(ValueError):
            m.labels[0, 0] = 9

    def test_three_dimensional_frames(self):
        m = SegmentationMap(np.zeros((2, 3, 4), dtype=np.int64))
        assert m.shape == (2, 3, 4)
        assert m.pixel_count == 24


class TestForegroundMask:
    def test_membership(self):
        mask = foreground_mask(seg([[0, 1], [1, 0]]), {0})
        assert mask.keep.tolist() == [[False, True], [True, False]]
        assert mask.kept_count == 2

    def test_empty_background_keeps_all(self):
        mask = foreground_mask(seg([[5]]), set())
        assert mask.keep.tolist() == [[True]]
        assert mask.kept_count == 1

    def test_all_background_is_legal(self):
        mask = foreground_mask(seg([[0, 0], [0, 0]]), {0})
        assert mask.kept_count == 0


class TestBuildContingency:
    def test_hand_counted_cells(self):
        table = build_contingency(seg([0, 0, 1, 1]), seg([0, 1, 2, 2]))
        assert table.cells == {(0, 0): 1, (0, 1): 1, (1, 2): 2}
        assert table.total == 4
        assert table.sum_sq_cells == 6
        assert table.row_sq_sum == 8
        assert table.col_sq_sum == 6
        assert table.row_marginals == {0: 2, 1: 2}
        assert table.col_marginals == {0: 1, 1: 1, 2: 2}

    def test_identity_map(self):
        table = build_contingency(seg([7, 7, 7]), seg([7, 7, 7]))
        assert table.cells == {(7, 7): 3}
        assert table.total == 3
        assert table.sum_sq_cells == table.row_sq_sum == table.col_sq_sum == 9

    def test_single_kept_pixel(self):
        mask = foreground_mask(seg([0, 1, 1]), {1})
        table = build_contingency(seg([0, 1, 1]), seg([4, 4, 4]), mask)
        assert table.cells == {(0, 4): 1}
        assert table.total == 1

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            build_contingency(seg([[0, 1]]), seg([[0], [1]]))

    def test_mask_shape_mismatch(self):
        mask = foreground_mask(seg([[0, 1]]), {0})
        with pytest.raises(ShapeMismatchError):
            build_contingency(seg([[0], [1]]), seg([[0], [1]]), mask)

    def test_empty_selection(self):
        mask = foreground_mask(seg([[0, 0]]), {0})
        with pytest.raises(EmptySelectionError):
            build_contingency(seg([[0, 0]]), seg([[1, 2]]), mask)

    def test_matches_python_counter_reference(self, rng):
        for _ in range(50):
            truth, pred = random_pair(rng, max_pixels=80, max_classes=9)
            table = build_contingency(truth, pred)
            expected = {}
            for t, p in zip(truth.labels.ravel().tolist(), pred.labels.ravel().tolist()):
                expected[(t, p)] = expected.get((t, p), 0) + 1
            assert table.cells == expected
            assert table == ContingencyTable.from_cells(expected)

    def test_sparse_path_matches_dense(self):
        # >4096 compacted cells forces the sparse counting branch
        n = 100
        truth = seg(np.arange(n).reshape(1, n))
        pred = seg((np.arange(n)[::-1].copy()).reshape(1, n))
        table = build_contingency(truth, pred)
        assert len(table.cells) == n
        assert table.sum_sq_cells == n
        assert table.row_sq_sum == table.col_sq_sum == n


@st.composite
def aligned_pairs(draw):
    h = draw(st.integers(1, 5))
    w = draw(st.integers(1, 6))
    n = h * w
    truth = draw(st.lists(st.integers(0, 6), min_size=n, max_size=n))
    pred = draw(st.lists(st.integers(0, 6), min_size=n, max_size=n))
    return (
        SegmentationMap(np.asarray(truth).reshape(h, w)),
        SegmentationMap(np.asarray(pred).reshape(h, w)),
    )


class TestTableInvariants:
    @given(aligned_pairs())
    @settings(max_examples=80, deadline=None)
    def test_totals_and_bounds(self, pair):
        truth, pred = pair
        table = build_contingency(truth, pred)
        m = table.total
        assert m == truth.pixel_count
        assert sum(table.cells.values()) == m
        assert sum(table.row_marginals.values()) == m
        assert sum(table.col_marginals.values()) == m
        s, a, b = table.sum_sq_cells, table.row_sq_sum, table.col_sq_sum
        assert m <= s <= min(a, b) <= max(a, b) <= m * m

    @given(aligned_pairs(), st.integers(1, 50), st.integers(1, 50))
    @settings(max_examples=60, deadline=None)
    def test_label_permutation_invariance(self, pair, dt, dp):
        truth, pred = pair
        base = build_contingency(truth, pred)
        moved = build_contingency(
            SegmentationMap(truth.labels + dt), SegmentationMap(pred.labels + dp)
        )
        assert sorted(base.cells.values()) == sorted(moved.cells.values())
        assert sorted(base.row_marginals.values()) == sorted(moved.row_marginals.values())
        assert sorted(base.col_marginals.values()) == sorted(moved.col_marginals.values())
        assert (base.sum_sq_cells, base.row_sq_sum, base.col_sq_sum) == (
            moved.sum_sq_cells,
            moved.row_sq_sum,
            moved.col_sq_sum,
        )

    @given(aligned_pairs())
    @settings(max_examples=60, deadline=None)
    def test_transposition(self, pair):
        truth, pred = pair
        fwd = build_contingency(truth, pred)
        rev = build_contingency(pred, truth)
        assert rev.cells == {(j, i): c for (i, j), c in fwd.cells.items()}
        assert rev.row_sq_sum == fwd.col_sq_sum
        assert rev.col_sq_sum == fwd.row_sq_sum

    @given(aligned_pairs())
    @settings(max_examples=60, deadline=None)
    def test_square_sums_match_recomputation(self, pair):
        table = build_contingency(*pair)
        rows, cols = {}, {}
        for (i, j), c in table.cells.items():
            rows[i] = rows.get(i, 0) + c
            cols[j] = cols.get(j, 0) + c
        assert table.sum_sq_cells == sum(c * c for c in table.cells.values())
        assert table.row_sq_sum == sum(c * c for c in rows.values())
        assert table.col_sq_sum == sum(c * c for c in cols.values())


class TestRelabelCompact:
    def test_first_appearance_order(self):
        assert relabel_compact(seg([5, 5, 9, 5])).labels.tolist() == [[0, 0, 1, 0]]

    def test_already_compact(self):
        assert relabel_compact(seg([0, 1, 2])).labels.tolist() == [[0, 1, 2]]

    def test_singleton(self):
        assert relabel_compact(seg([3])).labels.tolist() == [[0]]

    @given(aligned_pairs())
    @settings(max_examples=40, deadline=None)
    def test_metrics_unchanged(self, pair):
        truth, pred = pair
        base = build_contingency(truth, pred)
        compact = build_contingency(relabel_compact(truth), relabel_compact(pred))
        assert (base.sum_sq_cells, base.row_sq_sum, base.col_sq_sum, base.total) == (
            compact.sum_sq_cells,
            compact.row_sq_sum,
            compact.col_sq_sum,
            compact.total,
        )
