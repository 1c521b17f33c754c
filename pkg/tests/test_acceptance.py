"""Acceptance suite: one test per release criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines; the test names mirror the criterion numbers.
"""

from __future__ import annotations

import time
from fractions import Fraction

import numpy as np
import pytest

from segrand import (
    Degeneracy,
    EmptySelectionError,
    SegmentationMap,
    adjusted_metrics,
    build_contingency,
    evaluate_pair,
    expected_sum_squares,
    pair_count,
    sweep_curves,
    unadjusted_metrics,
)
from segrand.cli import main
from segrand.io import write_label_map
from segrand.oracle import (
    permutation_expectation_exact,
    permutation_expectation_monte_carlo,
)
from segrand.synth import GridSpec, prediction_at

SEED = 20240807


def _pass(number: int, detail: str) -> None:
    print(f"[acceptance] criterion {number}: PASS ({detail})")


def _random_corpus(count: int) -> list[tuple[SegmentationMap, SegmentationMap]]:
    rng = np.random.default_rng(SEED)
    pairs = []
    for _ in range(count):
        m = int(rng.integers(2, 201))
        kt = int(rng.integers(1, 13))
        kp = int(rng.integers(1, 13))
        pairs.append(
            (
                SegmentationMap(rng.integers(0, kt, size=(1, m))),
                SegmentationMap(rng.integers(0, kp, size=(1, m))),
            )
        )
    # structured instances: identical, constants, refinement, coarsening,
    # all-singletons, and a guaranteed chance-worse (negative ARI) case
    base = rng.integers(0, 5, size=(1, 60))
    pairs.append((SegmentationMap(base), SegmentationMap(base.copy())))
    pairs.append((SegmentationMap(base), SegmentationMap(np.zeros((1, 60), dtype=np.int64))))
    pairs.append((SegmentationMap(np.zeros((1, 60), dtype=np.int64)), SegmentationMap(base)))
    parity = np.arange(60).reshape(1, 60) % 2
    pairs.append((SegmentationMap(base), SegmentationMap(base * 2 + parity)))
    lut = rng.integers(0, 2, size=5)
    pairs.append((SegmentationMap(base), SegmentationMap(lut[base])))
    pairs.append(
        (
            SegmentationMap(np.arange(40).reshape(1, 40)),
            SegmentationMap(np.arange(40)[::-1].copy().reshape(1, 40)),
        )
    )
    pairs.append((SegmentationMap([[0, 0, 1, 1]]), SegmentationMap([[0, 1, 0, 1]])))
    return pairs


@pytest.fixture(scope="module")
def corpus():
    return _random_corpus(1000)


@pytest.fixture(scope="module")
def corpus_metrics(corpus):
    out = []
    for truth, pred in corpus:
        table = build_contingency(truth, pred)
        out.append((truth, pred, table, adjusted_metrics(table)))
    return out


def test_criterion_01_oracle_equivalence(corpus):
    started = time.perf_counter()
    checked = 0
    for truth, pred in corpus:
        table = build_contingency(truth, pred)
        s, a, b, m = table.sum_sq_cells, table.row_sq_sum, table.col_sq_sum, table.total
        pc = pair_count(truth, pred)
        assert (2 * pc.both_same + m, 2 * (pc.both_same + pc.truth_only) + m,
                2 * (pc.both_same + pc.pred_only) + m) == (s, a, b)

        rp, rr = unadjusted_metrics(table)
        for val, gamma_sq, num, den in (
            (rp, b, pc.both_same, pc.both_same + pc.pred_only),
            (rr, a, pc.both_same, pc.both_same + pc.truth_only),
        ):
            if den == 0:
                assert val.degenerate and val.value == 1.0 and gamma_sq == m
            else:
                assert not val.degenerate
                assert Fraction(s - m, gamma_sq - m) == Fraction(num, den)
                assert val.value == float(Fraction(num, den))

        s_o = 2 * pc.both_same + m
        a_o = 2 * (pc.both_same + pc.truth_only) + m
        b_o = 2 * (pc.both_same + pc.pred_only) + m
        e_o = Fraction(a_o * b_o, m * (m - 1)) + Fraction(m * m - a_o - b_o, m - 1)
        for val, gamma in zip(
            adjusted_metrics(table),
            (Fraction(a_o + b_o, 2), Fraction(b_o), Fraction(a_o)),
        ):
            if val.degenerate:
                assert gamma - e_o == 0
            else:
                assembled = float((s_o - e_o) / (gamma - e_o))
                assert abs(val.value - assembled) <= 1e-12
        checked += 1
    elapsed = time.perf_counter() - started
    assert checked >= 1000
    assert elapsed < 10.0
    _pass(1, f"{checked} pairs, {elapsed:.2f}s")


def test_criterion_02_antisymmetry(corpus_metrics):
    for truth, pred, _table, (_, arp, arr) in corpus_metrics:
        _, swapped_arp, swapped_arr = adjusted_metrics(build_contingency(pred, truth))
        assert (arp.value, arp.degenerate) == (swapped_arr.value, swapped_arr.degenerate)
        assert (arr.value, arr.degenerate) == (swapped_arp.value, swapped_arp.degenerate)
    _pass(2, f"{len(corpus_metrics)} pairs, bit-for-bit")


def test_criterion_03_harmonic_mean_and_bounds(corpus_metrics):
    saw_negative = False
    finite_cases = 0
    for _truth, _pred, _table, (ari, arp, arr) in corpus_metrics:
        if ari.degenerate or arp.degenerate or arr.degenerate:
            continue
        finite_cases += 1
        saw_negative = saw_negative or ari.value < 0
        if arp.value > 0 and arr.value > 0:
            hm = 2.0 / (1.0 / arp.value + 1.0 / arr.value)
            assert abs(ari.value - hm) <= 1e-10
        lo, hi = min(arp.value, arr.value), max(arp.value, arr.value)
        assert lo - 1e-10 <= ari.value <= hi + 1e-10
    assert saw_negative, "corpus must contain a negative-ARI instance"
    _pass(3, f"{finite_cases} finite cases incl. negative ARI")


def test_criterion_04_expectation_correctness():
    rng = np.random.default_rng(SEED + 1)
    tables = []
    while len(tables) < 220:
        m = int(rng.integers(2, 9))
        truth = SegmentationMap(rng.integers(0, int(rng.integers(1, 13)), size=(1, m)))
        pred = SegmentationMap(rng.integers(0, int(rng.integers(1, 13)), size=(1, m)))
        tables.append(build_contingency(truth, pred))

    mutation_detected_everywhere = True
    for table in tables:
        oracle = permutation_expectation_exact(table)
        assert abs(expected_sum_squares(table) - oracle) <= 1e-9
        m = table.total
        if m >= 3:
            a, b = table.row_sq_sum, table.col_sq_sum
            mutated = float(
                Fraction(a * b, m * (m - 2)) + Fraction(m * m - a - b, m - 1)
            )
            mutation_detected_everywhere &= abs(mutated - oracle) > 1e-9
    assert mutation_detected_everywhere, "the m-2 denominator mutation must fail this suite"

    deviations = []
    for m in (50, 500, 10_000):
        truth = SegmentationMap(rng.integers(0, 11, size=(1, m)))
        pred = SegmentationMap(rng.integers(0, 9, size=(1, m)))
        table = build_contingency(truth, pred)
        e = expected_sum_squares(table)
        est = permutation_expectation_monte_carlo(table, 100_000, seed=SEED)
        assert est.stderr > 0
        assert abs(est.mean - e) <= 3 * est.stderr
        deviations.append((m, (est.mean - e) / est.stderr))
    _pass(4, f"{len(tables)} exact tables; MC sigmas {[f'{d:+.2f}' for _, d in deviations]}")


def test_criterion_05_hand_derived_anchor():
    table = build_contingency(SegmentationMap([[0, 0, 1, 1]]), SegmentationMap([[0, 1, 2, 2]]))
    ari, arp, arr = adjusted_metrics(table)
    assert abs(arp.value - 1.0) <= 1e-12
    assert abs(arr.value - 0.4) <= 1e-12
    assert abs(ari.value - 4 / 7) <= 1e-12
    _pass(5, f"ari={ari.value!r}, arp={arp.value!r}, arr={arr.value!r}")


def test_criterion_06_sweep_reproduction():
    curve = sweep_curves(GridSpec(), 1, 40)
    truth_k = GridSpec().class_count
    for row in curve.rows:
        if row.k == truth_k:
            assert (row.ari.value, row.arp.value, row.arr.value) == (1.0, 1.0, 1.0)
            assert not (row.ari.degenerate or row.arp.degenerate or row.arr.degenerate)
        else:
            assert row.ari.value < 1.0
        if row.k > truth_k:
            assert row.arp.value == 1.0 and not row.arp.degenerate
        if row.k < truth_k:
            assert row.arr.value == 1.0  # exact, or degenerate resolved to 1
            table = build_contingency(
                prediction_at(GridSpec(), truth_k), prediction_at(GridSpec(), row.k)
            )
            _rp, rr = unadjusted_metrics(table)
            assert rr.value == 1.0

    small = sweep_curves(GridSpec(4, 4, 4, 4), 8, 32)
    by_k = {row.k: row for row in small.rows}
    assert abs(by_k[8].ari.value - by_k[32].ari.value) <= 1e-9
    _pass(6, f"plateaus hold; ARI(k=8)={by_k[8].ari.value!r} == ARI(k=32)")


def test_criterion_07_degeneracy_conventions():
    table = build_contingency(
        SegmentationMap([[0, 1, 2, 3, 0]]), SegmentationMap([[7, 7, 7, 7, 7]])
    )
    ari, arp, arr = adjusted_metrics(table)
    assert ari.value == 0.0 and not ari.degenerate
    assert arp.value == 0.0 and not arp.degenerate
    assert arr.value == 1.0 and arr.degenerate

    report = evaluate_pair(
        SegmentationMap([[0, 1, 2, 3, 0]]),
        SegmentationMap([[7, 7, 7, 7, 7]]),
        background_ids=(),
        compute_fg=False,
        compute_global=True,
    )
    assert report.degeneracy is Degeneracy.ZERO_DENOMINATOR

    with pytest.raises(EmptySelectionError):
        evaluate_pair(SegmentationMap([[0, 5]]), SegmentationMap([[1, 1]]))
    _pass(7, "single-cluster prediction and one-pixel foreground handled")


def test_criterion_08_determinism(tmp_path):
    rng = np.random.default_rng(SEED + 2)
    lines = ["sample_id,truth,pred"]
    for i in range(100):
        truth = rng.integers(0, 6, size=(8, 8))
        truth.flat[:3] = [1, 2, 3]
        pred = rng.integers(0, 6, size=(8, 8))
        if i % 7 == 0:
            pred = pred + 400  # exercise 16-bit PGM samples
        tp = tmp_path / f"t{i:03d}.pgm"
        pp = tmp_path / f"p{i:03d}.pgm"
        write_label_map(SegmentationMap(truth), tp)
        write_label_map(SegmentationMap(pred), pp)
        lines.append(f"s{i:03d},{tp.name},{pp.name}")
    manifest = tmp_path / "manifest.csv"
    manifest.write_text("\n".join(lines) + "\n")

    outputs = []
    for threads in ("1", "8"):
        out = tmp_path / f"run{threads}.csv"
        code = main(["eval", "--manifest", str(manifest), "--global",
                     "--threads", threads, "--out", str(out)])
        assert code == 0
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]
    assert len(outputs[0].splitlines()) == 101

    sweep_a = tmp_path / "sweep_a.csv"
    sweep_b = tmp_path / "sweep_b.csv"
    assert main(["sweep", "--out", str(sweep_a)]) == 0
    assert main(["sweep", "--out", str(sweep_b)]) == 0
    assert sweep_a.read_bytes() == sweep_b.read_bytes()
    _pass(8, "100-entry manifest identical at --threads 1/8; sweep byte-stable")


def test_criterion_09_foreground_consistency():
    rng = np.random.default_rng(SEED + 3)
    checked = 0
    while checked < 200:
        m = int(rng.integers(4, 120))
        truth = SegmentationMap(rng.integers(0, 6, size=(1, m)))
        pred = SegmentationMap(rng.integers(0, 6, size=(1, m)))
        keep = truth.labels.reshape(-1) != 0
        if int(keep.sum()) < 2 or bool(keep.all()):
            continue
        report = evaluate_pair(truth, pred, background_ids={0})
        sub_truth = SegmentationMap(truth.labels.reshape(-1)[keep])
        sub_pred = SegmentationMap(pred.labels.reshape(-1)[keep])
        sub = evaluate_pair(
            sub_truth, sub_pred, background_ids=(), compute_fg=False, compute_global=True
        )
        assert (report.fg_ari.value, report.fg_ari.degenerate) == (sub.ari.value, sub.ari.degenerate)
        assert (report.fg_arp.value, report.fg_arp.degenerate) == (sub.arp.value, sub.arp.degenerate)
        assert (report.fg_arr.value, report.fg_arr.degenerate) == (sub.arr.value, sub.arr.degenerate)
        checked += 1
    _pass(9, f"{checked} fuzzed instances, exact equality")
