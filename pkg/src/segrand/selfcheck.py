"""Randomized cross-validation of the closed forms against brute force.

Generates a stream of seeded random and structured (identical, constant,
refined, coarsened) map pairs and checks, per instance:

* unadjusted precision/recall equal the pair-count oracle as exact
  rationals,
* adjusted values equal the oracle-assembled ones within 1e-12,
* precision/recall antisymmetry under argument swap, bit for bit,
* the harmonic-mean identity and the min/max bounds within 1e-10,
* the closed-form expectation equals the exact permutation mean within
  1e-9 whenever the instance is small enough to enumerate,
* foreground metrics equal global metrics on the foreground-restricted
  maps, bit for bit,
* invariance under relabelling of either side, and the range bound.

The first failing instance is returned as a counterexample.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .core import SegmentationMap, build_contingency, foreground_mask
from .metrics import adjusted_metrics, expected_sum_squares, unadjusted_metrics
from .oracle import EXACT_PIXEL_LIMIT, pair_count, permutation_expectation_exact


@dataclass(frozen=True)
class Violation:
    check: str
    message: str
    truth: list
    pred: list

    def __str__(self) -> str:
        return (
            f"property {self.check!r} failed: {self.message}\n"
            f"  truth = {self.truth}\n"
            f"  pred  = {self.pred}"
        )


def _random_shape(rng: np.random.Generator, max_pixels: int) -> tuple[int, int]:
    h = int(rng.integers(1, max(2, int(max_pixels**0.5)) + 1))
    max_w = max(2, max_pixels // h)
    w = int(rng.integers(1, max_w + 1))
    if h * w < 2:
        w = 2
    return h, w


def _make_instance(rng: np.random.Generator, index: int, max_pixels: int):
    h, w = _random_shape(rng, max_pixels)
    n = h * w
    kt = int(rng.integers(1, 13))
    kp = int(rng.integers(1, 13))
    truth = rng.integers(0, kt, size=(h, w))
    variant = index % 8
    if variant == 0:
        pred = rng.integers(0, kp, size=(h, w))
    elif variant == 1:
        pred = truth.copy()
    elif variant == 2:
        pred = np.full((h, w), int(rng.integers(0, 5)))
    elif variant == 3:
        truth = np.full((h, w), int(rng.integers(0, 5)))
        pred = rng.integers(0, kp, size=(h, w))
    elif variant == 4:
        # refinement: split each truth class in two by pixel parity
        parity = (np.arange(n).reshape(h, w) % 2).astype(np.int64)
        pred = truth * 2 + parity * (rng.integers(0, 2, size=(h, w)))
    elif variant == 5:
        # coarsening: collapse truth labels through a random many-to-one map
        lut = rng.integers(0, max(1, kt // 2 + 1), size=kt)
        pred = lut[truth]
    elif variant == 6:
        pred = (truth + int(rng.integers(1, 7))) % max(2, kt)
    else:
        pred = rng.integers(0, kp, size=(h, w))
    return SegmentationMap(truth), SegmentationMap(pred), variant


def _vals(triple) -> tuple:
    return tuple((v.value, v.degenerate) for v in triple)


def _check_instance(truth: SegmentationMap, pred: SegmentationMap, variant: int) -> Optional[str]:
    table = build_contingency(truth, pred)
    s, a, b, m = table.sum_sq_cells, table.row_sq_sum, table.col_sq_sum, table.total
    pc = pair_count(truth, pred)

    # unadjusted vs pair counts, as exact rationals
    rp, rr = unadjusted_metrics(table)
    for name, val, gamma_sq, num, den in (
        ("precision", rp, b, pc.both_same, pc.both_same + pc.pred_only),
        ("recall", rr, a, pc.both_same, pc.both_same + pc.truth_only),
    ):
        if den == 0:
            if not (val.degenerate and val.value == 1.0 and gamma_sq == m):
                return f"unadjusted {name}: oracle denominator 0 but got {val}"
        elif val.degenerate:
            return f"unadjusted {name}: flagged degenerate but oracle has {num}/{den}"
        elif Fraction(s - m, gamma_sq - m) != Fraction(num, den):
            return f"unadjusted {name}: formula {s - m}/{gamma_sq - m} != oracle {num}/{den}"
        elif val.value != float(Fraction(num, den)):
            return f"unadjusted {name}: {val.value!r} != rounded oracle ratio"

    # adjusted vs oracle-assembled (pair counts + closed-form expectation),
    # both sides in exact rationals
    s_o = 2 * pc.both_same + m
    a_o = 2 * (pc.both_same + pc.truth_only) + m
    b_o = 2 * (pc.both_same + pc.pred_only) + m
    if (s_o, a_o, b_o) != (s, a, b):
        return f"square sums {s, a, b} != pair-count reconstruction {s_o, a_o, b_o}"
    e_o = Fraction(a_o * b_o, m * (m - 1)) + Fraction(m * m - a_o - b_o, m - 1)
    ari, arp, arr = adjusted_metrics(table)
    for name, val, gamma in (
        ("ari", ari, Fraction(a_o + b_o, 2)),
        ("arp", arp, Fraction(b_o)),
        ("arr", arr, Fraction(a_o)),
    ):
        if val.degenerate:
            if gamma - e_o != 0:
                return f"adjusted {name}: flagged degenerate but oracle denominator is nonzero"
        else:
            oracle = float((s_o - e_o) / (gamma - e_o))
            if abs(val.value - oracle) > 1e-12:
                return f"adjusted {name}: {val.value!r} vs oracle {oracle!r}"

    # antisymmetry, bit for bit
    r_ari, r_arp, r_arr = adjusted_metrics(build_contingency(pred, truth))
    if (arp.value, arp.degenerate) != (r_arr.value, r_arr.degenerate):
        return f"antisymmetry: arp(X,Y)={arp} != arr(Y,X)={r_arr}"
    if (arr.value, arr.degenerate) != (r_arp.value, r_arp.degenerate):
        return f"antisymmetry: arr(X,Y)={arr} != arp(Y,X)={r_arp}"

    # harmonic mean and bounds
    finite = not (ari.degenerate or arp.degenerate or arr.degenerate)
    if finite and arp.value > 0 and arr.value > 0:
        hm = 2.0 / (1.0 / arp.value + 1.0 / arr.value)
        if abs(ari.value - hm) > 1e-10:
            return f"harmonic mean: ari={ari.value!r} vs 2/(1/arp+1/arr)={hm!r}"
    if finite:
        lo, hi = min(arp.value, arr.value), max(arp.value, arr.value)
        if not (lo - 1e-10 <= ari.value <= hi + 1e-10):
            return f"bounds: ari={ari.value!r} outside [{lo!r}, {hi!r}]"

    # range
    for name, val in (("ari", ari), ("arp", arp), ("arr", arr), ("rp", rp), ("rr", rr)):
        if val.value > 1.0 + 1e-12:
            return f"range: {name}={val.value!r} > 1"

    # closed-form expectation vs exhaustive permutation mean
    if m <= EXACT_PIXEL_LIMIT:
        e = expected_sum_squares(table)
        exact = permutation_expectation_exact(table)
        if abs(e - exact) > 1e-9:
            return f"expectation: closed form {e!r} vs permutation mean {exact!r}"

    # relabelling invariance (shift labels by a constant on both sides)
    shifted = adjusted_metrics(
        build_contingency(
            SegmentationMap(truth.labels + 7), SegmentationMap(pred.labels + 3)
        )
    )
    if _vals(shifted) != _vals((ari, arp, arr)):
        return "label shift changed adjusted values"

    # foreground metrics == global metrics on the restricted maps
    bg = {int(truth.labels.reshape(-1)[0])}
    mask = foreground_mask(truth, bg)
    if 2 <= mask.kept_count < truth.pixel_count:
        fg_table = build_contingency(truth, pred, mask)
        sel = mask.keep.reshape(-1)
        sub_t = SegmentationMap(truth.labels.reshape(-1)[sel])
        sub_p = SegmentationMap(pred.labels.reshape(-1)[sel])
        if _vals(adjusted_metrics(fg_table)) != _vals(
            adjusted_metrics(build_contingency(sub_t, sub_p))
        ):
            return "foreground metrics differ from metrics on restricted maps"

    # structural laws for the constructed variants
    if variant == 1 and not ari.degenerate and ari.value != 1.0:
        return f"identical maps gave ari {ari.value!r}"
    if variant == 4 and not (rp.value == 1.0 and (arp.value == 1.0 or arp.degenerate)):
        return f"refinement: rp={rp}, arp={arp}"
    if variant == 5 and not (rr.value == 1.0 and (arr.value == 1.0 or arr.degenerate)):
        return f"coarsening: rr={rr}, arr={arr}"
    return None


def run_selfcheck(instances: int, max_pixels: int = 64, seed: int = 0) -> Optional[Violation]:
    """Run every property on ``instances`` generated map pairs.

    Returns the first counterexample, or None when everything holds.
    """
    if instances < 1:
        raise ValueError("instances must be >= 1")
    if max_pixels < 2:
        raise ValueError("max_pixels must be >= 2")
    rng = np.random.default_rng(seed)
    for index in range(instances):
        truth, pred, variant = _make_instance(rng, index, max_pixels)
        message = _check_instance(truth, pred, variant)
        if message is not None:
            check = message.split(":", 1)[0]
            return Violation(
                check=check,
                message=message,
                truth=truth.labels.tolist(),
                pred=pred.labels.tolist(),
            )
    return None
