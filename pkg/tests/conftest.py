"""Shared helpers for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from segrand import SegmentationMap


def seg(data) -> SegmentationMap:
    return SegmentationMap(np.asarray(data))


def random_pair(rng: np.random.Generator, min_pixels: int = 2, max_pixels: int = 64,
                max_classes: int = 12) -> tuple[SegmentationMap, SegmentationMap]:
    m = int(rng.integers(min_pixels, max_pixels + 1))
    kt = int(rng.integers(1, max_classes + 1))
    kp = int(rng.integers(1, max_classes + 1))
    truth = rng.integers(0, kt, size=m)
    pred = rng.integers(0, kp, size=m)
    return SegmentationMap(truth.reshape(1, m)), SegmentationMap(pred.reshape(1, m))


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
