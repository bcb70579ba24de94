"""Weighted isotonic least squares via pool-adjacent-violators."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = ["WeightedPoint", "merge_ties", "pava"]


@dataclass(frozen=True, slots=True)
class WeightedPoint:
    """One (location, target, weight) observation for isotonic fitting."""

    x: float
    y: float
    w: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.w)):
            raise ValueError("weighted points must have finite coordinates")
        if self.w <= 0.0:
            raise ValueError("weights must be positive")


def _as_arrays(points: Sequence[WeightedPoint]):
    x = np.array([p.x for p in points], dtype=np.float64)
    y = np.array([p.y for p in points], dtype=np.float64)
    w = np.array([p.w for p in points], dtype=np.float64)
    return x, y, w


def _merge_ties_arrays(x: np.ndarray, y: np.ndarray, w: np.ndarray):
    order = np.argsort(x, kind="stable")
    x, y, w = x[order], y[order], w[order]
    if x.size > 1 and np.any(x[1:] == x[:-1]):
        starts = np.flatnonzero(np.r_[True, x[1:] != x[:-1]])
        sw = np.add.reduceat(w, starts)
        swy = np.add.reduceat(w * y, starts)
        return x[starts], swy / sw, sw
    return x, y, w


def merge_ties(points: Sequence[WeightedPoint]) -> list[WeightedPoint]:
    """Sort by location and pool exact location ties into weighted means.

    The pooled weight is the sum of tied weights and the pooled target their
    weighted mean, which leaves every weighted least-squares problem over
    location-measurable fits unchanged up to an additive constant.
    """
    points = list(points)
    if not points:
        return []
    xm, ym, wm = _merge_ties_arrays(*_as_arrays(points))
    return [WeightedPoint(float(a), float(b), float(c)) for a, b, c in zip(xm, ym, wm)]


def _pava_arrays(y: np.ndarray, w: np.ndarray) -> np.ndarray:
    # block stack; weight and weight*target are accumulated separately so
    # pooled means are plain ratios of exact sums
    n = y.size
    vals: list[float] = []
    sums_w: list[float] = []
    sums_wy: list[float] = []
    counts: list[int] = []
    ys = y.tolist()
    ws = w.tolist()
    for i in range(n):
        cw = ws[i]
        cwy = cw * ys[i]
        value = ys[i]
        count = 1
        while vals and vals[-1] > value:
            cw += sums_w.pop()
            cwy += sums_wy.pop()
            count += counts.pop()
            vals.pop()
            value = cwy / cw
        vals.append(value)
        sums_w.append(cw)
        sums_wy.append(cwy)
        counts.append(count)
    return np.repeat(np.asarray(vals, dtype=np.float64), counts)


def pava(points: Sequence[WeightedPoint]) -> list[float]:
    """Nondecreasing weighted least-squares fit at strictly increasing locations.

    Pool-adjacent-violators: scan left to right keeping a stack of blocks
    whose means increase strictly; whenever a new point breaks that, merge
    blocks until the invariant is restored.  Each point enters the stack once
    and every merge removes a block, so the scan is linear time.  Location
    ties must be merged beforehand (see :func:`merge_ties`).
    """
    points = list(points)
    if not points:
        raise ValueError("isotonic regression needs at least one point")
    x, y, w = _as_arrays(points)
    if x.size > 1 and np.any(x[1:] <= x[:-1]):
        raise ValueError("locations must be strictly increasing; merge ties first")
    return _pava_arrays(y, w).tolist()
