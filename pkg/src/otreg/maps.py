"""Nondecreasing transport maps on an interval and their weighted L2 geometry.

A map is stored as knots over a closed domain, interpreted either as a
right-continuous step function or as a piecewise-linear interpolant
(constant beyond the extreme knots in both modes).  The squared L2 distance
between two maps is computed exactly: a discrete weighting measure turns it
into a finite sum, a uniform one into a sum of segment integrals of
quadratics, which two-point Gauss-Legendre quadrature integrates exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .measures import DiscreteMeasure

__all__ = [
    "MonotoneMap",
    "UniformDensity",
    "WeightingMeasure",
    "clamp_to",
    "l2_distance_sq",
    "map_eval",
]

# decreases smaller than this are treated as float noise and flattened
_VALUE_DECREASE_TOL = 1e-12

# two-point Gauss-Legendre node offset: midpoint +/- length / (2 sqrt 3)
_GAUSS_OFFSET = 0.5 / np.sqrt(3.0)


@dataclass(frozen=True)
class UniformDensity:
    """Uniform probability density on a nondegenerate interval."""

    lower: float
    upper: float

    def __post_init__(self):
        if not (np.isfinite(self.lower) and np.isfinite(self.upper)):
            raise ValueError("uniform density bounds must be finite")
        if not self.lower < self.upper:
            raise ValueError("uniform density needs lower < upper")


WeightingMeasure = Union[DiscreteMeasure, UniformDensity]


class MonotoneMap:
    """Nondecreasing map on a closed interval, represented by knots.

    Parameters
    ----------
    domain : (float, float)
        Closed interval ``[a, b]`` with ``a < b`` on which the map is defined.
    knots : array_like of shape (k, 2)
        ``(location, value)`` pairs with strictly increasing locations inside
        the domain.  Values must be nondecreasing; decreases up to ``1e-12``
        are flattened, anything larger is rejected.
    mode : {"step", "linear"}
        ``"step"`` evaluates right-continuously (the value of the last knot
        at or before ``x``, the first knot's value below it); ``"linear"``
        interpolates between knots.  Both extend constantly outside the
        extreme knots.
    """

    __slots__ = ("domain", "xs", "ts", "mode")

    domain: tuple
    xs: np.ndarray
    ts: np.ndarray
    mode: str

    def __init__(self, domain, knots, mode: str = "step"):
        lo, hi = float(domain[0]), float(domain[1])
        if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
            raise ValueError("domain must be a finite interval [a, b] with a < b")
        if mode not in ("step", "linear"):
            raise ValueError(f"unknown interpolation mode {mode!r}")
        arr = np.asarray(knots, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] == 0:
            raise ValueError("knots must be a nonempty sequence of (location, value) pairs")
        xs = np.ascontiguousarray(arr[:, 0])
        ts = np.ascontiguousarray(arr[:, 1])
        if not (np.all(np.isfinite(xs)) and np.all(np.isfinite(ts))):
            raise ValueError("knots must be finite")
        if xs.size > 1 and np.any(xs[1:] <= xs[:-1]):
            raise ValueError("knot locations must be strictly increasing")
        if xs[0] < lo or xs[-1] > hi:
            raise ValueError("knot locations must lie inside the domain")
        if ts.size > 1:
            if np.any(ts[1:] - ts[:-1] < -_VALUE_DECREASE_TOL):
                raise ValueError(
                    f"knot values decrease by more than {_VALUE_DECREASE_TOL}"
                )
            ts = np.maximum.accumulate(ts)
        xs.setflags(write=False)
        ts.setflags(write=False)
        self.domain = (lo, hi)
        self.xs = xs
        self.ts = ts
        self.mode = mode

    @classmethod
    def _from_trusted_arrays(cls, domain, xs: np.ndarray, ts: np.ndarray, mode: str) -> "MonotoneMap":
        # fast path: the caller guarantees finite, strictly increasing
        # locations inside the domain and nondecreasing values
        m = cls.__new__(cls)
        xs.setflags(write=False)
        ts.setflags(write=False)
        m.domain = domain
        m.xs = xs
        m.ts = ts
        m.mode = mode
        return m

    @classmethod
    def identity(cls, domain) -> "MonotoneMap":
        """The identity map on ``domain``."""
        lo, hi = float(domain[0]), float(domain[1])
        return cls((lo, hi), [(lo, lo), (hi, hi)], mode="linear")

    @classmethod
    def constant(cls, domain, value: float) -> "MonotoneMap":
        """The constant map sending every point of ``domain`` to ``value``."""
        lo, hi = float(domain[0]), float(domain[1])
        return cls((lo, hi), [(lo, float(value))], mode="step")

    def _eval_many(self, x: np.ndarray) -> np.ndarray:
        # callers guarantee x lies inside the domain
        if self.mode == "linear":
            return np.interp(x, self.xs, self.ts)
        idx = np.searchsorted(self.xs, x, side="right") - 1
        return self.ts[np.maximum(idx, 0)]

    def to_dict(self) -> dict:
        """Plain-JSON form: ``{"domain": [a, b], "mode": ..., "knots": [[x, t], ...]}``."""
        return {
            "domain": [self.domain[0], self.domain[1]],
            "mode": self.mode,
            "knots": [[float(x), float(t)] for x, t in zip(self.xs, self.ts)],
        }

    @classmethod
    def from_dict(cls, obj) -> "MonotoneMap":
        if not isinstance(obj, dict):
            raise ValueError("map JSON must be an object")
        missing = {"domain", "mode", "knots"} - obj.keys()
        if missing:
            raise ValueError(f"map JSON is missing keys: {sorted(missing)}")
        return cls(obj["domain"], obj["knots"], mode=obj["mode"])

    def __eq__(self, other) -> bool:
        if not isinstance(other, MonotoneMap):
            return NotImplemented
        return (
            self.domain == other.domain
            and self.mode == other.mode
            and np.array_equal(self.xs, other.xs)
            and np.array_equal(self.ts, other.ts)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return (
            f"MonotoneMap(domain={self.domain}, mode={self.mode!r}, "
            f"knots={self.xs.size})"
        )


def map_eval(transport: MonotoneMap, x: float) -> float:
    """Evaluate the map at a point of its domain."""
    lo, hi = transport.domain
    if not lo <= x <= hi:
        raise ValueError(f"{x!r} lies outside the map domain [{lo}, {hi}]")
    return float(transport._eval_many(np.asarray(x, dtype=np.float64)))


def _require_covers(transport: MonotoneMap, lo: float, hi: float) -> None:
    if transport.domain[0] > lo or transport.domain[1] < hi:
        raise ValueError(
            "weighting support exceeds a map domain: "
            f"need [{lo}, {hi}] inside [{transport.domain[0]}, {transport.domain[1]}]"
        )


def l2_distance_sq(t1: MonotoneMap, t2: MonotoneMap, weighting: WeightingMeasure) -> float:
    """Exact integral of ``(t1 - t2)**2`` against the weighting measure.

    For a discrete weighting the sum is accumulated in ascending atom order,
    one addition per atom, so repeated calls are bit-identical.  For a
    uniform weighting the interval is cut at every knot of either map and
    each piece (on which the difference is affine) is integrated exactly by
    two-point Gauss-Legendre quadrature; the result is normalized by the
    interval length to integrate against the density.
    """
    if isinstance(weighting, DiscreteMeasure):
        atoms = weighting.atoms
        _require_covers(t1, atoms[0], atoms[-1])
        _require_covers(t2, atoms[0], atoms[-1])
        diff = t1._eval_many(atoms) - t2._eval_many(atoms)
        contrib = weighting.weights * diff * diff
        return float(np.cumsum(contrib)[-1])
    if isinstance(weighting, UniformDensity):
        lo, hi = weighting.lower, weighting.upper
        _require_covers(t1, lo, hi)
        _require_covers(t2, lo, hi)
        cuts = np.union1d(np.array([lo, hi]), np.concatenate([t1.xs, t2.xs]))
        cuts = cuts[(cuts >= lo) & (cuts <= hi)]
        left, right = cuts[:-1], cuts[1:]
        half = 0.5 * (right - left)
        mid = 0.5 * (right + left)
        offset = (right - left) * _GAUSS_OFFSET
        node_lo = mid - offset
        node_hi = mid + offset
        d_lo = t1._eval_many(node_lo) - t2._eval_many(node_lo)
        d_hi = t1._eval_many(node_hi) - t2._eval_many(node_hi)
        total = float(np.sum(half * (d_lo * d_lo + d_hi * d_hi)))
        return total / (hi - lo)
    raise TypeError("weighting must be a DiscreteMeasure or a UniformDensity")


def clamp_to(transport: MonotoneMap, interval) -> MonotoneMap:
    """Pointwise-nearest map with values restricted to ``interval``.

    Step maps just clip their knot values.  Linear maps first gain a knot
    wherever they cross either clipping level, so clipping knot values
    reproduces the clipped function exactly.  Clamping is idempotent and
    preserves monotonicity.
    """
    lo, hi = float(interval[0]), float(interval[1])
    if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
        raise ValueError("clamp interval must be finite with lower < upper")
    if transport.mode == "linear" and transport.xs.size > 1:
        xs, ts = _with_level_crossings(transport.xs, transport.ts, lo, hi)
    else:
        xs, ts = transport.xs, transport.ts
    knots = np.column_stack((xs, np.clip(ts, lo, hi)))
    return MonotoneMap(transport.domain, knots, mode=transport.mode)


def _with_level_crossings(xs: np.ndarray, ts: np.ndarray, lo: float, hi: float):
    new_x = [float(xs[0])]
    new_t = [float(ts[0])]
    for i in range(xs.size - 1):
        x0, x1 = float(xs[i]), float(xs[i + 1])
        t0, t1 = float(ts[i]), float(ts[i + 1])
        for level in (lo, hi):
            if t0 < level < t1:
                cross = x0 + (level - t0) * (x1 - x0) / (t1 - t0)
                # strict interior only: endpoint crossings already have knots
                if new_x[-1] < cross < x1:
                    new_x.append(cross)
                    new_t.append(level)
        new_x.append(x1)
        new_t.append(t1)
    return np.asarray(new_x), np.asarray(new_t)
