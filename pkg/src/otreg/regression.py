"""Least-squares regression of response measures on covariate measures.

The model transports each covariate measure through one unknown nondecreasing
map, and the fit minimizes half the average squared 2-Wasserstein distance
between transported covariates and observed responses.

For finitely supported data this objective is exactly a weighted isotonic
regression plus a constant that does not depend on the map.  Cut the mass
axis of pair ``i`` at the union of both cumulative-weight breakpoints: on
each piece the transported quantile function is the map value at a single
covariate atom, so integrating the squared difference against the response
quantile contributes ``length * (T(a) - q)**2``.  Summing the pieces that
share a covariate atom ``a`` and completing the square gives a weighted
square ``w * (T(a) - ybar)**2`` (weight = total mass facing ``a``, target =
mass-weighted mean response quantile) plus the within-atom variance of the
response quantile, which no map can change.  Pooling exact atom ties across
pairs folds a further between-pair dispersion term into that constant.  The
minimizer over nondecreasing maps is then pool-adjacent-violators on the
pooled points, read as a right-continuous step map.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Tuple

import numpy as np

from .isotonic import WeightedPoint, _merge_ties_arrays, _pava_arrays
from .maps import MonotoneMap, WeightingMeasure, clamp_to, l2_distance_sq
from .measures import DiscreteMeasure, pushforward, wasserstein2_sq

__all__ = [
    "PooledProblem",
    "RegressionDataset",
    "dataset_from_dict",
    "dataset_to_dict",
    "fit",
    "objective",
    "pool",
    "risk",
]


class RegressionDataset:
    """Pairs of (covariate, response) measures over a fixed covariate domain.

    Covariate supports must lie inside ``domain``; responses may live
    anywhere on the line.
    """

    __slots__ = ("pairs", "domain")

    pairs: Tuple[Tuple[DiscreteMeasure, DiscreteMeasure], ...]
    domain: tuple

    def __init__(self, pairs: Iterable, domain):
        lo, hi = float(domain[0]), float(domain[1])
        if not (np.isfinite(lo) and np.isfinite(hi) and lo < hi):
            raise ValueError("domain must be a finite interval [a, b] with a < b")
        pairs = tuple(tuple(p) for p in pairs)
        if not pairs:
            raise ValueError("a regression dataset needs at least one pair")
        for pair in pairs:
            if len(pair) != 2 or not all(isinstance(m, DiscreteMeasure) for m in pair):
                raise ValueError("each pair must be (covariate, response) DiscreteMeasures")
            mu = pair[0]
            if mu.atoms[0] < lo or mu.atoms[-1] > hi:
                raise ValueError("covariate support must lie inside the domain")
        self.pairs = pairs
        self.domain = (lo, hi)

    def __len__(self) -> int:
        return len(self.pairs)

    def __repr__(self) -> str:
        return f"RegressionDataset({len(self.pairs)} pairs on {self.domain})"


@dataclass(frozen=True)
class PooledProblem:
    """Weighted isotonic points plus the map-independent objective constant."""

    points: Tuple[WeightedPoint, ...]
    constant: float

    def __post_init__(self):
        if not self.points:
            raise ValueError("a pooled problem needs at least one point")
        xs = [p.x for p in self.points]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("pooled locations must be strictly increasing")
        if not np.isfinite(self.constant) or self.constant < 0.0:
            raise ValueError("the pooled constant must be finite and nonnegative")


def _pool_arrays(data: RegressionDataset):
    """Pooled locations, targets, weights (one unit per pair), and constant."""
    x_list: list = []
    y_list: list = []
    w_list: list = []
    constant = 0.0
    for mu, nu in data.pairs:
        cu = mu.cum_weights
        cv = nu.cum_weights
        if cu.size == 1:
            # Dirac covariate: the whole response quantile faces one atom
            if cv.size == 1:
                x_list.append(mu.atoms[0])
                y_list.append(nu.atoms[0])
                w_list.append(1.0)
                continue
            lens = np.diff(cv, prepend=0.0)
            mean = float(np.sum(lens * nu.atoms))
            second = float(np.sum(lens * nu.atoms * nu.atoms))
            constant += max(0.0, second - mean * mean)  # total mass is one
            x_list.append(mu.atoms[0])
            y_list.append(mean)
            w_list.append(1.0)
            continue
        edges = np.union1d(cu, cv)
        lens = np.diff(edges, prepend=0.0)
        atom_idx = np.searchsorted(cu, edges, side="left")
        resp = nu.atoms[np.searchsorted(cv, edges, side="left")]
        lens_resp = lens * resp
        starts = np.flatnonzero(np.r_[True, atom_idx[1:] != atom_idx[:-1]])
        sl = np.add.reduceat(lens, starts)
        slb = np.add.reduceat(lens_resp, starts)
        slb2 = np.add.reduceat(lens_resp * resp, starts)
        ybar = slb / sl
        constant += float(np.sum(np.maximum(slb2 - ybar * slb, 0.0)))
        x_list.extend(mu.atoms[atom_idx[starts]].tolist())
        y_list.extend(ybar.tolist())
        w_list.extend(sl.tolist())
    x = np.asarray(x_list, dtype=np.float64)
    y = np.asarray(y_list, dtype=np.float64)
    w = np.asarray(w_list, dtype=np.float64)
    raw_wy2 = float(np.sum(w * y * y))
    xm, ym, wm = _merge_ties_arrays(x, y, w)
    if xm.size != x.size:
        merged_wy2 = float(np.sum(wm * ym * ym))
        constant += max(0.0, raw_wy2 - merged_wy2)
    return xm, ym, wm, constant


def pool(data: RegressionDataset) -> PooledProblem:
    """Reduce the dataset to weighted isotonic points plus a constant.

    For any nondecreasing map ``T`` defined on the covariate domain, the sum
    over pairs of squared transport distances satisfies::

        sum_i d2(T # mu_i, nu_i) == sum(p.w * (T(p.x) - p.y) ** 2) + constant

    (each pair contributes total weight one), so minimizing the regression
    objective is exactly weighted isotonic regression on the returned points.
    """
    xm, ym, wm, constant = _pool_arrays(data)
    points = tuple(
        WeightedPoint(float(a), float(b), float(c)) for a, b, c in zip(xm, ym, wm)
    )
    return PooledProblem(points=points, constant=constant)


def objective(transport: MonotoneMap, data: RegressionDataset) -> float:
    """Half the average squared transport distance from fitted to observed responses."""
    total = 0.0
    for mu, nu in data.pairs:
        total += wasserstein2_sq(pushforward(mu, transport), nu)
    return total / (2.0 * len(data.pairs))


def fit(data: RegressionDataset, clamp: bool = True) -> MonotoneMap:
    """Exact objective minimizer over nondecreasing maps, as a step map.

    The fitted map is right-continuous with knots at the pooled covariate
    atoms.  With ``clamp=True`` (default) values are clipped to the covariate
    domain, which is again exact: clipping commutes with pooling adjacent
    violators under box constraints.
    """
    xm, ym, wm, _ = _pool_arrays(data)
    fitted = _pava_arrays(ym, wm)
    transport = MonotoneMap(data.domain, np.column_stack((xm, fitted)), mode="step")
    if clamp:
        transport = clamp_to(transport, data.domain)
    return transport


def risk(estimate: MonotoneMap, truth: MonotoneMap, weighting: WeightingMeasure) -> float:
    """Squared L2 error of the estimated map against the truth."""
    return l2_distance_sq(estimate, truth, weighting)


def dataset_to_dict(data: RegressionDataset) -> dict:
    """Plain-JSON form with explicit measures for every pair."""
    return {
        "domain": [data.domain[0], data.domain[1]],
        "pairs": [
            {"mu": mu.to_dict(), "nu": nu.to_dict()} for mu, nu in data.pairs
        ],
    }


def dataset_from_dict(obj) -> RegressionDataset:
    """Read a dataset; pairs may be measures or a Dirac ``{"x": ..., "y": ...}``."""
    if not isinstance(obj, dict) or "domain" not in obj or "pairs" not in obj:
        raise ValueError("dataset JSON must be an object with 'domain' and 'pairs'")
    pairs = []
    for entry in obj["pairs"]:
        if not isinstance(entry, dict):
            raise ValueError("each pair must be a JSON object")
        if "x" in entry or "y" in entry:
            if entry.keys() - {"x", "y"} or "x" not in entry or "y" not in entry:
                raise ValueError("a Dirac pair must have exactly the keys 'x' and 'y'")
            pairs.append(
                (DiscreteMeasure.dirac(entry["x"]), DiscreteMeasure.dirac(entry["y"]))
            )
        elif "mu" in entry and "nu" in entry:
            pairs.append(
                (DiscreteMeasure.from_dict(entry["mu"]), DiscreteMeasure.from_dict(entry["nu"]))
            )
        else:
            raise ValueError("each pair needs either 'mu'/'nu' measures or 'x'/'y' points")
    return RegressionDataset(pairs, obj["domain"])
