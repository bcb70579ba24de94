"""Discrete one-dimensional probability measures with exact transport algebra.

Measures are kept in canonical form (strictly increasing atoms, positive
weights summing to one).  On the real line the squared 2-Wasserstein distance
is the L2 distance between quantile functions, and for finitely supported
measures both quantile functions are piecewise constant in the mass
coordinate, so every integral below is evaluated segment-exactly: there is no
quadrature error anywhere in this module.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Sequence

import numpy as np

if TYPE_CHECKING:
    from .maps import MonotoneMap

__all__ = [
    "DiscreteMeasure",
    "average_measure",
    "cdf_eval",
    "pushforward",
    "quantile_eval",
    "wasserstein2_sq",
]

_MASS_TOL = 1e-9

_UNIT_WEIGHT = np.array([1.0])
_UNIT_WEIGHT.setflags(write=False)


class DiscreteMeasure:
    """Finitely supported probability measure on the real line.

    Parameters
    ----------
    atoms : array_like
        Support points, in any order.  Exact duplicates are merged.
    weights : array_like
        Point masses, one per atom.  Zero weights are dropped, the remaining
        ones must be positive and sum to one within ``1e-9``; after that
        check the vector is renormalized to machine precision.

    Notes
    -----
    Instances are immutable: the stored arrays are marked read-only and the
    class exposes no mutating operations.  ``cum_weights`` holds the running
    weight totals with the final entry pinned to exactly ``1.0`` so quantile
    lookups at mass level one never fall off the end of the support.
    """

    __slots__ = ("atoms", "weights", "cum_weights")

    atoms: np.ndarray
    weights: np.ndarray
    cum_weights: np.ndarray

    def __init__(self, atoms, weights):
        atoms = np.asarray(atoms, dtype=np.float64)
        weights = np.asarray(weights, dtype=np.float64)
        if atoms.ndim != 1 or weights.ndim != 1 or atoms.shape != weights.shape:
            raise ValueError("atoms and weights must be 1-d sequences of equal length")
        if atoms.size == 0:
            raise ValueError("a probability measure needs at least one atom")
        if not np.all(np.isfinite(atoms)) or not np.all(np.isfinite(weights)):
            raise ValueError("atoms and weights must all be finite")
        if np.any(weights < 0.0):
            raise ValueError("weights must be nonnegative")
        keep = weights > 0.0
        if not keep.all():
            atoms, weights = atoms[keep], weights[keep]
            if atoms.size == 0:
                raise ValueError("at least one weight must be positive")
        total = float(weights.sum())
        if abs(total - 1.0) > _MASS_TOL:
            raise ValueError(
                f"weights sum to {total!r}; expected 1 within {_MASS_TOL}"
            )
        if total != 1.0:
            weights = weights / total
        order = np.argsort(atoms, kind="stable")
        atoms, weights = atoms[order], weights[order]
        if atoms.size > 1 and np.any(atoms[1:] == atoms[:-1]):
            uniq, inverse = np.unique(atoms, return_inverse=True)
            weights = np.bincount(inverse, weights=weights, minlength=uniq.size)
            atoms = uniq
        self._finalize(atoms, weights)

    def _finalize(self, atoms: np.ndarray, weights: np.ndarray) -> None:
        cum = np.cumsum(weights)
        cum[-1] = 1.0
        atoms.setflags(write=False)
        weights.setflags(write=False)
        cum.setflags(write=False)
        self.atoms = atoms
        self.weights = weights
        self.cum_weights = cum

    @classmethod
    def _from_canonical(cls, atoms: np.ndarray, weights: np.ndarray) -> "DiscreteMeasure":
        # trusted path: atoms strictly increasing, weights positive, mass one
        m = cls.__new__(cls)
        m._finalize(atoms, weights)
        return m

    @classmethod
    def dirac(cls, x: float) -> "DiscreteMeasure":
        """Unit point mass at ``x``."""
        x = float(x)
        if not np.isfinite(x):
            raise ValueError("dirac location must be finite")
        m = cls.__new__(cls)
        atoms = np.array([x])
        atoms.setflags(write=False)
        m.atoms = atoms
        m.weights = _UNIT_WEIGHT
        m.cum_weights = _UNIT_WEIGHT
        return m

    def to_dict(self) -> dict:
        """Plain-JSON form: ``{"atoms": [...], "weights": [...]}``."""
        return {
            "atoms": [float(a) for a in self.atoms],
            "weights": [float(w) for w in self.weights],
        }

    @classmethod
    def from_dict(cls, obj) -> "DiscreteMeasure":
        if not isinstance(obj, dict) or "atoms" not in obj or "weights" not in obj:
            raise ValueError("measure JSON must be an object with 'atoms' and 'weights'")
        return cls(obj["atoms"], obj["weights"])

    def __len__(self) -> int:
        return self.atoms.size

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiscreteMeasure):
            return NotImplemented
        return np.array_equal(self.atoms, other.atoms) and np.array_equal(
            self.weights, other.weights
        )

    __hash__ = None  # value-mutable semantics are not worth a hash contract

    def __repr__(self) -> str:
        if self.atoms.size <= 4:
            return f"DiscreteMeasure({self.atoms.tolist()}, {self.weights.tolist()})"
        return f"DiscreteMeasure(<{self.atoms.size} atoms on [{self.atoms[0]}, {self.atoms[-1]}]>)"


def cdf_eval(m: DiscreteMeasure, x: float) -> float:
    """Right-continuous distribution function: mass at or below ``x``."""
    idx = int(np.searchsorted(m.atoms, x, side="right"))
    if idx == 0:
        return 0.0
    return float(m.cum_weights[idx - 1])


def quantile_eval(m: DiscreteMeasure, u: float) -> float:
    """Left-continuous quantile ``inf {x : F(x) >= u}`` for ``u`` in (0, 1]."""
    if not 0.0 < u <= 1.0:
        raise ValueError(f"quantile level must lie in (0, 1], got {u!r}")
    idx = int(np.searchsorted(m.cum_weights, u, side="left"))
    if idx >= m.atoms.size:
        idx = m.atoms.size - 1
    return float(m.atoms[idx])


def _quantiles_at(m: DiscreteMeasure, levels: np.ndarray) -> np.ndarray:
    # levels assumed within (0, 1]; the pinned final cumulative weight keeps
    # searchsorted indices in range
    return m.atoms[np.searchsorted(m.cum_weights, levels, side="left")]


def pushforward(m: DiscreteMeasure, transport: "MonotoneMap") -> DiscreteMeasure:
    """Law of ``T(X)`` for ``X ~ m``: atoms are mapped, equal images merge.

    Requires the support of ``m`` to lie inside the domain of ``transport``.
    Because the map is nondecreasing and atoms are stored increasing, the
    mapped atoms are nondecreasing and only adjacent ones can collide.
    """
    lo, hi = transport.domain
    atoms = m.atoms
    if atoms[0] < lo or atoms[-1] > hi:
        raise ValueError("measure support exceeds the transport map's domain")
    vals = transport._eval_many(atoms)
    if vals.size == 1:
        out = DiscreteMeasure.__new__(DiscreteMeasure)
        vals.setflags(write=False)
        out.atoms = vals
        out.weights = _UNIT_WEIGHT
        out.cum_weights = _UNIT_WEIGHT
        return out
    weights = m.weights
    if np.any(vals[1:] == vals[:-1]):
        starts = np.flatnonzero(np.r_[True, vals[1:] != vals[:-1]])
        vals = vals[starts]
        weights = np.add.reduceat(weights, starts)
    else:
        vals = vals.copy()
        weights = weights.copy()
    return DiscreteMeasure._from_canonical(vals, weights)


def wasserstein2_sq(m1: DiscreteMeasure, m2: DiscreteMeasure) -> float:
    """Exact squared 2-Wasserstein distance between two discrete measures.

    The mass axis is cut at the union of both cumulative-weight breakpoints;
    on every segment both quantile functions are constant, so the integral
    of the squared quantile difference is a finite weighted sum.
    """
    edges = np.union1d(m1.cum_weights, m2.cum_weights)
    lens = np.diff(edges, prepend=0.0)
    diff = _quantiles_at(m1, edges) - _quantiles_at(m2, edges)
    return float(np.sum(lens * diff * diff))


def average_measure(measures: Sequence[DiscreteMeasure]) -> DiscreteMeasure:
    """Equal-weight mixture: each input contributes mass ``1/len(measures)``."""
    n = len(measures)
    if n == 0:
        raise ValueError("average of an empty collection of measures is undefined")
    atoms = np.concatenate([m.atoms for m in measures])
    weights = np.concatenate([m.weights for m in measures]) / n
    return DiscreteMeasure(atoms, weights)
