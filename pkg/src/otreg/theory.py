"""Computable pieces of the minimax lower-bound argument.

Three ingredients of the information-theoretic lower bound for monotone
transport regression are exposed as plain calculators: the KL divergence
between conditional Gaussian response laws induced by two candidate maps,
randomized staircase packing families of monotone maps on [0, 1] with exact
pairwise distances, and the generalized Fano / KL-covering bound arithmetic
that combines separation, covering, and information terms into a single
lower-bound value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .maps import MonotoneMap, WeightingMeasure, l2_distance_sq

__all__ = [
    "FanoInputs",
    "PackingError",
    "PackingFamily",
    "fano_bound",
    "kl_conditional",
    "packing_family",
    "staircase_map",
]


class PackingError(RuntimeError):
    """Raised when randomized packing selection cannot assemble a family."""


def kl_conditional(
    t1: MonotoneMap, t2: MonotoneMap, sigma: float, p: WeightingMeasure
) -> float:
    """KL divergence between the Gaussian response laws of two maps.

    When the response given a design point ``x`` is normal with mean ``T(x)``
    and standard deviation ``sigma``, the KL divergence between the joint
    (design, response) laws of two maps is the design-averaged pointwise
    Gaussian divergence ``(t1(x) - t2(x))**2 / (2 sigma**2)``; the integral
    against ``p`` is exact.
    """
    if not sigma > 0.0:
        raise ValueError("sigma must be a positive real")
    return l2_distance_sq(t1, t2, p) / (2.0 * sigma * sigma)


def staircase_map(bins: int, step_height: float, bits) -> MonotoneMap:
    """Staircase map on [0, 1]: value ``(j-1)/bins + step_height*bits[j-1]`` on bin j.

    With ``step_height <= 1/bins`` the staircase is nondecreasing for every
    bit pattern and its values stay inside [0, 1].
    """
    bits = np.asarray(bits, dtype=np.float64)
    if bits.ndim != 1 or bits.size != bins:
        raise ValueError(f"bits must be a flat sequence of length {bins}")
    if not np.all((bits == 0.0) | (bits == 1.0)):
        raise ValueError("bits must be 0/1 valued")
    xs = np.arange(bins, dtype=np.float64) / bins
    ts = xs + step_height * bits
    return MonotoneMap((0.0, 1.0), np.column_stack((xs, ts)), mode="step")


@dataclass(frozen=True, eq=False)
class PackingFamily:
    """A separated family of staircase maps with exact distance bookkeeping.

    ``min_pairwise_dist`` is the exact minimum over map pairs of the L2
    distance under the uniform density on [0, 1]; for the staircase
    construction it equals ``step_height * sqrt(min_hamming / bins)``.
    """

    maps: Tuple[MonotoneMap, ...]
    bins: int
    step_height: float
    codewords: np.ndarray = field(repr=False)
    min_hamming: int
    min_pairwise_dist: float
    log_cardinality: float
    seed: int

    def __len__(self) -> int:
        return len(self.maps)

    def to_dict(self) -> dict:
        return {
            "summary": {
                "bins": self.bins,
                "step_height": self.step_height,
                "size": len(self.maps),
                "min_hamming": self.min_hamming,
                "min_pairwise_dist": self.min_pairwise_dist,
                "log_cardinality": self.log_cardinality,
                "seed": self.seed,
            },
            "maps": [m.to_dict() for m in self.maps],
        }


def packing_family(
    bins: int,
    step_height: float,
    target_hamming_frac: float = 0.25,
    *,
    seed: int,
    max_size: Optional[int] = None,
    max_rejects: int = 500,
) -> PackingFamily:
    """Greedy randomized packing of staircase maps with guaranteed separation.

    Binary codewords of length ``bins`` are drawn uniformly at random and a
    candidate is kept only if its Hamming distance to every accepted codeword
    is at least ``ceil(target_hamming_frac * bins)``.  Selection stops after
    ``max_rejects`` consecutive rejections (or at ``max_size`` members).
    Pairwise map distances under the uniform density satisfy
    ``dist**2 == step_height**2 * hamming / bins`` exactly, so the minimum
    pairwise distance and the log cardinality are reported exactly.

    Raises
    ------
    ValueError
        If ``step_height`` exceeds ``1/bins`` (the staircase would not be
        monotone) or the parameters are otherwise out of range.
    PackingError
        If fewer than two members are found within the rejection budget.
    """
    if bins < 1:
        raise ValueError("bins must be a positive integer")
    if not 0.0 < step_height <= 1.0 / bins:
        raise ValueError(
            f"step height must lie in (0, 1/bins]; got {step_height!r} with bins={bins}"
        )
    if not 0.0 < target_hamming_frac <= 0.5:
        raise ValueError("target_hamming_frac must lie in (0, 1/2]")
    if max_size is not None and max_size < 2:
        raise ValueError("max_size must be at least 2")
    if max_rejects < 1:
        raise ValueError("max_rejects must be a positive integer")
    min_hamming_required = math.ceil(target_hamming_frac * bins)
    rng = np.random.default_rng(seed)
    accepted = np.empty((16, bins), dtype=np.uint8)
    count = 0
    rejects = 0
    while rejects < max_rejects and (max_size is None or count < max_size):
        candidate = rng.integers(0, 2, size=bins, dtype=np.uint8)
        if count > 0:
            dists = np.count_nonzero(accepted[:count] != candidate, axis=1)
            if int(dists.min()) < min_hamming_required:
                rejects += 1
                continue
        if count == accepted.shape[0]:
            accepted = np.concatenate([accepted, np.empty_like(accepted)])
        accepted[count] = candidate
        count += 1
        rejects = 0
    if count < 2:
        raise PackingError(
            "could not assemble a packing family: "
            f"bins={bins}, required pairwise Hamming >= {min_hamming_required}, "
            f"{max_rejects} consecutive candidates rejected with {count} member(s)"
        )
    codewords = accepted[:count].copy()
    diffs = codewords[:, None, :] != codewords[None, :, :]
    hammings = diffs.sum(axis=2)
    min_hamming = int(hammings[np.triu_indices(count, k=1)].min())
    maps = tuple(staircase_map(bins, step_height, row) for row in codewords)
    codewords.setflags(write=False)
    return PackingFamily(
        maps=maps,
        bins=bins,
        step_height=step_height,
        codewords=codewords,
        min_hamming=min_hamming,
        min_pairwise_dist=step_height * math.sqrt(min_hamming / bins),
        log_cardinality=math.log(count),
        seed=seed,
    )


@dataclass(frozen=True)
class FanoInputs:
    """Scales and constants entering the lower-bound arithmetic.

    ``delta`` is the packing separation scale, ``epsilon`` the KL-covering
    scale.  ``bracketing_constant`` scales the covering entropy
    ``bracketing_constant / epsilon`` of the monotone class, and
    ``packing_constant`` scales its packing entropy
    ``packing_constant / delta``.  ``kl_multiplier`` scales the squared
    covering radius in the information term; set it to the sample size to
    model the KL divergence of product laws over that many observations.
    """

    delta: float
    epsilon: float
    bracketing_constant: float
    packing_constant: float
    kl_multiplier: float = 1.0

    def __post_init__(self):
        for name in ("delta", "epsilon", "bracketing_constant", "packing_constant", "kl_multiplier"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be a positive finite real")


def fano_bound(inp: FanoInputs) -> float:
    """Generalized Fano lower bound at separation ``delta``.

    Returns ``(delta/2) * (1 - info / entropy)`` where the information term
    ``info = bracketing_constant/epsilon + kl_multiplier*epsilon**2 + ln 2``
    bounds the mutual information (KL-covering argument) plus the binary
    slack, and ``entropy = packing_constant/delta`` is the log cardinality of
    the packing.  The value may be negative, meaning the bound is vacuous at
    these scales; it is returned as-is.
    """
    info = (
        inp.bracketing_constant / inp.epsilon
        + inp.kl_multiplier * inp.epsilon * inp.epsilon
        + math.log(2.0)
    )
    entropy = inp.packing_constant / inp.delta
    return 0.5 * inp.delta * (1.0 - info / entropy)
