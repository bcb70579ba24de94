"""Shared random generators and independent oracles for the test suite."""

from __future__ import annotations

import numpy as np

from otreg import DiscreteMeasure, MonotoneMap, RegressionDataset


def random_measure(rng, max_atoms=10, lo=0.0, hi=1.0, tie_grid=None):
    """Random canonical measure; optionally snaps atoms to a grid to force ties."""
    n = int(rng.integers(1, max_atoms + 1))
    if tie_grid is not None and rng.random() < 0.5:
        atoms = rng.choice(tie_grid, size=n, replace=True)
    else:
        atoms = rng.uniform(lo, hi, n)
    weights = rng.dirichlet(np.ones(n))
    return DiscreteMeasure(atoms, weights)


def random_monotone_map(rng, domain=(0.0, 1.0), max_knots=8, value_lo=-0.5, value_hi=1.5, mode=None):
    lo, hi = domain
    k = int(rng.integers(1, max_knots + 1))
    xs = np.unique(rng.uniform(lo, hi, k))
    ts = np.sort(rng.uniform(value_lo, value_hi, xs.size))
    if mode is None:
        mode = "step" if rng.random() < 0.5 else "linear"
    return MonotoneMap(domain, np.column_stack((xs, ts)), mode=mode)


def random_dirac_dataset(rng, max_pairs=200, domain=(0.0, 1.0), tie_prob=0.4):
    n = int(rng.integers(2, max_pairs + 1))
    if rng.random() < tie_prob:
        grid = np.linspace(domain[0], domain[1], 7)
        xs = rng.choice(grid, size=n, replace=True)
    else:
        xs = rng.uniform(domain[0], domain[1], n)
    ys = xs + 0.5 * rng.standard_normal(n)
    pairs = [
        (DiscreteMeasure.dirac(x), DiscreteMeasure.dirac(y)) for x, y in zip(xs, ys)
    ]
    return RegressionDataset(pairs, domain)


def random_dataset(rng, max_pairs=50, max_atoms=10, domain=(0.0, 1.0), resp_lo=-1.0, resp_hi=2.0):
    n = int(rng.integers(1, max_pairs + 1))
    tie_grid = np.linspace(domain[0], domain[1], 9)
    pairs = []
    for _ in range(n):
        mu = random_measure(rng, max_atoms, domain[0], domain[1], tie_grid=tie_grid)
        nu = random_measure(rng, max_atoms, resp_lo, resp_hi)
        pairs.append((mu, nu))
    return RegressionDataset(pairs, domain)


def riemann_w2_sq(m1, m2, grid_size):
    """Independent midpoint-Riemann oracle for the squared transport distance."""
    us = (np.arange(grid_size) + 0.5) / grid_size
    q1 = _oracle_quantiles(m1, us)
    q2 = _oracle_quantiles(m2, us)
    return float(np.mean((q1 - q2) ** 2))


def _oracle_quantiles(m, us):
    cum = np.cumsum(np.asarray(m.weights, dtype=np.float64))
    idx = np.searchsorted(cum, us, side="left")
    return np.asarray(m.atoms)[np.minimum(idx, len(m.atoms) - 1)]


def dp_isotonic_cost(y, w):
    """Exact optimal isotonic cost by dynamic programming.

    The optimal nondecreasing fit takes block values that are weighted means
    of consecutive input runs, so restricting levels to that finite grid is
    exact.  Complexity O(n^2) grid construction plus O(n * grid) DP with a
    running prefix minimum.
    """
    y = np.asarray(y, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    n = y.size
    levels = set()
    for i in range(n):
        sw = 0.0
        swy = 0.0
        for j in range(i, n):
            sw += w[j]
            swy += w[j] * y[j]
            levels.add(swy / sw)
    grid = np.array(sorted(levels))
    best = np.minimum.accumulate(w[0] * (y[0] - grid) ** 2)
    for i in range(1, n):
        best = np.minimum.accumulate(best + w[i] * (y[i] - grid) ** 2)
    return float(best[-1])


def eval_map(transport, xs):
    """Vectorized public-convention evaluation used by test oracles."""
    from otreg import map_eval

    return np.array([map_eval(transport, float(x)) for x in np.atleast_1d(xs)])
