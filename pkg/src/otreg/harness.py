"""Synthetic data generation and seeded Monte Carlo rate experiments.

A scenario draws covariate measures from a configurable design, transports
them through a configured true map, perturbs each result with an independent
mean-identity noise map, and hands the pairs to the estimator.  The rate
harness repeats this over a grid of sample sizes with deterministic
per-replicate seeds, aggregates mean squared risks, and fits a log-log slope
so the decay exponent can be read off directly.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from .maps import MonotoneMap, UniformDensity
from .measures import DiscreteMeasure, average_measure, pushforward
from .regression import RegressionDataset, fit, risk

__all__ = [
    "DesignConfig",
    "NoiseConfig",
    "RateConfig",
    "RateRow",
    "RateTable",
    "ScenarioConfig",
    "TrueMapConfig",
    "build_true_map",
    "derive_replicate_seed",
    "loglog_slope",
    "rate_experiment",
    "sample_noise_map",
    "simulate_dataset",
    "simulate_with_noise",
    "write_rate_csv",
]

_SEED_MASK = (1 << 64) - 1


def _check_keys(obj: dict, allowed: set, what: str) -> None:
    unknown = obj.keys() - allowed
    if unknown:
        raise ValueError(f"unknown {what} keys: {sorted(unknown)}")


@dataclass(frozen=True)
class DesignConfig:
    """How covariate measures are drawn.

    ``kind="dirac"`` draws point masses at locations sampled from the design
    density (``"uniform"`` over the domain or a scaled ``"beta"``).
    ``kind="general"`` draws measures with ``atom_count`` atoms at density
    locations, weighted uniformly or by a flat Dirichlet draw.
    """

    kind: str = "dirac"
    density: str = "uniform"
    alpha: float = 2.0
    beta: float = 2.0
    atom_count: int = 1
    weight_scheme: str = "uniform"

    def __post_init__(self):
        if self.kind not in ("dirac", "general"):
            raise ValueError(f"unknown design kind {self.kind!r}")
        if self.density not in ("uniform", "beta"):
            raise ValueError(f"unknown design density {self.density!r}")
        if self.density == "beta" and not (self.alpha > 0.0 and self.beta > 0.0):
            raise ValueError("beta density needs positive shape parameters")
        if self.atom_count < 1:
            raise ValueError("atom_count must be at least 1")
        if self.weight_scheme not in ("uniform", "dirichlet"):
            raise ValueError(f"unknown weight scheme {self.weight_scheme!r}")

    @classmethod
    def from_dict(cls, obj) -> "DesignConfig":
        if not isinstance(obj, dict):
            raise ValueError("design config must be a JSON object")
        _check_keys(obj, {"kind", "density", "alpha", "beta", "atom_count", "weight_scheme"}, "design")
        return cls(**obj)


@dataclass(frozen=True)
class TrueMapConfig:
    """Named family of true transport maps on the scenario domain."""

    family: str = "identity"
    gamma: float = 1.0
    knots: Optional[Tuple[Tuple[float, float], ...]] = None
    bins: int = 8

    def __post_init__(self):
        if self.family not in ("identity", "power", "piecewise_linear", "staircase"):
            raise ValueError(f"unknown true-map family {self.family!r}")
        if self.family == "power" and not self.gamma > 0.0:
            raise ValueError("power maps need gamma > 0")
        if self.family == "piecewise_linear" and not self.knots:
            raise ValueError("piecewise_linear maps need knots")
        if self.family == "staircase" and self.bins < 1:
            raise ValueError("staircase maps need at least one bin")

    @classmethod
    def from_dict(cls, obj) -> "TrueMapConfig":
        if not isinstance(obj, dict):
            raise ValueError("true_map config must be a JSON object")
        _check_keys(obj, {"family", "gamma", "knots", "bins"}, "true_map")
        obj = dict(obj)
        if obj.get("knots") is not None:
            obj["knots"] = tuple((float(x), float(t)) for x, t in obj["knots"])
        return cls(**obj)


@dataclass(frozen=True)
class NoiseConfig:
    """Mean-identity random perturbation applied to each transported measure.

    ``"gaussian_shift"`` adds one centered normal offset per pair.
    ``"affine"`` applies ``x -> A x + B`` with ``A`` uniform on
    ``[1 - slope_halfwidth, 1 + slope_halfwidth]`` and ``B`` centered normal
    with scale ``intercept_sigma``.  Both families keep the pointwise mean at
    the identity and every draw is a nondecreasing map.
    """

    family: str = "gaussian_shift"
    sigma: float = 0.1
    slope_halfwidth: float = 0.0
    intercept_sigma: float = 0.0

    def __post_init__(self):
        if self.family not in ("gaussian_shift", "affine"):
            raise ValueError(f"unknown noise family {self.family!r}")
        if self.sigma < 0.0:
            raise ValueError("sigma must be nonnegative")
        if not 0.0 <= self.slope_halfwidth <= 1.0:
            raise ValueError("slope_halfwidth must lie in [0, 1]")
        if self.intercept_sigma < 0.0:
            raise ValueError("intercept_sigma must be nonnegative")

    @classmethod
    def from_dict(cls, obj) -> "NoiseConfig":
        if not isinstance(obj, dict):
            raise ValueError("noise config must be a JSON object")
        _check_keys(obj, {"family", "sigma", "slope_halfwidth", "intercept_sigma"}, "noise")
        return cls(**obj)


@dataclass(frozen=True)
class ScenarioConfig:
    """One fully specified simulation: domain, design, truth, noise, size, seed."""

    domain: Tuple[float, float] = (0.0, 1.0)
    design: DesignConfig = field(default_factory=DesignConfig)
    true_map: TrueMapConfig = field(default_factory=TrueMapConfig)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    N: int = 100
    seed: int = 0

    def __post_init__(self):
        lo, hi = float(self.domain[0]), float(self.domain[1])
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise ValueError("domain must be a finite interval [a, b] with a < b")
        object.__setattr__(self, "domain", (lo, hi))
        if self.N < 1:
            raise ValueError("N must be at least 1")

    @classmethod
    def from_dict(cls, obj) -> "ScenarioConfig":
        if not isinstance(obj, dict):
            raise ValueError("scenario config must be a JSON object")
        _check_keys(obj, {"domain", "design", "true_map", "noise", "N", "seed"}, "scenario")
        return cls(
            domain=tuple(obj.get("domain", (0.0, 1.0))),
            design=DesignConfig.from_dict(obj.get("design", {})),
            true_map=TrueMapConfig.from_dict(obj.get("true_map", {})),
            noise=NoiseConfig.from_dict(obj.get("noise", {})),
            N=int(obj.get("N", 100)),
            seed=int(obj.get("seed", 0)),
        )


@dataclass(frozen=True)
class RateConfig:
    """Scenario shared across a strictly increasing grid of sample sizes."""

    domain: Tuple[float, float] = (0.0, 1.0)
    design: DesignConfig = field(default_factory=DesignConfig)
    true_map: TrueMapConfig = field(default_factory=TrueMapConfig)
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    N: Tuple[int, ...] = (64, 128, 256)
    replicates: int = 50
    seed: int = 0
    weighting: str = "empirical"

    def __post_init__(self):
        lo, hi = float(self.domain[0]), float(self.domain[1])
        if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
            raise ValueError("domain must be a finite interval [a, b] with a < b")
        object.__setattr__(self, "domain", (lo, hi))
        grid = tuple(int(n) for n in self.N)
        if not grid or any(n < 1 for n in grid):
            raise ValueError("the sample-size grid must contain positive integers")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("the sample-size grid must be strictly increasing")
        object.__setattr__(self, "N", grid)
        if self.replicates < 2:
            raise ValueError("replicates must be at least 2")
        if self.weighting not in ("empirical", "uniform"):
            raise ValueError(f"unknown risk weighting {self.weighting!r}")

    @classmethod
    def from_dict(cls, obj) -> "RateConfig":
        if not isinstance(obj, dict):
            raise ValueError("rate config must be a JSON object")
        _check_keys(
            obj,
            {"domain", "design", "true_map", "noise", "N", "replicates", "seed", "weighting"},
            "rate",
        )
        return cls(
            domain=tuple(obj.get("domain", (0.0, 1.0))),
            design=DesignConfig.from_dict(obj.get("design", {})),
            true_map=TrueMapConfig.from_dict(obj.get("true_map", {})),
            noise=NoiseConfig.from_dict(obj.get("noise", {})),
            N=tuple(obj.get("N", (64, 128, 256))),
            replicates=int(obj.get("replicates", 50)),
            seed=int(obj.get("seed", 0)),
            weighting=obj.get("weighting", "empirical"),
        )


_POWER_GRID_SIZE = 1025


def build_true_map(cfg: TrueMapConfig, domain) -> MonotoneMap:
    """Materialize a configured true map on ``domain``.

    Power maps are represented by a dense piecewise-linear interpolant
    (1025 knots), which keeps every consumer on one map representation; the
    interpolation gap is quadratic in the grid spacing and far below the
    noise scales used anywhere in the harness.
    """
    lo, hi = float(domain[0]), float(domain[1])
    if cfg.family == "identity":
        return MonotoneMap.identity((lo, hi))
    if cfg.family == "power":
        grid = np.linspace(lo, hi, _POWER_GRID_SIZE)
        rel = (grid - lo) / (hi - lo)
        vals = lo + (hi - lo) * rel**cfg.gamma
        return MonotoneMap((lo, hi), np.column_stack((grid, vals)), mode="linear")
    if cfg.family == "piecewise_linear":
        return MonotoneMap((lo, hi), np.asarray(cfg.knots, dtype=np.float64), mode="linear")
    if cfg.family == "staircase":
        xs = lo + (hi - lo) * np.arange(cfg.bins) / cfg.bins
        return MonotoneMap((lo, hi), np.column_stack((xs, xs)), mode="step")
    raise ValueError(f"unknown true-map family {cfg.family!r}")


def sample_noise_map(noise: NoiseConfig, rng: np.random.Generator, domain=(0.0, 1.0)) -> MonotoneMap:
    """Draw one random mean-identity nondecreasing map on ``domain``.

    Consumes exactly one normal draw for ``"gaussian_shift"`` and one uniform
    plus one normal draw for ``"affine"``, regardless of parameter values, so
    seeded streams stay aligned across configurations.
    """
    lo, hi = float(domain[0]), float(domain[1])
    if noise.family == "gaussian_shift":
        shift = noise.sigma * rng.standard_normal()
        values = np.array([lo + shift, hi + shift])
    elif noise.family == "affine":
        slope = rng.uniform(1.0 - noise.slope_halfwidth, 1.0 + noise.slope_halfwidth)
        intercept = noise.intercept_sigma * rng.standard_normal()
        values = np.array([slope * lo + intercept, slope * hi + intercept])
    else:
        raise ValueError(f"unknown noise family {noise.family!r}")
    # both families have nonnegative slope, so the knot values are already
    # nondecreasing and the validated constructor can be bypassed
    return MonotoneMap._from_trusted_arrays(
        (lo, hi), np.array([lo, hi]), values, "linear"
    )


def _draw_design(design: DesignConfig, rng: np.random.Generator, domain, count: int):
    lo, hi = domain
    if design.kind == "dirac":
        locs = _draw_locations(design, rng, lo, hi, count)
        return [DiscreteMeasure.dirac(x) for x in locs]
    measures = []
    for _ in range(count):
        atoms = _draw_locations(design, rng, lo, hi, design.atom_count)
        if design.weight_scheme == "dirichlet":
            weights = rng.dirichlet(np.ones(design.atom_count))
        else:
            weights = np.full(design.atom_count, 1.0 / design.atom_count)
        measures.append(DiscreteMeasure(atoms, weights))
    return measures


def _draw_locations(design: DesignConfig, rng: np.random.Generator, lo, hi, count: int):
    if design.density == "uniform":
        return rng.uniform(lo, hi, count)
    return lo + (hi - lo) * rng.beta(design.alpha, design.beta, count)


def simulate_with_noise(cfg: ScenarioConfig):
    """Simulate a dataset and also return the per-pair noise maps.

    The seeded stream is consumed in two fixed phases: first all design
    draws (pair by pair), then one noise map per pair.  Responses are built
    as the noise pushforward of the true-map pushforward of each covariate,
    so reapplying the returned noise maps reproduces the dataset exactly.
    """
    rng = np.random.default_rng(cfg.seed)
    covariates = _draw_design(cfg.design, rng, cfg.domain, cfg.N)
    noise_maps = tuple(sample_noise_map(cfg.noise, rng, cfg.domain) for _ in range(cfg.N))
    truth = build_true_map(cfg.true_map, cfg.domain)
    pairs = []
    for mu, eps in zip(covariates, noise_maps):
        pairs.append((mu, pushforward(pushforward(mu, truth), eps)))
    return RegressionDataset(pairs, cfg.domain), noise_maps


def simulate_dataset(cfg: ScenarioConfig) -> RegressionDataset:
    """Draw one dataset from the scenario; fully determined by ``cfg.seed``."""
    return simulate_with_noise(cfg)[0]


def _splitmix64(state: int) -> int:
    state = (state + 0x9E3779B97F4A7C15) & _SEED_MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _SEED_MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _SEED_MASK
    return z ^ (z >> 31)


def derive_replicate_seed(master_seed: int, sample_size: int, replicate: int) -> int:
    """Fixed 64-bit mixing of (master seed, sample size, replicate index).

    Deterministic and scheduling-independent, so any degree of parallelism
    reproduces the same per-replicate streams.
    """
    acc = _splitmix64(master_seed & _SEED_MASK)
    acc = _splitmix64(acc ^ (sample_size & _SEED_MASK))
    acc = _splitmix64(acc ^ (replicate & _SEED_MASK))
    return acc


def loglog_slope(points: Sequence) -> Tuple[float, float, float]:
    """Ordinary least squares of ``ln(risk)`` on ``ln(N)``.

    Returns ``(slope, intercept, stderr)`` where ``stderr`` is the usual
    residual-based standard error of the slope with ``n - 2`` degrees of
    freedom.  Needs at least three points with positive coordinates and at
    least two distinct sample sizes.
    """
    arr = np.asarray([(float(n), float(r)) for n, r in points], dtype=np.float64)
    if arr.shape[0] < 3:
        raise ValueError("slope fitting needs at least 3 points")
    if np.any(arr <= 0.0) or not np.all(np.isfinite(arr)):
        raise ValueError("slope fitting needs positive finite sample sizes and risks")
    x = np.log(arr[:, 0])
    y = np.log(arr[:, 1])
    x_mean = float(x.mean())
    y_mean = float(y.mean())
    sxx = float(np.sum((x - x_mean) ** 2))
    if sxx == 0.0:
        raise ValueError("slope fitting needs at least two distinct sample sizes")
    slope = float(np.sum((x - x_mean) * (y - y_mean))) / sxx
    intercept = y_mean - slope * x_mean
    residuals = y - (intercept + slope * x)
    dof = x.size - 2
    stderr = math.sqrt(float(residuals @ residuals) / dof / sxx)
    return slope, intercept, stderr


@dataclass(frozen=True)
class RateRow:
    """Aggregated risk at one sample size."""

    N: int
    replicates: int
    mean_sq_risk: float
    stderr: float


@dataclass(frozen=True)
class RateTable:
    """Risk curve over the sample-size grid with its fitted log-log slope.

    ``degenerate`` marks runs where some mean risk is exactly zero (for
    example noiseless scenarios, where the estimator interpolates); the
    slope is undefined there and reported as ``None``.
    """

    rows: Tuple[RateRow, ...]
    slope: Optional[float]
    slope_stderr: Optional[float]
    intercept: Optional[float]
    degenerate: bool

    def to_csv_text(self) -> str:
        lines = ["N,R,mean_sq_risk,stderr"]
        for row in self.rows:
            lines.append(
                f"{row.N},{row.replicates},{row.mean_sq_risk!r},{row.stderr!r}"
            )
        lines.append(f"slope,{'nan' if self.slope is None else repr(self.slope)}")
        lines.append(
            f"slope_stderr,{'nan' if self.slope_stderr is None else repr(self.slope_stderr)}"
        )
        lines.append(
            f"intercept,{'nan' if self.intercept is None else repr(self.intercept)}"
        )
        lines.append(f"degenerate,{'true' if self.degenerate else 'false'}")
        return "\n".join(lines) + "\n"


def write_rate_csv(table: RateTable, path) -> None:
    with open(path, "w", encoding="ascii", newline="") as handle:
        handle.write(table.to_csv_text())


def _replicate_risk(args) -> float:
    scenario, weighting = args
    data = simulate_dataset(scenario)
    estimate = fit(data)
    truth = build_true_map(scenario.true_map, scenario.domain)
    if weighting == "uniform":
        q = UniformDensity(scenario.domain[0], scenario.domain[1])
    else:
        q = average_measure([mu for mu, _ in data.pairs])
    return risk(estimate, truth, q)


def rate_experiment(cfg: RateConfig, *, workers: int = 1) -> RateTable:
    """Monte Carlo risk curve of the estimator over the sample-size grid.

    For each grid size, ``cfg.replicates`` independent replicates run
    simulate / fit / risk with seeds derived from (master seed, sample size,
    replicate index).  Replicates are independent jobs; with ``workers > 1``
    they run in a process pool, and results are reduced in replicate order
    either way, so the output is identical at any degree of parallelism.
    """
    if workers < 1:
        raise ValueError("workers must be at least 1")
    jobs = []
    for n in cfg.N:
        for rep in range(cfg.replicates):
            scenario = ScenarioConfig(
                domain=cfg.domain,
                design=cfg.design,
                true_map=cfg.true_map,
                noise=cfg.noise,
                N=n,
                seed=derive_replicate_seed(cfg.seed, n, rep),
            )
            jobs.append((scenario, cfg.weighting))
    if workers == 1:
        risks = [_replicate_risk(job) for job in jobs]
    else:
        chunk = max(1, len(jobs) // (workers * 8))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            risks = list(pool.map(_replicate_risk, jobs, chunksize=chunk))
    rows = []
    for idx, n in enumerate(cfg.N):
        block = risks[idx * cfg.replicates : (idx + 1) * cfg.replicates]
        mean = sum(block) / cfg.replicates
        var = sum((r - mean) ** 2 for r in block) / (cfg.replicates - 1)
        rows.append(
            RateRow(
                N=n,
                replicates=cfg.replicates,
                mean_sq_risk=mean,
                stderr=math.sqrt(var / cfg.replicates),
            )
        )
    degenerate = any(row.mean_sq_risk <= 0.0 for row in rows)
    slope = slope_stderr = intercept = None
    if not degenerate and len(rows) >= 3:
        slope, intercept, slope_stderr = loglog_slope(
            [(row.N, row.mean_sq_risk) for row in rows]
        )
    return RateTable(
        rows=tuple(rows),
        slope=slope,
        slope_stderr=slope_stderr,
        intercept=intercept,
        degenerate=degenerate,
    )
