"""Distribution-on-distribution regression on the real line.

Covariates and responses are one-dimensional probability measures; the model
transports each covariate through a single unknown nondecreasing map.  The
package computes exact 1-D optimal-transport geometry on discrete measures,
fits the least-squares transport map by an exact reduction to weighted
isotonic regression, runs seeded Monte Carlo experiments that measure the
estimator's convergence rate, and evaluates the packing/Fano arithmetic
behind the matching minimax lower bound.
"""

from .harness import (
    DesignConfig,
    NoiseConfig,
    RateConfig,
    RateRow,
    RateTable,
    ScenarioConfig,
    TrueMapConfig,
    build_true_map,
    derive_replicate_seed,
    loglog_slope,
    rate_experiment,
    sample_noise_map,
    simulate_dataset,
    simulate_with_noise,
    write_rate_csv,
)
from .isotonic import WeightedPoint, merge_ties, pava
from .maps import (
    MonotoneMap,
    UniformDensity,
    WeightingMeasure,
    clamp_to,
    l2_distance_sq,
    map_eval,
)
from .measures import (
    DiscreteMeasure,
    average_measure,
    cdf_eval,
    pushforward,
    quantile_eval,
    wasserstein2_sq,
)
from .regression import (
    PooledProblem,
    RegressionDataset,
    dataset_from_dict,
    dataset_to_dict,
    fit,
    objective,
    pool,
    risk,
)
from .theory import (
    FanoInputs,
    PackingError,
    PackingFamily,
    fano_bound,
    kl_conditional,
    packing_family,
    staircase_map,
)

__version__ = "0.1.0"

__all__ = [
    "DesignConfig",
    "DiscreteMeasure",
    "FanoInputs",
    "MonotoneMap",
    "NoiseConfig",
    "PackingError",
    "PackingFamily",
    "PooledProblem",
    "RateConfig",
    "RateRow",
    "RateTable",
    "RegressionDataset",
    "ScenarioConfig",
    "TrueMapConfig",
    "UniformDensity",
    "WeightedPoint",
    "WeightingMeasure",
    "average_measure",
    "build_true_map",
    "cdf_eval",
    "clamp_to",
    "dataset_from_dict",
    "dataset_to_dict",
    "derive_replicate_seed",
    "fano_bound",
    "fit",
    "kl_conditional",
    "l2_distance_sq",
    "loglog_slope",
    "map_eval",
    "merge_ties",
    "objective",
    "packing_family",
    "pava",
    "pool",
    "pushforward",
    "quantile_eval",
    "rate_experiment",
    "risk",
    "sample_noise_map",
    "simulate_dataset",
    "simulate_with_noise",
    "staircase_map",
    "wasserstein2_sq",
    "write_rate_csv",
]
