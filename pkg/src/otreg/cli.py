"""Command-line interface: simulate, fit, rate experiments, packing, bounds."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .harness import (
    RateConfig,
    ScenarioConfig,
    rate_experiment,
    simulate_dataset,
    write_rate_csv,
)
from .regression import dataset_from_dict, dataset_to_dict, fit
from .theory import FanoInputs, PackingError, fano_bound, packing_family

__all__ = ["main"]


def _load_json(path: str):
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def _dump_json(obj, path: str) -> None:
    Path(path).write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")


def _cmd_simulate(args) -> int:
    cfg_obj = _load_json(args.config)
    if args.seed is not None:
        if not isinstance(cfg_obj, dict):
            raise ValueError("scenario config must be a JSON object")
        cfg_obj = dict(cfg_obj)
        cfg_obj["seed"] = args.seed
    cfg = ScenarioConfig.from_dict(cfg_obj)
    data = simulate_dataset(cfg)
    _dump_json(dataset_to_dict(data), args.out)
    print(f"wrote {args.out} ({len(data)} pairs, seed {cfg.seed})")
    return 0


def _cmd_fit(args) -> int:
    data = dataset_from_dict(_load_json(args.input))
    transport = fit(data, clamp=not args.no_clamp)
    _dump_json(transport.to_dict(), args.output)
    print(f"wrote {args.output} ({transport.xs.size} knots)")
    return 0


def _cmd_rate(args) -> int:
    cfg = RateConfig.from_dict(_load_json(args.config))
    table = rate_experiment(cfg, workers=args.workers)
    write_rate_csv(table, args.out)
    if args.plot is not None:
        from .plots import save_rate_plot

        save_rate_plot(table, args.plot)
    if table.degenerate:
        print(f"wrote {args.out} (degenerate: some mean risk is zero; no slope)")
    elif table.slope is None:
        print(f"wrote {args.out} (fewer than 3 grid points; no slope)")
    else:
        print(f"wrote {args.out} (slope {table.slope:.4f} +/- {table.slope_stderr:.4f})")
    return 0


def _cmd_packing(args) -> int:
    family = packing_family(
        args.k,
        args.h,
        args.target_hamming_frac,
        seed=args.seed,
        max_size=args.max_size,
    )
    _dump_json(family.to_dict(), args.out)
    print(
        f"wrote {args.out} ({len(family)} maps, min distance "
        f"{family.min_pairwise_dist:.6f}, log cardinality {family.log_cardinality:.4f})"
    )
    return 0


def _cmd_fano(args) -> int:
    value = fano_bound(
        FanoInputs(
            delta=args.delta,
            epsilon=args.epsilon,
            bracketing_constant=args.K,
            packing_constant=args.c,
            kl_multiplier=args.kl_multiplier,
        )
    )
    print(value)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="otreg",
        description=(
            "Distribution-on-distribution regression on the line: simulate "
            "datasets, fit monotone transport maps, run convergence-rate "
            "experiments, and evaluate lower-bound arithmetic."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="draw a synthetic dataset from a scenario config")
    p_sim.add_argument("--config", required=True, help="scenario config JSON file")
    p_sim.add_argument("--out", required=True, help="output dataset JSON file")
    p_sim.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_sim.set_defaults(func=_cmd_simulate)

    p_fit = sub.add_parser("fit", help="fit a monotone transport map to a dataset")
    p_fit.add_argument("--input", required=True, help="dataset JSON file")
    p_fit.add_argument("--output", required=True, help="output map JSON file")
    p_fit.add_argument(
        "--no-clamp",
        action="store_true",
        help="do not clip fitted values to the covariate domain",
    )
    p_fit.set_defaults(func=_cmd_fit)

    p_rate = sub.add_parser("rate", help="Monte Carlo risk curve over a sample-size grid")
    p_rate.add_argument("--config", required=True, help="rate config JSON file")
    p_rate.add_argument("--out", required=True, help="output CSV file")
    p_rate.add_argument("--plot", default=None, help="optional figure file (svg/png/pdf)")
    p_rate.add_argument("--workers", type=int, default=1, help="parallel replicate workers")
    p_rate.set_defaults(func=_cmd_rate)

    p_pack = sub.add_parser("packing", help="build a separated staircase map family")
    p_pack.add_argument("--k", type=int, required=True, help="number of bins")
    p_pack.add_argument("--h", type=float, required=True, help="step height (at most 1/k)")
    p_pack.add_argument("--seed", type=int, required=True, help="selection seed")
    p_pack.add_argument("--out", required=True, help="output family JSON file")
    p_pack.add_argument(
        "--target-hamming-frac",
        type=float,
        default=0.25,
        help="required pairwise Hamming distance as a fraction of k",
    )
    p_pack.add_argument(
        "--max-size", type=int, default=None, help="stop after this many members"
    )
    p_pack.set_defaults(func=_cmd_packing)

    p_fano = sub.add_parser("fano", help="print the generalized Fano lower-bound value")
    p_fano.add_argument("--delta", type=float, required=True, help="packing separation scale")
    p_fano.add_argument("--epsilon", type=float, required=True, help="KL-covering scale")
    p_fano.add_argument("--K", type=float, required=True, help="covering entropy constant (K/epsilon)")
    p_fano.add_argument("--c", type=float, required=True, help="packing entropy constant (c/delta)")
    p_fano.add_argument(
        "--kl-multiplier",
        type=float,
        default=1.0,
        help="scale on epsilon**2 in the information term (sample size for product laws)",
    )
    p_fano.set_defaults(func=_cmd_fano)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, PackingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
