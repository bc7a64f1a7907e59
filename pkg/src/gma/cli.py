"""Command-line experiment harness.

Subcommands: landscape, single-user, multi-user, sweep, compare. Each reads
an optional JSON config (sections: scenario, optimizer, grid, experiment;
unknown keys are rejected), applies CLI overrides, writes a CSV plus a
.meta.json sidecar, and prints a short summary.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields, replace

import numpy as np

from .experiments import (landscape, run_compare, run_metadata, run_sweep,
                          write_landscape_csv, write_metadata,
                          write_records_csv)
from .optim import GridSpec, OptimizerSettings
from .scenario import ScenarioParams, sample_scenario


class ConfigError(ValueError):
    pass


def _build(cls, section: dict, what: str):
    allowed = {f.name for f in fields(cls)}
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown {what} keys: {sorted(unknown)}")
    coerced = {k: tuple(v) if isinstance(v, list) else v
               for k, v in section.items()}
    return cls(**coerced)


_EXPERIMENT_KEYS = {"seeds", "schemes", "region_multiples", "element_counts",
                    "oracle_step", "ma_restarts"}


def load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            config = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(config, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(config) - {"scenario", "optimizer", "grid", "experiment"}
    if unknown:
        raise ConfigError(f"unknown config sections: {sorted(unknown)}")
    exp = config.get("experiment", {})
    bad = set(exp) - _EXPERIMENT_KEYS
    if bad:
        raise ConfigError(f"unknown experiment keys: {sorted(bad)}")
    return config


def _add_common_flags(sub):
    sub.add_argument("--config", help="JSON config path")
    sub.add_argument("--seed", type=int, help="master seed")
    sub.add_argument("--seeds", type=int, help="number of trials")
    sub.add_argument("--out", help="output CSV path")
    sub.add_argument("--scheme", help="comma-separated schemes (gma,fpa,ma,oracle)")
    sub.add_argument("--grid-step", type=float, help="search grid step in meters")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gma-sim",
        description="Group-movable-antenna position/sparsity experiments")
    subs = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("landscape", "metric over the full (position, sparsity) grid"),
        ("single-user", "single-user optimizer (surrogate ascent) over trials"),
        ("multi-user", "multi-user alternating search over trials"),
        ("sweep", "movable-region and array-size sweep"),
        ("compare", "scheme comparison (gma/fpa/ma/oracle) over trials"),
    ):
        _add_common_flags(subs.add_parser(name, help=text))
    return parser


def _setup(args):
    config = load_config(args.config)
    params = _build(ScenarioParams, config.get("scenario", {}), "scenario")
    settings = _build(OptimizerSettings, config.get("optimizer", {}), "optimizer")
    grid = _build(GridSpec, config.get("grid", {}), "grid")
    exp = dict(config.get("experiment", {}))
    if args.seed is not None:
        params = replace(params, seed=args.seed)
    if args.seeds is not None:
        exp["seeds"] = args.seeds
    if args.scheme is not None:
        exp["schemes"] = [s.strip() for s in args.scheme.split(",") if s.strip()]
    if args.grid_step is not None:
        grid = replace(grid, step=args.grid_step)
    return params, settings, grid, exp


def _force_single_user(params: ScenarioParams) -> ScenarioParams:
    p = np.atleast_1d(np.asarray(params.p_tx_dbm, dtype=np.float64))
    return replace(params, K=1, p_tx_dbm=float(p[0]))


def _print_scheme_means(records):
    by_scheme: dict[str, list[float]] = {}
    for rec in records:
        by_scheme.setdefault(rec.scheme, []).append(rec.metric)
    for scheme, vals in by_scheme.items():
        print(f"{scheme}: mean metric {np.mean(vals):.6g} over {len(vals)} trials")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        params, settings, grid, exp = _setup(args)
        trials = int(exp.get("seeds", 1))
        out = args.out if args.out is not None else f"gma_{args.command.replace('-', '_')}.csv"
        meta_extra = {"command": args.command, "trials": trials,
                      "master_seed": params.seed}

        if args.command == "landscape":
            scenario = sample_scenario(params, trial=0)
            result = landscape(scenario, grid_step=grid.resolve_step(
                scenario.cfg.wavelength))
            write_landscape_csv(result, out)
            write_metadata(out, run_metadata(params, settings, grid, meta_extra))
            print(f"landscape: max {result.metric_max:.6g}, "
                  f"min {result.metric_min:.6g}, "
                  f"gap {result.gap:.3f} {result.gap_units}")
            print(f"wrote {out}")
            return 0

        if args.command == "sweep":
            multiples = tuple(exp.get("region_multiples", (1, 2, 4, 8)))
            counts = tuple(exp.get("element_counts", (32, 64, 128)))
            schemes = tuple(exp.get("schemes", ("gma", "fpa")))
            records = run_sweep(params, settings, grid, trials,
                                region_multiples=multiples,
                                element_counts=counts, schemes=schemes)
            write_records_csv(records, out)
            write_metadata(out, run_metadata(params, settings, grid, meta_extra))
            _print_scheme_means(records)
            print(f"wrote {out} ({len(records)} records)")
            return 0

        single_user_sca = args.command == "single-user"
        if single_user_sca:
            params = _force_single_user(params)
            default_schemes = ("gma",)
        elif args.command == "multi-user":
            default_schemes = ("gma",)
        else:  # compare
            default_schemes = ("gma", "fpa", "ma")
        schemes = tuple(exp.get("schemes", default_schemes))
        records = run_compare(params, settings, grid, trials, schemes=schemes,
                              oracle_step=exp.get("oracle_step"),
                              single_user_sca=single_user_sca,
                              ma_restarts=int(exp.get("ma_restarts", 0)))
        write_records_csv(records, out)
        write_metadata(out, run_metadata(params, settings, grid, meta_extra))
        _print_scheme_means(records)
        print(f"wrote {out} ({len(records)} records)")
        return 0
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
