"""Experiment orchestration: landscape scans, scheme comparisons, region
sweeps, CSV emission, and run metadata.

CSV rows carry one trial-scheme result each and reproduce bit-identically
for a given configuration and seed, except for the wall_ms timing column.
A sidecar JSON file records every default and modeling decision (bandwidth,
path-gain model, fixed-array position, RNG scheme) plus a timestamp, so the
CSV itself stays deterministic.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import asdict, dataclass, replace

import numpy as np

from . import __version__
from .arrays import ArrayConfig
from .baselines import (exhaustive_search, fpa_metric, gma_element_positions,
                        layout_metric, ma_optimize)
from .combining import metric_profiles, objective_metric
from .multiuser import feasible_sparsity_levels, optimize_multiuser
from .optim import GridSpec, OptimizerSettings, position_grid
from .scenario import (PATH_GAIN_MODEL, RNG_SCHEME, Scenario, ScenarioParams,
                       sample_scenario)
from .sca import optimize_single_user

CSV_COLUMNS = ("seed", "scheme", "K", "M", "N", "Y_over_D", "eta_max",
               "y_star", "eta_star", "metric", "evals", "wall_ms")
SCHEMES = ("gma", "fpa", "ma", "oracle")
COMPACT_D_MAX_ELEMENTS = 32  # reference compact array for region sweeps


@dataclass(frozen=True)
class LandscapeResult:
    """Full (y, eta) metric table with its spread summary."""

    y_values: np.ndarray
    eta_values: tuple[int, ...]
    metric: np.ndarray  # shape (len(eta_values), len(y_values))
    metric_max: float
    metric_min: float
    gap: float
    gap_units: str

    def rows(self):
        for i, eta in enumerate(self.eta_values):
            for j, y in enumerate(self.y_values):
                yield float(y), int(eta), float(self.metric[i, j])


def landscape(scenario: Scenario, y_grid=None, eta_set=None,
              grid_step: float | None = None) -> LandscapeResult:
    """Evaluate the metric over the full product of positions and sparsities.

    The gap is reported in dB for a single user (SNR) and in bits/s/Hz for
    several (sum rate).
    """
    cfg = scenario.cfg
    if y_grid is None:
        step = grid_step if grid_step is not None else cfg.wavelength / 16.0
        y_grid = position_grid(cfg.y_min, cfg.y_max, step)
    else:
        y_grid = np.asarray(y_grid, dtype=np.float64)
    if eta_set is None:
        eta_set = feasible_sparsity_levels(cfg)
    eta_set = [cfg.validate_eta(e) for e in eta_set]
    if len(eta_set) == 0 or y_grid.size == 0:
        raise ValueError("landscape needs non-empty grids")
    table = np.empty((len(eta_set), y_grid.size))
    for i, (eta, vals) in enumerate(metric_profiles(
            y_grid, eta_set, scenario.users, scenario.powers, cfg)):
        table[i] = vals
        if cfg.confine_aperture:
            _, hi = cfg.position_bounds(eta)
            table[i, y_grid > hi] = np.nan
    vmax = float(np.nanmax(table))
    vmin = float(np.nanmin(table))
    if scenario.K == 1:
        gap = 10.0 * np.log10(vmax / vmin) if vmin > 0 else np.inf
        units = "dB"
    else:
        gap = vmax - vmin
        units = "bits/s/Hz"
    return LandscapeResult(y_values=y_grid, eta_values=tuple(eta_set),
                           metric=table, metric_max=vmax, metric_min=vmin,
                           gap=float(gap), gap_units=units)


@dataclass(frozen=True)
class TrialRecord:
    """One scheme's result on one trial; layout is kept for MA re-evaluation."""

    seed: int
    scheme: str
    K: int
    M: int
    N: int
    Y_over_D: float
    eta_max: int
    y_star: float
    eta_star: int | None
    metric: float
    evals: int
    wall_ms: float
    layout: tuple[float, ...] | None = None

    def csv_row(self) -> list:
        row = [self.seed, self.scheme, self.K, self.M, self.N, self.Y_over_D,
               self.eta_max, self.y_star,
               "" if self.eta_star is None else self.eta_star,
               self.metric, self.evals, self.wall_ms]
        return [str(v) for v in row]


def _record(scenario: Scenario, scheme: str, y_star: float,
            eta_star: int | None, metric: float, evals: int,
            wall_ms: float, layout=None) -> TrialRecord:
    cfg = scenario.cfg
    y_span = cfg.y_max - cfg.y_min
    return TrialRecord(
        seed=scenario.trial, scheme=scheme, K=scenario.K, M=cfg.M, N=cfg.N,
        Y_over_D=y_span / cfg.physical_aperture, eta_max=cfg.eta_max,
        y_star=y_star, eta_star=eta_star, metric=metric, evals=evals,
        wall_ms=wall_ms, layout=layout)


def reevaluate_record(record: TrialRecord, params: ScenarioParams) -> float:
    """Metric recomputed from the stored configuration and trial seed."""
    scenario = sample_scenario(params, record.seed)
    if record.scheme == "ma":
        return layout_metric(np.asarray(record.layout), scenario.users,
                             scenario.powers, scenario.cfg)
    return objective_metric(record.y_star, record.eta_star, scenario.users,
                            scenario.powers, scenario.cfg)


def run_trial_schemes(scenario: Scenario, schemes,
                      settings: OptimizerSettings, grid: GridSpec,
                      oracle_step: float | None = None,
                      single_user_sca: bool = False,
                      extra_candidates=(), ma_restarts: int = 0
                      ) -> list[TrialRecord]:
    """Run the requested schemes on one scenario.

    The MA benchmark warm-starts from the group-array solution's element
    positions when one was computed, which pins the ordering
    MA >= GMA >= FPA per trial.
    """
    cfg, users, powers = scenario.cfg, scenario.users, scenario.powers
    records = []
    gma_solution = None
    for scheme in schemes:
        if scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {scheme!r}; choose from {SCHEMES}")
        t0 = time.perf_counter()
        if scheme == "gma":
            if single_user_sca:
                if scenario.K != 1:
                    raise ValueError("the SCA optimizer handles a single user")
                sol = optimize_single_user(users[0], settings, cfg,
                                           p_bar=float(powers.p_bar[0]))
                # store the record metric through the shared evaluation
                # kernel so it re-evaluates bit-identically
                metric = objective_metric(sol.y_star, sol.eta_star, users,
                                          powers, cfg)
            else:
                sol = optimize_multiuser(users, powers, cfg, grid, settings,
                                         extra_candidates=extra_candidates)
                metric = sol.objective
            gma_solution = sol
            wall = (time.perf_counter() - t0) * 1e3
            records.append(_record(scenario, "gma", sol.y_star, sol.eta_star,
                                   metric, sol.evals, wall))
        elif scheme == "fpa":
            metric = fpa_metric(users, powers, cfg)
            wall = (time.perf_counter() - t0) * 1e3
            records.append(_record(scenario, "fpa", cfg.y_min, 1, metric, 1, wall))
        elif scheme == "ma":
            init = None
            if gma_solution is not None:
                init = gma_element_positions(gma_solution.y_star,
                                             gma_solution.eta_star, cfg)
            layout, metric = ma_optimize(users, powers, cfg, grid, settings,
                                         init=init, restarts=ma_restarts)
            wall = (time.perf_counter() - t0) * 1e3
            records.append(_record(scenario, "ma", float(layout.positions[0]),
                                   None, metric, 0, wall,
                                   layout=tuple(layout.positions)))
        elif scheme == "oracle":
            step = oracle_step if oracle_step is not None else cfg.wavelength / 1000.0
            y_o, eta_o, _ = exhaustive_search(users, powers, cfg, step)
            # record through the shared kernel for bit-identical re-evaluation
            metric = objective_metric(y_o, eta_o, users, powers, cfg)
            wall = (time.perf_counter() - t0) * 1e3
            records.append(_record(scenario, "oracle", y_o, eta_o, metric, 0, wall))
    return records


def run_compare(params: ScenarioParams, settings: OptimizerSettings,
                grid: GridSpec, trials: int, schemes=("gma", "fpa", "ma"),
                oracle_step: float | None = None,
                single_user_sca: bool = False,
                ma_restarts: int = 0) -> list[TrialRecord]:
    """Run the scheme comparison over independent trials."""
    records = []
    for t in range(trials):
        scenario = sample_scenario(params, t)
        records.extend(run_trial_schemes(
            scenario, schemes, settings, grid, oracle_step=oracle_step,
            single_user_sca=single_user_sca, ma_restarts=ma_restarts))
    return records


def run_sweep(params: ScenarioParams, settings: OptimizerSettings,
              grid: GridSpec, trials: int,
              region_multiples=(1, 2, 4, 8),
              element_counts=(32, 64, 128),
              schemes=("gma", "fpa")) -> list[TrialRecord]:
    """Sweep the movable-region size and the physical element count.

    Regions are multiples of the compact reference aperture (32-element
    array), anchored at zero, so the evaluated grids nest as the region
    grows. Each run also receives the solutions found for the next-smaller
    region and element count as injected candidates; together these make
    the per-trial metric monotone along both sweep axes.
    """
    d = params.d
    d_max = (COMPACT_D_MAX_ELEMENTS - 1) * d
    multiples = sorted(region_multiples)
    counts = sorted(element_counts)
    records = []
    for t in range(trials):
        solutions: dict[tuple[int, float], tuple[float, int]] = {}
        for m in counts:
            for mult in multiples:
                combo = replace(params, M=m, region=(0.0, mult * d_max))
                scenario = sample_scenario(combo, t)
                extra = []
                m_idx, r_idx = counts.index(m), multiples.index(mult)
                if r_idx > 0:
                    extra.append(solutions[(m, multiples[r_idx - 1])])
                if m_idx > 0:
                    extra.append(solutions[(counts[m_idx - 1], mult)])
                recs = run_trial_schemes(scenario, schemes, settings, grid,
                                         extra_candidates=extra)
                for r in recs:
                    if r.scheme == "gma":
                        solutions[(m, mult)] = (r.y_star, r.eta_star)
                records.extend(recs)
    return records


def write_records_csv(records, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for rec in records:
            writer.writerow(rec.csv_row())


def write_landscape_csv(result: LandscapeResult, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(("y", "eta", "metric"))
        for y, eta, metric in result.rows():
            writer.writerow((str(y), str(eta), str(metric)))


def run_metadata(params: ScenarioParams, settings: OptimizerSettings,
                 grid: GridSpec, extra: dict | None = None) -> dict:
    """Everything needed to interpret and reproduce a CSV."""
    payload = {
        "package_version": __version__,
        "created_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "scenario": _jsonable(asdict(params)),
        "optimizer": _jsonable(asdict(settings)),
        "grid": _jsonable(asdict(grid)),
        "decisions": {
            "bandwidth_hz": params.bandwidth_hz,
            "path_gain_model": PATH_GAIN_MODEL,
            "fpa_position": "bottom of the movable region (y_min)",
            "rng_scheme": RNG_SCHEME,
            "region_default": "[0, 8*(M-1)*d] when not set",
            "Y_over_D_definition": "(y_max - y_min) / ((M-1)*d)",
            "metric_units": "linear SNR for K=1, bits/s/Hz otherwise",
            "csv_determinism": "all columns reproducible except wall_ms",
        },
    }
    if extra:
        payload.update(extra)
    return payload


def write_metadata(csv_path, payload: dict) -> None:
    with open(str(csv_path) + ".meta.json", "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj
