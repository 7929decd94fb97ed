"""Experiment harness: seeded multi-run protocols and persisted outputs.

A compare experiment fans (optimizer x initialization) cells over one
problem instance with shared starting points, writes one JSON-lines
record per cell, and derives CSV summaries from those records. A scaling
experiment repeats one optimizer across system sizes for two ansatz
families. Everything is keyed off integer seeds; rerunning a config
reproduces every output file byte for byte.

Output layout under the target directory:
  config.json             parsed config echo (sorted keys)
  records/<cell>.jsonl    one meta line + one line per iterate
  summary.csv             one row per run
  medians.csv             per-optimizer aggregates
  traces.csv              median/mean energy and ratio vs evaluation count
  scaling.csv             (scaling runs) per (n, family) aggregates
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .ansatz import FAMILIES, build_ansatz
from .ising import (
    ENUM_MAX_QUBITS,
    MAX_QUBITS,
    exact_ground_truth,
    from_json_dict,
    generate_sk,
    load_instance,
)
from .optimizers import (
    ACCOUNTING_MODES,
    OPTIMIZER_KINDS,
    OptimizerConfig,
    RunRecord,
    run_optimizer,
)
from . import pca


class ConfigError(ValueError):
    """Config validation failure; message carries the offending key path."""


def _fail(path: str, message: str):
    raise ConfigError(f"{path}: {message}")


def _require(data: dict, key: str, path: str):
    if key not in data:
        _fail(path, f"missing required key {key!r}")
    return data[key]


def _as_int(value, path: str, minimum=None, maximum=None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(path, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        _fail(path, f"must be >= {minimum}, got {value}")
    if maximum is not None and value > maximum:
        _fail(path, f"must be <= {maximum}, got {value}")
    return value


@dataclass
class ExperimentConfig:
    """Validated compare/run protocol description."""

    instance_spec: dict
    ansatz_spec: dict
    optimizer_specs: list
    inits: int = 10
    seed: int = 0
    budget: int | None = 1000
    max_iterations: int | None = None
    accounting: str = "paper"
    threshold: float = 0.9
    raw: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError(f"config root: expected an object, got {type(data).__name__}")
        known = {"instance", "ansatz", "optimizers", "inits", "seed", "budget",
                 "max_iterations", "accounting", "threshold"}
        unknown = set(data) - known
        if unknown:
            _fail("config root", f"unknown keys {sorted(unknown)}")

        instance_spec = _require(data, "instance", "config root")
        if not isinstance(instance_spec, dict):
            _fail("instance", "expected an object")
        if "file" in instance_spec:
            extra = set(instance_spec) - {"file"}
            if extra:
                _fail("instance", f"unknown keys next to 'file': {sorted(extra)}")
        else:
            extra = set(instance_spec) - {"n", "seed"}
            if extra:
                _fail("instance", f"unknown keys {sorted(extra)}")
            _as_int(_require(instance_spec, "n", "instance"), "instance.n", 1, MAX_QUBITS)
            _as_int(_require(instance_spec, "seed", "instance"), "instance.seed")

        ansatz_spec = _require(data, "ansatz", "config root")
        if not isinstance(ansatz_spec, dict):
            _fail("ansatz", "expected an object")
        family = _require(ansatz_spec, "family", "ansatz")
        if family not in FAMILIES:
            _fail("ansatz.family", f"must be one of {FAMILIES}, got {family!r}")
        extra = set(ansatz_spec) - {"family", "p", "mode"}
        if extra:
            _fail("ansatz", f"unknown keys {sorted(extra)}")
        if "p" in ansatz_spec:
            _as_int(ansatz_spec["p"], "ansatz.p", 1)

        optimizer_specs = _require(data, "optimizers", "config root")
        if not isinstance(optimizer_specs, list) or not optimizer_specs:
            _fail("optimizers", "expected a non-empty list")
        parsed = []
        for idx, entry in enumerate(optimizer_specs):
            if isinstance(entry, str):
                entry = {"kind": entry}
            if not isinstance(entry, dict):
                _fail(f"optimizers[{idx}]", "expected a kind string or an object")
            kind = _require(entry, "kind", f"optimizers[{idx}]")
            if kind not in OPTIMIZER_KINDS:
                _fail(f"optimizers[{idx}].kind",
                      f"must be one of {OPTIMIZER_KINDS}, got {kind!r}")
            parsed.append(dict(entry))

        inits = _as_int(data.get("inits", 10), "inits", 1)
        seed = _as_int(data.get("seed", 0), "seed")
        budget = data.get("budget", 1000)
        if budget is not None:
            budget = _as_int(budget, "budget", 0)
        max_iterations = data.get("max_iterations")
        if max_iterations is not None:
            max_iterations = _as_int(max_iterations, "max_iterations", 0)
        if budget is None and max_iterations is None:
            _fail("budget", "budget and max_iterations cannot both be null")
        accounting = data.get("accounting", "paper")
        if accounting not in ACCOUNTING_MODES:
            _fail("accounting", f"must be one of {ACCOUNTING_MODES}, got {accounting!r}")
        threshold = data.get("threshold", 0.9)
        if not isinstance(threshold, (int, float)) or isinstance(threshold, bool):
            _fail("threshold", f"expected a number, got {threshold!r}")

        return cls(instance_spec=instance_spec, ansatz_spec=ansatz_spec,
                   optimizer_specs=parsed, inits=inits, seed=seed, budget=budget,
                   max_iterations=max_iterations, accounting=accounting,
                   threshold=float(threshold), raw=data)

    def load_instance(self):
        if "file" in self.instance_spec:
            return load_instance(self.instance_spec["file"])
        return generate_sk(self.instance_spec["n"], self.instance_spec["seed"])

    def optimizer_config(self, index: int) -> OptimizerConfig:
        spec = dict(self.optimizer_specs[index])
        spec.setdefault("budget", self.budget)
        spec.setdefault("max_iterations", self.max_iterations)
        spec.setdefault("accounting", self.accounting)
        spec.setdefault("threshold", self.threshold)
        try:
            return OptimizerConfig.from_dict(spec)
        except ValueError as exc:
            raise ConfigError(f"optimizers[{index}]: {exc}") from exc


def load_config(path) -> ExperimentConfig:
    with open(path) as handle:
        try:
            data = json.load(handle)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON ({exc})") from exc
    return ExperimentConfig.from_dict(data)


def make_initial_thetas(seed: int, count: int, m: int) -> np.ndarray:
    """Shared starting points: uniform on (-pi, pi], one row per init.

    Init i depends only on (seed, i, m), so every optimizer in a compare
    run and every equal-width ansatz sees the identical vectors.
    """
    thetas = np.empty((count, m))
    for i in range(count):
        rng = np.random.default_rng(np.random.SeedSequence([seed, i, m]))
        thetas[i] = np.pi - rng.uniform(0.0, 2.0 * np.pi, size=m)
    return thetas


# ---------------------------------------------------------------------------
# record persistence


def dump_record(record: RunRecord, path) -> None:
    with open(path, "w") as handle:
        handle.write(json.dumps(record.meta_dict(), sort_keys=True,
                                separators=(",", ":")) + "\n")
        for iterate in record.iterates:
            handle.write(json.dumps(iterate.to_dict(), sort_keys=True,
                                    separators=(",", ":")) + "\n")


def load_record(path) -> RunRecord:
    meta = None
    iterates = []
    with open(path) as handle:
        for line in handle:
            line = line.strip()
            if not line:
                continue
            entry = json.loads(line)
            if entry.get("type") == "meta":
                meta = entry
            elif entry.get("type") == "iterate":
                iterates.append(entry)
            else:
                raise ValueError(f"{path}: unknown record line type {entry.get('type')!r}")
    if meta is None:
        raise ValueError(f"{path}: no meta line found")
    return RunRecord.from_dicts(meta, iterates)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isinf(value):
            return "inf"
        return f"{value:.12g}"
    return str(value)


# ---------------------------------------------------------------------------
# compare protocol


def _run_cell(config: ExperimentConfig, opt_index: int, init_index: int,
              theta0, instance, ground_truth, label: str) -> RunRecord:
    ansatz = build_ansatz(instance, config.ansatz_spec)
    opt_config = config.optimizer_config(opt_index)
    rng = np.random.default_rng(
        np.random.SeedSequence([config.seed, opt_index, init_index]))
    return run_optimizer(ansatz, instance, opt_config, theta0, rng,
                         ground_truth, label=label)


def _cell_worker(args):
    config_dict, opt_index, init_index = args
    config = ExperimentConfig.from_dict(config_dict)
    instance = config.load_instance()
    ground_truth = (exact_ground_truth(instance)
                    if instance.n <= ENUM_MAX_QUBITS else None)
    ansatz = build_ansatz(instance, config.ansatz_spec)
    theta0 = make_initial_thetas(config.seed, config.inits, ansatz.m)[init_index]
    kind = config.optimizer_specs[opt_index]["kind"]
    label = f"{kind}__init{init_index:02d}"
    return opt_index, init_index, _run_cell(config, opt_index, init_index,
                                            theta0, instance, ground_truth, label)


def run_compare(config: ExperimentConfig, out_dir, threads: int = 1) -> list:
    """Run every (optimizer, init) cell; persist records and summaries."""
    os.makedirs(os.path.join(out_dir, "records"), exist_ok=True)
    with open(os.path.join(out_dir, "config.json"), "w") as handle:
        json.dump(config.raw, handle, sort_keys=True, indent=2)
        handle.write("\n")

    instance = config.load_instance()
    ground_truth = (exact_ground_truth(instance)
                    if instance.n <= ENUM_MAX_QUBITS else None)
    ansatz = build_ansatz(instance, config.ansatz_spec)
    thetas = make_initial_thetas(config.seed, config.inits, ansatz.m)

    cells = [(o, i) for o in range(len(config.optimizer_specs))
             for i in range(config.inits)]
    results = {}
    if threads > 1:
        jobs = [(config.raw, o, i) for o, i in cells]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for opt_index, init_index, record in pool.map(_cell_worker, jobs):
                results[(opt_index, init_index)] = record
    else:
        for o, i in cells:
            kind = config.optimizer_specs[o]["kind"]
            label = f"{kind}__init{i:02d}"
            results[(o, i)] = _run_cell(config, o, i, thetas[i], instance,
                                        ground_truth, label)

    records = []
    for o, i in cells:
        record = results[(o, i)]
        records.append(record)
        dump_record(record, os.path.join(out_dir, "records", record.label + ".jsonl"))

    write_summary_csv(os.path.join(out_dir, "summary.csv"), records)
    kinds = [spec["kind"] for spec in config.optimizer_specs]
    write_medians_csv(os.path.join(out_dir, "medians.csv"), records, kinds)
    write_traces_csv(os.path.join(out_dir, "traces.csv"), records, kinds)
    return records


def run_single(config: ExperimentConfig, out_dir, threads: int = 1) -> list:
    """The run protocol: like compare but restricted to the first optimizer."""
    if len(config.optimizer_specs) != 1:
        raise ConfigError(
            "optimizers: the run protocol takes exactly one optimizer; "
            f"got {len(config.optimizer_specs)} (use compare for several)")
    return run_compare(config, out_dir, threads)


def write_summary_csv(path, records) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow([
            "label", "optimizer", "iterations", "total_evaluations",
            "total_true_evaluations", "final_energy", "final_ratio",
            "final_fidelity", "evals_to_ratio_threshold",
            "evals_to_fidelity_threshold", "converged", "stop_reason",
        ])
        for rec in records:
            ratio_hit = rec.ratio_threshold_hit
            fid_hit = rec.fidelity_threshold_hit
            writer.writerow([
                rec.label, rec.optimizer, max(len(rec.iterates) - 1, 0),
                rec.total_evaluations, rec.total_true_evaluations,
                _fmt(rec.final_energy), _fmt(rec.final_ratio),
                _fmt(rec.final_fidelity),
                _fmt(ratio_hit["evaluations"] if ratio_hit else None),
                _fmt(fid_hit["evaluations"] if fid_hit else None),
                rec.converged, rec.stop_reason,
            ])


def _median(values):
    vals = [v for v in values if v is not None]
    return float(np.median(vals)) if vals else None


def threshold_evaluations(records) -> np.ndarray:
    """Evals-to-threshold per record, inf when the run never got there."""
    return np.array([
        rec.ratio_threshold_hit["evaluations"] if rec.ratio_threshold_hit
        else math.inf
        for rec in records
    ], dtype=np.float64)


def write_medians_csv(path, records, kinds) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow([
            "optimizer", "runs", "median_final_energy", "median_final_ratio",
            "mean_final_ratio", "std_final_ratio", "stderr_final_ratio",
            "median_evals_to_threshold", "threshold_hits",
            "median_final_fidelity",
        ])
        for kind in kinds:
            group = [r for r in records if r.optimizer == kind]
            if not group:
                continue
            ratios = [r.final_ratio for r in group if r.final_ratio is not None]
            hits = threshold_evaluations(group)
            std = float(np.std(ratios, ddof=1)) if len(ratios) > 1 else 0.0
            writer.writerow([
                kind, len(group),
                _fmt(_median([r.final_energy for r in group])),
                _fmt(_median(ratios) if ratios else None),
                _fmt(float(np.mean(ratios)) if ratios else None),
                _fmt(std if ratios else None),
                _fmt(std / math.sqrt(len(ratios)) if ratios else None),
                _fmt(float(np.median(hits))),
                int(np.isfinite(hits).sum()),
                _fmt(_median([r.final_fidelity for r in group])),
            ])


def step_interpolate(evaluations, values, grid) -> np.ndarray:
    """Last recorded value at or before each grid point; NaN before the first.

    After a run's final evaluation its last value is held, so shorter runs
    stay comparable on a shared grid.
    """
    evaluations = np.asarray(evaluations, dtype=np.float64)
    values = np.asarray(values, dtype=np.float64)
    idx = np.searchsorted(evaluations, np.asarray(grid, dtype=np.float64),
                          side="right") - 1
    out = np.full(len(grid), np.nan)
    mask = idx >= 0
    out[mask] = values[idx[mask]]
    return out


def write_traces_csv(path, records, kinds) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow([
            "optimizer", "evaluations", "median_energy", "median_ratio",
            "mean_ratio", "std_ratio", "stderr_ratio",
        ])
        for kind in kinds:
            group = [r for r in records if r.optimizer == kind]
            if not group:
                continue
            grid = sorted({it.evaluations for rec in group for it in rec.iterates})
            energy_rows = []
            ratio_rows = []
            for rec in group:
                evals = [it.evaluations for it in rec.iterates]
                energy_rows.append(step_interpolate(
                    evals, [it.energy for it in rec.iterates], grid))
                ratios = [it.ratio for it in rec.iterates]
                if all(r is not None for r in ratios) and ratios:
                    ratio_rows.append(step_interpolate(evals, ratios, grid))
            energies = np.array(energy_rows)
            ratios = np.array(ratio_rows) if ratio_rows else None
            for col, evaluations in enumerate(grid):
                med_e = np.nanmedian(energies[:, col])
                if ratios is not None:
                    column = ratios[:, col]
                    live = column[~np.isnan(column)]
                    med_r = float(np.median(live)) if live.size else None
                    mean_r = float(np.mean(live)) if live.size else None
                    std_r = float(np.std(live, ddof=1)) if live.size > 1 else 0.0
                    err_r = (std_r / math.sqrt(live.size)) if live.size else None
                else:
                    med_r = mean_r = std_r = err_r = None
                writer.writerow([
                    kind, evaluations, _fmt(float(med_e)), _fmt(med_r),
                    _fmt(mean_r), _fmt(std_r if ratios is not None else None),
                    _fmt(err_r),
                ])


# ---------------------------------------------------------------------------
# scaling protocol


@dataclass
class ScalingConfig:
    """Validated scaling protocol: one optimizer across sizes and families."""

    sizes: list
    families: list
    optimizer_spec: dict
    ansatz_p: int = 1
    dcqc_mode: str = "full"
    inits: int = 10
    seed: int = 0
    instance_seed: int = 1
    budget: int | None = 1000
    accounting: str = "paper"
    threshold: float = 0.9
    raw: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict) -> "ScalingConfig":
        if not isinstance(data, dict):
            raise ConfigError(f"config root: expected an object, got {type(data).__name__}")
        known = {"sizes", "families", "optimizer", "p", "mode", "inits", "seed",
                 "instance_seed", "budget", "accounting", "threshold"}
        unknown = set(data) - known
        if unknown:
            _fail("config root", f"unknown keys {sorted(unknown)}")
        sizes = _require(data, "sizes", "config root")
        if not isinstance(sizes, list) or not sizes:
            _fail("sizes", "expected a non-empty list of qubit counts")
        for idx, n in enumerate(sizes):
            _as_int(n, f"sizes[{idx}]", 1, MAX_QUBITS)
        families = data.get("families", ["dcqc", "maqaoa"])
        if not isinstance(families, list) or not families:
            _fail("families", "expected a non-empty list")
        for idx, fam in enumerate(families):
            if fam not in FAMILIES:
                _fail(f"families[{idx}]", f"must be one of {FAMILIES}, got {fam!r}")
        optimizer_spec = data.get("optimizer", {"kind": "spsa_bfgs"})
        if isinstance(optimizer_spec, str):
            optimizer_spec = {"kind": optimizer_spec}
        if not isinstance(optimizer_spec, dict):
            _fail("optimizer", "expected a kind string or an object")
        kind = optimizer_spec.get("kind")
        if kind not in OPTIMIZER_KINDS:
            _fail("optimizer.kind", f"must be one of {OPTIMIZER_KINDS}, got {kind!r}")
        budget = data.get("budget", 1000)
        if budget is not None:
            budget = _as_int(budget, "budget", 0)
        accounting = data.get("accounting", "paper")
        if accounting not in ACCOUNTING_MODES:
            _fail("accounting", f"must be one of {ACCOUNTING_MODES}, got {accounting!r}")
        return cls(
            sizes=[int(n) for n in sizes],
            families=list(families),
            optimizer_spec=dict(optimizer_spec),
            ansatz_p=_as_int(data.get("p", 1), "p", 1),
            dcqc_mode=data.get("mode", "full"),
            inits=_as_int(data.get("inits", 10), "inits", 1),
            seed=_as_int(data.get("seed", 0), "seed"),
            instance_seed=_as_int(data.get("instance_seed", 1), "instance_seed"),
            budget=budget,
            accounting=accounting,
            threshold=float(data.get("threshold", 0.9)),
            raw=data,
        )


def _scaling_opt_config(config: ScalingConfig) -> OptimizerConfig:
    spec = dict(config.optimizer_spec)
    spec.setdefault("budget", config.budget)
    spec.setdefault("accounting", config.accounting)
    spec.setdefault("threshold", config.threshold)
    return OptimizerConfig.from_dict(spec)


def _scaling_cell(config: ScalingConfig, n: int, family: str, init_index: int,
                  instance, ground_truth, ansatz, theta0) -> RunRecord:
    rng = np.random.default_rng(
        np.random.SeedSequence([config.seed, n, hash_family(family), init_index]))
    label = f"scaling_n{n:02d}_{family}__init{init_index:02d}"
    # fidelity tracking would add one state prep per iterate; the sweep only
    # consumes ratios, so skip it
    return run_optimizer(ansatz, instance, _scaling_opt_config(config), theta0,
                         rng, ground_truth, label=label, track_fidelity=False)


def _scaling_cell_worker(args):
    config_dict, n, family, init_index = args
    config = ScalingConfig.from_dict(config_dict)
    instance = generate_sk(n, config.instance_seed)
    ground_truth = (exact_ground_truth(instance)
                    if n <= ENUM_MAX_QUBITS else None)
    ansatz = build_ansatz(instance, _scaling_ansatz_spec(config, family))
    theta0 = make_initial_thetas(config.seed, config.inits, ansatz.m)[init_index]
    return n, family, init_index, _scaling_cell(
        config, n, family, init_index, instance, ground_truth, ansatz, theta0)


def _scaling_ansatz_spec(config: ScalingConfig, family: str) -> dict:
    spec = {"family": family, "p": config.ansatz_p}
    if family == "dcqc":
        spec["mode"] = config.dcqc_mode
    return spec


def run_scaling(config: ScalingConfig, out_dir, threads: int = 1) -> dict:
    """Run the size sweep; returns {(n, family): [records]} and writes outputs.

    Sizes above the exact-enumeration cap get ratios against the best
    energy sampled across all runs at that size, flagged in scaling.csv by
    ratio_basis=best_sampled.
    """
    os.makedirs(os.path.join(out_dir, "records"), exist_ok=True)
    with open(os.path.join(out_dir, "config.json"), "w") as handle:
        json.dump(config.raw, handle, sort_keys=True, indent=2)
        handle.write("\n")

    cells = [(n, family, i) for n in config.sizes
             for family in config.families for i in range(config.inits)]
    results = {}
    if threads > 1:
        jobs = [(config.raw, n, family, i) for n, family, i in cells]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for n, family, i, record in pool.map(_scaling_cell_worker, jobs):
                results[(n, family, i)] = record
    else:
        for n in config.sizes:
            instance = generate_sk(n, config.instance_seed)
            ground_truth = (exact_ground_truth(instance)
                            if n <= ENUM_MAX_QUBITS else None)
            for family in config.families:
                ansatz = build_ansatz(instance, _scaling_ansatz_spec(config, family))
                thetas = make_initial_thetas(config.seed, config.inits, ansatz.m)
                for i in range(config.inits):
                    results[(n, family, i)] = _scaling_cell(
                        config, n, family, i, instance, ground_truth,
                        ansatz, thetas[i])

    all_records = {}
    for n, family, i in cells:
        record = results[(n, family, i)]
        all_records.setdefault((n, family), []).append(record)
        dump_record(record, os.path.join(out_dir, "records", record.label + ".jsonl"))

    write_scaling_csv(os.path.join(out_dir, "scaling.csv"), config, all_records)
    return all_records


def hash_family(family: str) -> int:
    """Stable small integer per family for seed derivation."""
    return FAMILIES.index(family)


def write_scaling_csv(path, config: ScalingConfig, all_records) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow([
            "n", "family", "runs", "ratio_basis", "median_final_ratio",
            "best_final_ratio", "mean_final_ratio", "std_final_ratio",
            "stderr_final_ratio", "median_final_energy", "best_final_energy",
            "median_evals_to_threshold", "threshold_hits",
        ])
        for n in config.sizes:
            exact = n <= ENUM_MAX_QUBITS
            if not exact:
                best_seen = min(
                    rec.final_energy
                    for family in config.families
                    for rec in all_records[(n, family)]
                    if rec.final_energy is not None
                )
            for family in config.families:
                records = all_records[(n, family)]
                if exact:
                    ratios = [r.final_ratio for r in records]
                    hits = threshold_evaluations(records)
                    med_hits = float(np.median(hits))
                    hit_count = int(np.isfinite(hits).sum())
                else:
                    ratios = [r.final_energy / best_seen for r in records]
                    med_hits, hit_count = None, None
                energies = [r.final_energy for r in records]
                std = float(np.std(ratios, ddof=1)) if len(ratios) > 1 else 0.0
                writer.writerow([
                    n, family, len(records),
                    "exact" if exact else "best_sampled",
                    _fmt(float(np.median(ratios))), _fmt(float(np.max(ratios))),
                    _fmt(float(np.mean(ratios))), _fmt(std),
                    _fmt(std / math.sqrt(len(ratios))),
                    _fmt(float(np.median(energies))), _fmt(float(np.min(energies))),
                    _fmt(med_hits), "" if hit_count is None else hit_count,
                ])


# ---------------------------------------------------------------------------
# landscape protocol


def run_landscape(record_path, out_dir, resolution: int = 50) -> dict:
    """PCA-project a persisted record and grid the cost in its top-2 plane."""
    record = load_record(record_path)
    if len(record.iterates) < 2:
        raise ValueError(
            f"{record_path}: landscape needs at least 2 iterates, "
            f"got {len(record.iterates)}")
    if record.instance_spec is None or record.ansatz_spec is None:
        raise ValueError(f"{record_path}: record lacks instance/ansatz metadata")
    instance = from_json_dict(record.instance_spec)
    ansatz = build_ansatz(instance, record.ansatz_spec)

    trajectory = np.array([it.theta for it in record.iterates])
    energies = np.array([it.energy for it in record.iterates])
    model = pca.fit_pca(trajectory)
    coords = pca.project(model, trajectory, k=2)
    top2 = pca.explained_variance_top2(model)
    xs, ys, grid_energy = pca.landscape_grid(model, ansatz, instance,
                                             trajectory, resolution=resolution)

    os.makedirs(out_dir, exist_ok=True)
    pca.write_landscape_csv(os.path.join(out_dir, "landscape.csv"),
                            xs, ys, grid_energy)
    pca.write_trajectory_csv(os.path.join(out_dir, "trajectory.csv"),
                             coords, energies)
    report = {
        "record": os.path.basename(str(record_path)),
        "optimizer": record.optimizer,
        "points": len(record.iterates),
        "resolution": resolution,
        "explained_variance_top2": top2,
        "explained_variance_ratio": [float(r) for r in
                                     model.explained_variance_ratio()[:10]],
    }
    with open(os.path.join(out_dir, "report.json"), "w") as handle:
        json.dump(report, handle, sort_keys=True, indent=2)
        handle.write("\n")
    return report
