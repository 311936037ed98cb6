"""Experiment orchestration: sweeps, paired comparisons, theory checks.

Every number an experiment emits is a pure function of (config, master
seed).  Each trial draws its streams from seeds derived by hashing
(master_seed, experiment, N, L, arm, trial, role), so any subset of a sweep
can be re-run in isolation and reproduce byte-identical results.  Output
layout is one directory per (experiment, N, L, arm) holding raw.csv,
summary.json and a config.json manifest carrying the config hash.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from joblib import Parallel, delayed

from .circuits import AnsatzFamily, AnsatzSpec, build_ansatz
from .datasets import Dataset, make_moons, scale_features
from .exceptions import ConfigError
from .simulator import Observable, observable_from_name
from .theory import deviation_delta, haar_variance, moment_report
from .topology import CouplingGraph, coupling_graph_from_name
from .training import TrainConfig, TrialRecord, train

EXPERIMENT_KINDS = ("random_sweep", "fixed_compare", "theory_check")

DESK_QUBITS = (2, 4, 6, 8)
PAPER_QUBITS = tuple(range(2, 11))
DEFAULT_DEPTHS = (2, 4, 6)
DESK_TRIALS = {"random_sweep": 20, "fixed_compare": 10}
PAPER_TRIALS = {"random_sweep": 300, "fixed_compare": 50}


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    qubits: tuple[int, ...] = DESK_QUBITS
    depths: tuple[int, ...] = DEFAULT_DEPTHS
    trials: int | None = None
    observable: str = "z_last"
    topology: str = "guadalupe"
    restricted: bool = False
    train: TrainConfig = field(default_factory=TrainConfig)
    master_seed: int = 0
    output_dir: str = "results"
    dataset_size: int = 100
    dataset_noise: float = 0.1
    paper_scale: bool = False
    workers: int = 1
    # theory_check only
    sweep_results: str | None = None
    mc_dims: tuple[int, ...] = (2, 4, 8)
    mc_samples: int = 100_000

    def __post_init__(self):
        if self.experiment not in EXPERIMENT_KINDS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.trials is not None and self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        if any(n < 2 for n in self.qubits):
            raise ConfigError("all qubit counts must be >= 2")
        if any(d < 1 for d in self.depths):
            raise ConfigError("all depths must be >= 1")
        if self.dataset_size < 2:
            raise ConfigError("dataset_size must be >= 2")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        observable_from_name(self.observable)  # raises on unknown names

    def effective_trials(self) -> int:
        if self.trials is not None:
            return self.trials
        table = PAPER_TRIALS if self.paper_scale else DESK_TRIALS
        return table.get(self.experiment, 20)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["qubits"] = list(self.qubits)
        d["depths"] = list(self.depths)
        d["mc_dims"] = list(self.mc_dims)
        d["train"]["adam_betas"] = list(self.train.adam_betas)
        d["trials"] = self.effective_trials()
        return d

    def config_hash(self) -> str:
        # where results land and how many workers ran them does not change
        # a single emitted number, so both stay out of the identity hash
        identity = self.to_dict()
        identity.pop("output_dir")
        identity.pop("workers")
        canonical = json.dumps(identity, sort_keys=True)
        return hashlib.sha256(canonical.encode()).hexdigest()[:16]

    @classmethod
    def from_dict(cls, data: dict, paper_scale: bool = False) -> "ExperimentConfig":
        data = dict(data)
        paper = bool(data.pop("paper_scale", False) or paper_scale)
        train_data = data.pop("train", {})
        if "init" in train_data:
            from .training import ParamInit

            train_data["init"] = ParamInit(**train_data["init"])
        if "adam_betas" in train_data:
            train_data["adam_betas"] = tuple(train_data["adam_betas"])
        for key in ("qubits", "depths", "mc_dims"):
            if key in data:
                data[key] = tuple(data[key])
        if paper:
            data.setdefault("qubits", PAPER_QUBITS)
        try:
            return cls(train=TrainConfig(**train_data), paper_scale=paper, **data)
        except TypeError as exc:
            raise ConfigError(f"bad experiment config: {exc}") from exc

    @classmethod
    def from_json(cls, path: str | Path, paper_scale: bool = False) -> "ExperimentConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(data, paper_scale=paper_scale)


def derive_seed(*parts) -> int:
    """Stable 63-bit seed from hashed string parts (not Python's hash())."""
    text = "/".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode()).digest()
    return int.from_bytes(digest[:8], "little") >> 1


# ---------------------------------------------------------------------------
# shared pieces

def _training_dataset(config: ExperimentConfig) -> Dataset:
    data = make_moons(
        config.dataset_size,
        config.dataset_noise,
        seed=derive_seed(config.master_seed, "dataset"),
    )
    return scale_features(data, 0.0, np.pi)


def _group_dir(config: ExperimentConfig, n: int, depth: int, arm: str) -> Path:
    return Path(config.output_dir) / config.experiment / f"N{n}_L{depth}" / arm


def _run_one_trial(
    spec: AnsatzSpec,
    topology: CouplingGraph,
    dataset: Dataset,
    obs: Observable,
    train_config: TrainConfig,
    trial_id: int,
) -> TrialRecord:
    circuit = build_ansatz(spec, topology)
    return train(circuit, dataset, obs, train_config, trial_id=trial_id)


def _run_group(
    config: ExperimentConfig,
    family: AnsatzFamily,
    n: int,
    depth: int,
    arm: str,
    topology: CouplingGraph,
    dataset: Dataset,
    obs: Observable,
    paired_init: bool = False,
) -> list[TrialRecord]:
    """Train ``trials`` independently seeded circuits for one (N, L, arm) cell."""
    restricted = arm == "restricted"
    jobs = []
    for k in range(config.effective_trials()):
        circuit_seed = derive_seed(
            config.master_seed, config.experiment, n, depth, arm, k, "circuit"
        )
        # paired arms share initialization so they differ only in circuit shape
        init_parts = (config.master_seed, config.experiment, n, depth, k, "init")
        if not paired_init:
            init_parts = (config.master_seed, config.experiment, n, depth, arm, k, "init")
        spec = AnsatzSpec(
            family=family,
            num_qubits=n,
            depth=depth,
            restricted=restricted,
            topology_name=topology.name,
            rng_seed=circuit_seed,
        )
        jobs.append(
            delayed(_run_one_trial)(
                spec, topology, dataset, obs,
                config.train.with_init_seed(derive_seed(*init_parts)), k,
            )
        )
    return Parallel(n_jobs=config.workers)(jobs)


def _loss_matrix(records: list[TrialRecord]) -> np.ndarray:
    return np.array([r.loss_per_epoch for r in records])


def summary_stats(losses: np.ndarray) -> dict:
    """Per-epoch mean/min/max across trials plus the final-epoch spread."""
    if losses.ndim != 2 or losses.size == 0:
        raise ValueError("need a non-empty (trials, epochs) loss matrix")
    per_epoch = [
        {
            "epoch": e,
            "mean": float(np.mean(losses[:, e])),
            "min": float(np.min(losses[:, e])),
            "max": float(np.max(losses[:, e])),
            "spread": float(np.max(losses[:, e]) - np.min(losses[:, e])),
        }
        for e in range(losses.shape[1])
    ]
    return {
        "trials": int(losses.shape[0]),
        "per_epoch": per_epoch,
        "final_mean": per_epoch[-1]["mean"],
        "final_spread": per_epoch[-1]["spread"],
    }


def _write_group(
    config: ExperimentConfig,
    n: int,
    depth: int,
    arm: str,
    records: list[TrialRecord],
) -> list[Path]:
    out = _group_dir(config, n, depth, arm)
    out.mkdir(parents=True, exist_ok=True)
    raw = out / "raw.csv"
    with raw.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["trial", "epoch", "loss"])
        for record in records:
            for epoch, loss in enumerate(record.loss_per_epoch):
                writer.writerow([record.trial_id, epoch, repr(float(loss))])

    manifest = {
        "experiment": config.experiment,
        "num_qubits": n,
        "depth": depth,
        "arm": arm,
        "observable": config.observable,
        "epochs": config.train.epochs,
        "trials": config.effective_trials(),
        "master_seed": config.master_seed,
        "config_hash": config.config_hash(),
        "config": config.to_dict(),
    }
    (out / "config.json").write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")

    summary = dict(summary_stats(_loss_matrix(records)))
    summary.update(
        num_qubits=n, depth=depth, arm=arm,
        observable=config.observable, config_hash=config.config_hash(),
    )
    (out / "summary.json").write_text(json.dumps(summary, sort_keys=True, indent=2) + "\n")
    return [raw, out / "summary.json", out / "config.json"]


# ---------------------------------------------------------------------------
# experiment drivers

def run_random_sweep(config: ExperimentConfig) -> list[Path]:
    """Randomly generated ansaetze, ``trials`` per (N, L) cell."""
    if config.experiment != "random_sweep":
        raise ConfigError(f"expected random_sweep, got {config.experiment!r}")
    topology = coupling_graph_from_name(config.topology)
    _check_qubits(config, topology)
    obs = observable_from_name(config.observable)
    dataset = _training_dataset(config)
    arm = "restricted" if config.restricted else "free"
    written = []
    for n in config.qubits:
        for depth in config.depths:
            records = _run_group(
                config, AnsatzFamily.RANDOM, n, depth, arm, topology, dataset, obs
            )
            written += _write_group(config, n, depth, arm, records)
    return written


def run_fixed_compare(config: ExperimentConfig) -> list[Path]:
    """Fixed ansatz trained with and without the topology restriction.

    The two arms share per-trial initialization seeds, so a cell where the
    restricted entangler coincides with the chain (e.g. N = 2) produces
    identical traces in both arms.
    """
    if config.experiment != "fixed_compare":
        raise ConfigError(f"expected fixed_compare, got {config.experiment!r}")
    topology = coupling_graph_from_name(config.topology)
    _check_qubits(config, topology)
    obs = observable_from_name(config.observable)
    dataset = _training_dataset(config)
    written = []
    for n in config.qubits:
        for depth in config.depths:
            finals = {}
            for arm in ("free", "restricted"):
                records = _run_group(
                    config, AnsatzFamily.FIXED, n, depth, arm, topology, dataset,
                    obs, paired_init=True,
                )
                written += _write_group(config, n, depth, arm, records)
                finals[arm] = float(np.mean(_loss_matrix(records)[:, -1]))
            compare = {
                "num_qubits": n,
                "depth": depth,
                "observable": config.observable,
                "final_mean_free": finals["free"],
                "final_mean_restricted": finals["restricted"],
                "gap_final_mean_abs": abs(finals["free"] - finals["restricted"]),
                "config_hash": config.config_hash(),
            }
            path = Path(config.output_dir) / config.experiment / f"N{n}_L{depth}" / "compare.json"
            path.write_text(json.dumps(compare, sort_keys=True, indent=2) + "\n")
            written.append(path)
    return written


def _check_qubits(config: ExperimentConfig, topology: CouplingGraph) -> None:
    if max(config.qubits) > topology.num_qubits:
        raise ConfigError(
            f"qubit count {max(config.qubits)} exceeds topology "
            f"{topology.name!r} ({topology.num_qubits})"
        )


# ---------------------------------------------------------------------------
# theory check

def _read_raw(path: Path) -> np.ndarray:
    """Loss matrix (trials, epochs + 1) from a raw.csv file."""
    rows = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["trial", "epoch", "loss"]:
            raise ValueError(f"expected header trial,epoch,loss in {path}")
        for row in reader:
            rows.append((int(row[0]), int(row[1]), float(row[2])))
    if not rows:
        raise ValueError(f"no data rows in {path}")
    trials = max(r[0] for r in rows) + 1
    epochs = max(r[1] for r in rows) + 1
    losses = np.full((trials, epochs), np.nan)
    for trial, epoch, loss in rows:
        losses[trial, epoch] = loss
    if np.isnan(losses).any():
        raise ValueError(f"incomplete loss grid in {path}")
    return losses


def _sweep_groups(root: Path) -> list[tuple[Path, dict, np.ndarray]]:
    """(directory, manifest, losses) for every raw.csv below ``root``."""
    groups = []
    for raw in sorted(root.glob("**/raw.csv")):
        manifest_path = raw.parent / "config.json"
        if not manifest_path.exists():
            raise ValueError(f"missing manifest next to {raw}")
        manifest = json.loads(manifest_path.read_text())
        groups.append((raw.parent, manifest, _read_raw(raw)))
    if not groups:
        raise ValueError(f"no sweep results under {root}")
    return groups


def run_theory_check(config: ExperimentConfig) -> dict:
    """Validate the concentration theory against closed forms and sweeps.

    Emits (a) analytic vs. Monte-Carlo Haar moments, (b) the per-trial
    per-epoch deviation-bound check against referenced sweep results, and
    (c) the ensemble lower-bound check on the initial loss.
    """
    if config.experiment != "theory_check":
        raise ConfigError(f"expected theory_check, got {config.experiment!r}")
    report: dict = {"config_hash": config.config_hash()}

    moments = []
    for name in ("z_last", "proj0_last"):
        obs = observable_from_name(name)
        for d in config.mc_dims:
            entry = moment_report(
                obs, d, config.mc_samples,
                seed=derive_seed(config.master_seed, "theory_mc", name, d),
            )
            entry["consistent_3se"] = (
                abs(entry["mc"]["mean"] - entry["analytic"]["mean"])
                <= 3.0 * entry["mc"]["se_mean"]
                and abs(entry["mc"]["var"] - entry["analytic"]["var"])
                <= 3.0 * entry["mc"]["se_var"]
            )
            moments.append(entry)
    report["moments"] = moments

    if config.sweep_results is not None:
        root = Path(config.sweep_results)
        if not root.exists():
            raise ConfigError(f"sweep results {root} do not exist")
        bound_checks = []
        theorem1_checks = []
        violations = []
        for group_dir, manifest, losses in _sweep_groups(root):
            obs = observable_from_name(manifest["observable"])
            d = 1 << int(manifest["num_qubits"])
            delta = deviation_delta(obs, d)
            mean_per_epoch = losses.mean(axis=0)
            se_per_epoch = losses.std(axis=0, ddof=1) / np.sqrt(losses.shape[0])
            deviation = np.abs(losses - mean_per_epoch[None, :])
            allowed = delta + np.abs(losses)
            bad = np.argwhere(deviation > allowed)
            for trial, epoch in bad:
                violations.append(
                    {
                        "group": str(group_dir),
                        "trial": int(trial),
                        "epoch": int(epoch),
                        "loss": float(losses[trial, epoch]),
                        "ensemble_mean": float(mean_per_epoch[epoch]),
                        "bound": float(allowed[trial, epoch]),
                    }
                )
            bound_checks.append(
                {
                    "group": str(group_dir),
                    "d": d,
                    "delta": delta,
                    "num_checked": int(losses.size),
                    "violations": int(len(bad)),
                    "ensemble_mean": [float(v) for v in mean_per_epoch],
                    "ensemble_se": [float(v) for v in se_per_epoch],
                }
            )
            var = haar_variance(obs, d)
            mean0 = float(mean_per_epoch[0])
            se0 = float(se_per_epoch[0])
            theorem1_checks.append(
                {
                    "group": str(group_dir),
                    "d": d,
                    "mean_epoch0": mean0,
                    "se_epoch0": se0,
                    "haar_variance": var,
                    "satisfied": bool(mean0 >= var - 3.0 * se0),
                }
            )
        report["bound_check"] = {
            "total_violations": len(violations),
            "violations": violations,
            "groups": bound_checks,
        }
        report["theorem1"] = theorem1_checks

    out = Path(config.output_dir) / "theory_check"
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(json.dumps(report, sort_keys=True, indent=2) + "\n")
    return report


def run_experiment(config: ExperimentConfig) -> dict:
    """Dispatch on config.experiment; returns a small result summary."""
    if config.experiment == "random_sweep":
        files = run_random_sweep(config)
        return {"experiment": config.experiment, "files": [str(p) for p in files]}
    if config.experiment == "fixed_compare":
        files = run_fixed_compare(config)
        return {"experiment": config.experiment, "files": [str(p) for p in files]}
    report = run_theory_check(config)
    return {
        "experiment": config.experiment,
        "violations": report.get("bound_check", {}).get("total_violations", 0),
        "report": str(Path(config.output_dir) / "theory_check" / "report.json"),
    }


# ---------------------------------------------------------------------------
# summaries over existing raw files

def summarize(paths: list[str | Path], combined_csv: str | Path | None = None) -> list[dict]:
    """Recompute summary.json for each raw.csv and optionally emit one
    long-format CSV (plot-ready) covering all of them."""
    if not paths:
        raise ValueError("no raw.csv paths given")
    rows = []
    summaries = []
    for path in sorted(Path(p) for p in paths):
        losses = _read_raw(path)
        stats = summary_stats(losses)
        meta = {}
        manifest_path = path.parent / "config.json"
        if manifest_path.exists():
            manifest = json.loads(manifest_path.read_text())
            meta = {
                "num_qubits": manifest.get("num_qubits"),
                "depth": manifest.get("depth"),
                "arm": manifest.get("arm"),
                "observable": manifest.get("observable"),
                "config_hash": manifest.get("config_hash"),
            }
        summary = dict(stats, **meta)
        (path.parent / "summary.json").write_text(
            json.dumps(summary, sort_keys=True, indent=2) + "\n"
        )
        summaries.append(summary)
        for entry in stats["per_epoch"]:
            rows.append(
                {
                    "source": str(path),
                    "num_qubits": meta.get("num_qubits", ""),
                    "depth": meta.get("depth", ""),
                    "arm": meta.get("arm", ""),
                    "epoch": entry["epoch"],
                    "mean": repr(entry["mean"]),
                    "min": repr(entry["min"]),
                    "max": repr(entry["max"]),
                    "spread": repr(entry["spread"]),
                }
            )
    if combined_csv is not None:
        fieldnames = ["source", "num_qubits", "depth", "arm", "epoch",
                      "mean", "min", "max", "spread"]
        with Path(combined_csv).open("w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=fieldnames)
            writer.writeheader()
            writer.writerows(rows)
    return summaries
