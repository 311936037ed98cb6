"""Synthetic two-moons data, feature scaling and CSV round-tripping.

The moons geometry is written out explicitly (class 0 on the upper
half-circle (cos t, sin t), class 1 on (1 - cos t, 0.5 - sin t)) so that
generation is deterministic per seed and owned by this package.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


@dataclass
class Dataset:
    """Feature matrix x (n, 2) with binary labels y in {0, 1}."""

    x: np.ndarray
    y: np.ndarray
    split: str = "train"
    seed: int | None = None
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=np.float64)
        self.y = np.asarray(self.y, dtype=np.int64)
        if self.x.ndim != 2 or self.x.shape[1] != 2:
            raise ValueError(f"expected features of shape (n, 2), got {self.x.shape}")
        if self.y.shape != (self.x.shape[0],):
            raise ValueError("feature/label length mismatch")
        if not np.all(np.isfinite(self.x)):
            raise ValueError("features must be finite")
        if not np.isin(self.y, (0, 1)).all():
            raise ValueError("labels must be 0 or 1")

    def __len__(self) -> int:
        return self.x.shape[0]


def make_moons(
    n: int, noise_std: float = 0.1, seed: int = 0, split: str = "train"
) -> Dataset:
    """Two interleaved half-circles with Gaussian jitter, n//2-balanced."""
    if n < 2:
        raise ValueError(f"need at least 2 samples, got {n}")
    if noise_std < 0:
        raise ValueError("noise_std must be >= 0")
    n0 = n - n // 2
    n1 = n // 2
    t0 = np.linspace(0.0, np.pi, n0)
    t1 = np.linspace(0.0, np.pi, n1)
    x = np.concatenate(
        [
            np.column_stack([np.cos(t0), np.sin(t0)]),
            np.column_stack([1.0 - np.cos(t1), 0.5 - np.sin(t1)]),
        ]
    )
    y = np.concatenate([np.zeros(n0, dtype=np.int64), np.ones(n1, dtype=np.int64)])
    if noise_std > 0:
        rng = np.random.default_rng(seed)
        x = x + rng.normal(0.0, noise_std, size=x.shape)
    return Dataset(
        x,
        y,
        split=split,
        seed=seed,
        provenance={"generator": "moons", "n": n, "noise_std": noise_std, "seed": seed},
    )


def scale_features(ds: Dataset, lo: float, hi: float) -> Dataset:
    """Affine map of each feature column onto [lo, hi]."""
    if hi <= lo:
        raise ValueError(f"need hi > lo, got [{lo}, {hi}]")
    mins = ds.x.min(axis=0)
    maxs = ds.x.max(axis=0)
    span = maxs - mins
    if np.any(span == 0):
        raise ValueError("cannot scale a constant feature column")
    scaled = (ds.x - mins) / span * (hi - lo) + lo
    return Dataset(scaled, ds.y.copy(), split=ds.split, seed=ds.seed,
                   provenance=dict(ds.provenance, scaled_to=[lo, hi]))


def save_csv(ds: Dataset, path: str | Path) -> None:
    """Write columns x0,x1,y at full precision, plus a provenance sidecar."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x0", "x1", "y"])
        for (x0, x1), label in zip(ds.x, ds.y):
            writer.writerow([repr(float(x0)), repr(float(x1)), int(label)])
    if ds.provenance:
        sidecar = path.with_suffix(path.suffix + ".meta.json")
        sidecar.write_text(json.dumps(ds.provenance, sort_keys=True) + "\n")


def load_csv(path: str | Path) -> Dataset:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["x0", "x1", "y"]:
            raise ValueError(f"expected header x0,x1,y in {path}, got {header}")
        xs, ys = [], []
        for row in reader:
            if len(row) != 3:
                raise ValueError(f"malformed row in {path}: {row}")
            try:
                xs.append((float(row[0]), float(row[1])))
                label = int(row[2])
            except ValueError as exc:
                raise ValueError(f"malformed row in {path}: {row}") from exc
            if label not in (0, 1):
                raise ValueError(f"label must be 0 or 1, got {label}")
            ys.append(label)
    if not xs:
        raise ValueError(f"no data rows in {path}")
    return Dataset(np.array(xs), np.array(ys))
