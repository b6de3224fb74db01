"""Synthetic 2-D datasets, gradual shift transforms, and stream generation.

Streams mimic a deployment scenario: a model is trained once on clean data,
then monitored over T steps while each step's freshly sampled batch receives
a cumulatively growing shift (rotation, translation, or scaling).  Labels
ride along unchanged, serving as the oracle ground truth.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterator

import numpy as np


@dataclass
class LabeledBatch:
    """Feature block with ground-truth labels."""

    features: np.ndarray  # n x d
    labels: np.ndarray  # n, integer classes

    def __post_init__(self) -> None:
        self.features = np.asarray(self.features, dtype=float)
        self.labels = np.asarray(self.labels, dtype=int)
        if len(self.features) != len(self.labels):
            raise ValueError("features and labels length mismatch")


@dataclass
class ShiftStream:
    """Declarative description of a synthetic monitoring stream.

    magnitude is per step: degrees for rotation, x-offset for translation,
    scale factor for scaling (applied as factor**k at step k).  The rotation
    / scaling center is "origin", "train_mean", or an explicit (x, y) pair;
    the generators' coordinates are small either way, so both centers keep
    the stream bounded.
    """

    dataset: str = "moons"  # moons | circles | clusters
    shift: str = "rotation"  # rotation | translation | scaling
    magnitude: float = 2.0
    steps: int = 100
    samples_per_step: int = 200
    seed: int = 0
    noise: float = 0.2
    factor: float = 0.3  # circles inner radius
    std: float = 1.0  # clusters spread
    train_size: int = 600
    center: object = "origin"
    translate_classes: tuple = (1,)

    def __post_init__(self) -> None:
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.samples_per_step < 2:
            raise ValueError("samples_per_step must be >= 2")
        if not np.isfinite(self.magnitude):
            raise ValueError("magnitude must be finite")
        if self.dataset not in ("moons", "circles", "clusters"):
            raise ValueError(f"unknown dataset {self.dataset!r}")
        if self.shift not in ("rotation", "translation", "scaling"):
            raise ValueError(f"unknown shift {self.shift!r}")


def _balanced_split(n: int) -> tuple[int, int]:
    half = n // 2
    return half, n - half


def make_moons(n: int, noise: float = 0.2, seed: int | np.random.Generator = 0) -> LabeledBatch:
    """Two interleaving half-circle arcs with isotropic Gaussian noise.

    Class 0 sits on (cos t, sin t), class 1 on (1 - cos t, 0.5 - sin t),
    with t evenly spaced over [0, pi] per class.
    """
    rng = np.random.default_rng(seed)
    n0, n1 = _balanced_split(n)
    t0 = np.linspace(0.0, np.pi, n0)
    t1 = np.linspace(0.0, np.pi, n1)
    X = np.vstack([
        np.column_stack([np.cos(t0), np.sin(t0)]),
        np.column_stack([1.0 - np.cos(t1), 0.5 - np.sin(t1)]),
    ])
    if noise:
        X = X + rng.normal(0.0, noise, X.shape)
    y = np.concatenate([np.zeros(n0, dtype=int), np.ones(n1, dtype=int)])
    return LabeledBatch(X, y)


def make_circles(
    n: int,
    noise: float = 0.2,
    factor: float = 0.3,
    seed: int | np.random.Generator = 0,
) -> LabeledBatch:
    """Concentric circles: class 0 at radius 1, class 1 at radius factor."""
    rng = np.random.default_rng(seed)
    n0, n1 = _balanced_split(n)
    t0 = np.linspace(0.0, 2.0 * np.pi, n0, endpoint=False)
    t1 = np.linspace(0.0, 2.0 * np.pi, n1, endpoint=False)
    X = np.vstack([
        np.column_stack([np.cos(t0), np.sin(t0)]),
        factor * np.column_stack([np.cos(t1), np.sin(t1)]),
    ])
    if noise:
        X = X + rng.normal(0.0, noise, X.shape)
    y = np.concatenate([np.zeros(n0, dtype=int), np.ones(n1, dtype=int)])
    return LabeledBatch(X, y)


def make_clusters(
    n: int, std: float = 1.0, seed: int | np.random.Generator = 0
) -> LabeledBatch:
    """Two isotropic Gaussian blobs with centers drawn from [-10, 10]^2.

    The centers are a deterministic function of the seed, so every batch of
    a stream shares them while the samples differ.
    """
    rng = np.random.default_rng(seed)
    centers = rng.uniform(-10.0, 10.0, size=(2, 2))
    n0, n1 = _balanced_split(n)
    X = np.vstack([
        centers[0] + std * rng.normal(size=(n0, 2)),
        centers[1] + std * rng.normal(size=(n1, 2)),
    ])
    y = np.concatenate([np.zeros(n0, dtype=int), np.ones(n1, dtype=int)])
    return LabeledBatch(X, y)


def apply_rotation(
    X: np.ndarray, degrees: float, center: np.ndarray | tuple = (0.0, 0.0)
) -> np.ndarray:
    """Rotate 2-D points by the angle (counterclockwise) about center."""
    X = np.asarray(X, dtype=float)
    c = np.asarray(center, dtype=float)
    th = np.deg2rad(degrees)
    R = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    return (X - c) @ R.T + c


def apply_translation(
    X: np.ndarray,
    labels: np.ndarray,
    class_mask: tuple | set | list,
    dx: float,
) -> np.ndarray:
    """Shift the x-coordinate of points whose label is in class_mask."""
    X = np.asarray(X, dtype=float).copy()
    sel = np.isin(np.asarray(labels), list(class_mask))
    X[sel, 0] += dx
    return X


def apply_scaling(
    X: np.ndarray, factor: float, center: np.ndarray | tuple = (0.0, 0.0)
) -> np.ndarray:
    """Scale points about center: X' = center + factor * (X - center)."""
    X = np.asarray(X, dtype=float)
    c = np.asarray(center, dtype=float)
    return c + factor * (X - c)


def _generate(cfg: ShiftStream, n: int, rng: np.random.Generator) -> LabeledBatch:
    if cfg.dataset == "moons":
        return make_moons(n, cfg.noise, rng)
    if cfg.dataset == "circles":
        return make_circles(n, cfg.noise, cfg.factor, rng)
    # clusters: centers must be shared across the stream, so they are drawn
    # from the stream seed while the samples use the per-batch generator
    centers = np.random.default_rng(cfg.seed).uniform(-10.0, 10.0, size=(2, 2))
    n0, n1 = _balanced_split(n)
    X = np.vstack([
        centers[0] + cfg.std * rng.normal(size=(n0, 2)),
        centers[1] + cfg.std * rng.normal(size=(n1, 2)),
    ])
    y = np.concatenate([np.zeros(n0, dtype=int), np.ones(n1, dtype=int)])
    return LabeledBatch(X, y)


def resolve_center(cfg: ShiftStream, train_features: np.ndarray) -> np.ndarray:
    """Map the configured center spec to concrete coordinates."""
    if isinstance(cfg.center, str):
        if cfg.center == "origin":
            return np.zeros(2)
        if cfg.center == "train_mean":
            return train_features.mean(axis=0)
        raise ValueError(f"unknown center spec {cfg.center!r}")
    return np.asarray(cfg.center, dtype=float)


def apply_shift(
    cfg: ShiftStream, batch: LabeledBatch, k: int, center: np.ndarray
) -> LabeledBatch:
    """Apply the cumulative shift of step k to a freshly generated batch."""
    if k == 0:
        return batch
    if cfg.shift == "rotation":
        X = apply_rotation(batch.features, cfg.magnitude * k, center)
    elif cfg.shift == "translation":
        X = apply_translation(
            batch.features, batch.labels, cfg.translate_classes, cfg.magnitude * k
        )
    else:
        X = apply_scaling(batch.features, cfg.magnitude**k, center)
    return LabeledBatch(X, batch.labels)


def gen_stream(cfg: ShiftStream) -> Iterator[LabeledBatch]:
    """Yield the train split, the initialization batch, then T shifted batches.

    A base pool of train_size + samples_per_step points is generated first
    and partitioned (seeded shuffle) into the train split and the step-0
    batch; each subsequent step draws a fresh batch and applies the
    cumulative shift for its index.
    """
    ss = np.random.SeedSequence(cfg.seed)
    children = ss.spawn(cfg.steps + 2)
    base_rng = np.random.default_rng(children[0])
    pool = _generate(cfg, cfg.train_size + cfg.samples_per_step, base_rng)
    perm = base_rng.permutation(len(pool.features))
    train = LabeledBatch(pool.features[perm[: cfg.train_size]],
                         pool.labels[perm[: cfg.train_size]])
    omega0 = LabeledBatch(pool.features[perm[cfg.train_size:]],
                          pool.labels[perm[cfg.train_size:]])
    center = resolve_center(cfg, train.features)
    yield train
    yield omega0
    identity = 1.0 if cfg.shift == "scaling" else 0.0
    if cfg.magnitude == identity:
        # zero shift means a frozen world: the step batch repeats verbatim
        for _ in range(cfg.steps):
            yield LabeledBatch(omega0.features.copy(), omega0.labels.copy())
        return
    for k in range(1, cfg.steps + 1):
        rng = np.random.default_rng(children[k + 1])
        batch = _generate(cfg, cfg.samples_per_step, rng)
        yield apply_shift(cfg, batch, k, center)


def batch_to_csv(batch: LabeledBatch) -> str:
    """Serialize a batch as CSV with header f0,f1,...,label."""
    d = batch.features.shape[1]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f"f{i}" for i in range(d)] + ["label"])
    for row, lab in zip(batch.features, batch.labels):
        writer.writerow([repr(float(v)) for v in row] + [int(lab)])
    return buf.getvalue()


def batch_from_csv(text: str) -> LabeledBatch:
    """Parse a batch from the CSV format written by batch_to_csv."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if header[-1] != "label":
        raise ValueError("expected trailing 'label' column")
    feats, labs = [], []
    for row in reader:
        if not row:
            continue
        feats.append([float(v) for v in row[:-1]])
        labs.append(int(row[-1]))
    return LabeledBatch(np.array(feats), np.array(labs))
