"""Single-hidden-layer softmax classifier trained from scratch with numpy.

Deliberately minimal: rectifier activation, full-batch adaptive-moment
updates, deterministic given a seed.  The monitored-model role only needs
predictions, class probabilities, and hidden activations.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np


@dataclass
class TrainConfig:
    learning_rate: float = 1e-3
    epochs: int = 1500
    seed: int = 0
    hidden: int = 128

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ValueError("learning rate must be positive")
        if self.epochs < 0:
            raise ValueError("epochs must be >= 0")


_MAGIC = "driftmon-mlp"
_VERSION = 1


class Mlp:
    """Parameters and inference for the d -> hidden -> K network."""

    def __init__(self, W1: np.ndarray, b1: np.ndarray, W2: np.ndarray, b2: np.ndarray):
        self.W1 = np.asarray(W1, dtype=float)
        self.b1 = np.asarray(b1, dtype=float)
        self.W2 = np.asarray(W2, dtype=float)
        self.b2 = np.asarray(b2, dtype=float)
        for p in (self.W1, self.b1, self.W2, self.b2):
            if not np.all(np.isfinite(p)):
                raise ValueError("non-finite parameters")

    @classmethod
    def initialize(cls, d: int, hidden: int, K: int, seed: int) -> "Mlp":
        # zero output layer: the untrained model is exactly uniform, so its
        # cross-entropy starts at log K regardless of the input scale
        rng = np.random.default_rng(seed)
        s1 = 1.0 / np.sqrt(d)
        return cls(
            rng.uniform(-s1, s1, size=(d, hidden)),
            np.zeros(hidden),
            np.zeros((hidden, K)),
            np.zeros(K),
        )

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.W1.shape[0], self.W1.shape[1], self.W2.shape[1]

    def hidden_features(self, X: np.ndarray) -> np.ndarray:
        """Post-activation hidden layer values, shape n x hidden."""
        X = np.asarray(X, dtype=float)
        return np.maximum(X @ self.W1 + self.b1, 0.0)

    def logits(self, X: np.ndarray) -> np.ndarray:
        return self.hidden_features(X) @ self.W2 + self.b2

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        """Softmax class probabilities, shape K x n (one column per sample)."""
        Z = self.logits(X)
        Z = Z - Z.max(axis=1, keepdims=True)
        E = np.exp(Z)
        return (E / E.sum(axis=1, keepdims=True)).T

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.predict_proba(X).argmax(axis=0)

    def save(self, path: str) -> None:
        d, h, K = self.dims
        payload = {
            "magic": _MAGIC,
            "version": _VERSION,
            "dims": [d, h, K],
            "W1": self.W1.tolist(),
            "b1": self.b1.tolist(),
            "W2": self.W2.tolist(),
            "b2": self.b2.tolist(),
        }
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh)

    @classmethod
    def load(cls, path: str) -> "Mlp":
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
        if payload.get("magic") != _MAGIC:
            raise ValueError("not a recognized model file")
        if payload.get("version") != _VERSION:
            raise ValueError(f"unsupported model version {payload.get('version')}")
        model = cls(payload["W1"], payload["b1"], payload["W2"], payload["b2"])
        if list(model.dims) != payload["dims"]:
            raise ValueError("dims field disagrees with parameter shapes")
        return model


def _loss_and_grads(model: Mlp, X: np.ndarray, Y: np.ndarray, y: np.ndarray):
    n = len(X)
    H = model.hidden_features(X)
    Z = H @ model.W2 + model.b2
    Z = Z - Z.max(axis=1, keepdims=True)
    E = np.exp(Z)
    P = E / E.sum(axis=1, keepdims=True)
    loss = float(-np.log(np.clip(P[np.arange(n), y], 1e-300, None)).mean())
    G = (P - Y) / n
    gW2 = H.T @ G
    gb2 = G.sum(axis=0)
    GH = G @ model.W2.T
    GH[H <= 0] = 0.0
    gW1 = X.T @ GH
    gb1 = GH.sum(axis=0)
    return loss, (gW1, gb1, gW2, gb2)


def _fit(X: np.ndarray, y: np.ndarray, cfg: TrainConfig, K: int | None):
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    if K is None:
        K = int(y.max()) + 1
    if y.min() < 0 or y.max() >= K:
        raise ValueError("labels outside {0..K-1}")
    n, d = X.shape
    model = Mlp.initialize(d, cfg.hidden, K, cfg.seed)
    Y = np.zeros((n, K))
    Y[np.arange(n), y] = 1.0
    params = [model.W1, model.b1, model.W2, model.b2]
    mom = [np.zeros_like(p) for p in params]
    sec = [np.zeros_like(p) for p in params]
    b1, b2, eps = 0.9, 0.999, 1e-8
    losses = []
    for epoch in range(1, cfg.epochs + 1):
        loss, grads = _loss_and_grads(model, X, Y, y)
        if not np.isfinite(loss):
            raise FloatingPointError(f"training loss diverged at epoch {epoch}")
        losses.append(loss)
        for p, m, v, g in zip(params, mom, sec, grads):
            m *= b1
            m += (1 - b1) * g
            v *= b2
            v += (1 - b2) * g * g
            mhat = m / (1 - b1**epoch)
            vhat = v / (1 - b2**epoch)
            p -= cfg.learning_rate * mhat / (np.sqrt(vhat) + eps)
    return model, np.array(losses)


def train(X: np.ndarray, y: np.ndarray, cfg: TrainConfig, K: int | None = None) -> Mlp:
    """Fit by full-batch cross-entropy descent; returns the trained model.

    Raises on NaN loss.  Same config and data give bit-identical parameters.
    """
    model, _ = _fit(X, y, cfg, K)
    return model


def loss_curve(X: np.ndarray, y: np.ndarray, cfg: TrainConfig) -> np.ndarray:
    """Per-epoch training loss for the given config (fresh model)."""
    _, losses = _fit(X, y, cfg, None)
    return losses


def mean_cross_entropy(model: Mlp, X: np.ndarray, y: np.ndarray) -> float:
    probs = model.predict_proba(X)
    picked = probs[np.asarray(y, dtype=int), np.arange(len(y))]
    return float(-np.log(np.clip(picked, 1e-300, None)).mean())


def grad_check(
    model: Mlp,
    X: np.ndarray,
    y: np.ndarray,
    subset: int = 50,
    step: float = 1e-5,
    seed: int = 0,
) -> float:
    """Max relative error of analytic gradients vs central differences.

    Checks a random subset of parameter coordinates.  Returns 0 by
    convention for an empty subset.
    """
    if subset == 0:
        return 0.0
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=int)
    K = model.dims[2]
    n = len(X)
    Y = np.zeros((n, K))
    Y[np.arange(n), y] = 1.0
    _, grads = _loss_and_grads(model, X, Y, y)
    params = [model.W1, model.b1, model.W2, model.b2]
    sizes = [p.size for p in params]
    total = sum(sizes)
    rng = np.random.default_rng(seed)
    picks = rng.choice(total, size=min(subset, total), replace=False)
    offsets = np.cumsum([0] + sizes)
    worst = 0.0
    for flat_idx in picks:
        pi = int(np.searchsorted(offsets, flat_idx, side="right") - 1)
        local = flat_idx - offsets[pi]
        p = params[pi]
        ij = np.unravel_index(local, p.shape)
        orig = p[ij]
        p[ij] = orig + step
        up = mean_cross_entropy(model, X, y)
        p[ij] = orig - step
        dn = mean_cross_entropy(model, X, y)
        p[ij] = orig
        numeric = (up - dn) / (2 * step)
        analytic = grads[pi][ij]
        denom = max(abs(numeric), abs(analytic), 1e-12)
        worst = max(worst, abs(numeric - analytic) / denom)
    return worst
