"""Incremental label-belief propagation and the accuracy / uncertainty estimates.

The engine carries a K x n belief table: column j is the estimated label
distribution of the current batch's sample j, obtained by pushing the source
labels through the chain of per-step conditional couplings.  Storing the
belief instead of the full source-to-current transition map is an exact
reformulation (matrix-product associativity) and keeps memory at O(K n).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from driftmon.ot import cost_matrix, sinkhorn, conditional_coupling


@dataclass
class LabelBelief:
    """Column-stochastic class beliefs with per-column pinned flags."""

    probs: np.ndarray  # K x n
    pinned: np.ndarray  # n booleans

    @property
    def n(self) -> int:
        return self.probs.shape[1]


@dataclass
class EngineState:
    prev_features: np.ndarray
    belief: LabelBelief
    t: int
    ot_lambda: float
    source_onehots: np.ndarray  # K x n0
    ot_max_iter: int = 10000
    ot_tol: float = 1e-8
    track_transitions: bool = False
    transitions: list = field(default_factory=list)
    last_marginal_error: float = 0.0
    last_converged: bool = True


def _onehots(labels: np.ndarray, K: int) -> np.ndarray:
    labels = np.asarray(labels, dtype=int)
    if labels.min() < 0 or labels.max() >= K:
        raise ValueError("label outside {0..K-1}")
    out = np.zeros((K, len(labels)))
    out[labels, np.arange(len(labels))] = 1.0
    return out


def init(
    features: np.ndarray,
    labels: np.ndarray,
    K: int,
    ot_lambda: float,
    ot_max_iter: int = 10000,
    ot_tol: float = 1e-8,
    track_transitions: bool = False,
) -> EngineState:
    """Start an engine on the labeled source batch; belief = label one-hots."""
    features = np.asarray(features, dtype=float)
    onehots = _onehots(labels, K)
    return EngineState(
        prev_features=features,
        belief=LabelBelief(onehots.copy(), np.zeros(len(labels), dtype=bool)),
        t=0,
        ot_lambda=ot_lambda,
        source_onehots=onehots,
        ot_max_iter=ot_max_iter,
        ot_tol=ot_tol,
        track_transitions=track_transitions,
    )


def advance(state: EngineState, features_t: np.ndarray) -> EngineState:
    """Couple the previous batch to the new one and push the belief forward.

    Pinned flags reset: the new batch's samples have not been labeled.  Any
    pinned columns of the previous step keep acting through the belief they
    left behind.
    """
    features_t = np.asarray(features_t, dtype=float)
    if features_t.size == 0:
        raise ValueError("empty batch")
    if features_t.shape[1] != state.prev_features.shape[1]:
        raise ValueError("feature dimension changed between steps")
    C = cost_matrix(state.prev_features, features_t)
    res = sinkhorn(C, state.ot_lambda, state.ot_max_iter, state.ot_tol)
    G = conditional_coupling(res.gamma)
    state.belief = LabelBelief(
        state.belief.probs @ G, np.zeros(features_t.shape[0], dtype=bool)
    )
    if state.track_transitions:
        state.transitions.append(G)
    state.prev_features = features_t
    state.t += 1
    state.last_marginal_error = res.marginal_error
    state.last_converged = res.converged
    return state


def estimate_accuracy(belief: LabelBelief, predicted: np.ndarray) -> float:
    """Mean belief mass on the model's predicted class."""
    predicted = np.asarray(predicted, dtype=int)
    if len(predicted) != belief.n:
        raise ValueError("predictions length does not match belief width")
    return float(belief.probs[predicted, np.arange(belief.n)].mean())


def estimate_uncertainty(
    belief: LabelBelief, predicted: np.ndarray
) -> tuple[float, np.ndarray]:
    """Bernoulli SD of the per-sample correctness, and its mean.

    Pinned columns are exact one-hots, so their SD is exactly zero.
    """
    predicted = np.asarray(predicted, dtype=int)
    p = belief.probs[predicted, np.arange(belief.n)]
    per_sample = np.sqrt(np.clip(p * (1.0 - p), 0.0, None))
    per_sample[belief.pinned] = 0.0
    return float(per_sample.mean()), per_sample


def apply_labels(
    state: EngineState, indices: np.ndarray, labels: np.ndarray
) -> EngineState:
    """Pin queried columns to the supplied ground-truth labels."""
    indices = np.asarray(indices, dtype=int)
    labels = np.asarray(labels, dtype=int)
    if len(indices) != len(labels):
        raise ValueError("indices and labels length mismatch")
    if len(np.unique(indices)) != len(indices):
        raise ValueError("duplicate indices")
    if len(indices) and (indices.min() < 0 or indices.max() >= state.belief.n):
        raise ValueError("index outside current batch")
    K = state.belief.probs.shape[0]
    if len(labels) and (labels.min() < 0 or labels.max() >= K):
        raise ValueError("label outside {0..K-1}")
    state.belief.probs[:, indices] = 0.0
    state.belief.probs[labels, indices] = 1.0
    state.belief.pinned[indices] = True
    return state


def nipm_estimate(
    source_features: np.ndarray,
    source_labels: np.ndarray,
    K: int,
    target_features: np.ndarray,
    predicted: np.ndarray,
    ot_lambda: float,
    ot_max_iter: int = 10000,
    ot_tol: float = 1e-8,
) -> float:
    """One-shot source-to-target coupling estimate (the non-incremental ablation)."""
    onehots = _onehots(source_labels, K)
    C = cost_matrix(np.asarray(source_features, dtype=float),
                    np.asarray(target_features, dtype=float))
    res = sinkhorn(C, ot_lambda, ot_max_iter, ot_tol)
    G = conditional_coupling(res.gamma)
    belief = LabelBelief(onehots @ G, np.zeros(G.shape[1], dtype=bool))
    return estimate_accuracy(belief, predicted)


def transition_map(state: EngineState) -> np.ndarray:
    """Materialize the source-to-current transition matrix (diagnostics only).

    Available when the engine was created with track_transitions=True and
    batches stay small; refuses above 500 columns per step.
    """
    if not state.track_transitions:
        raise ValueError("engine was not tracking transitions")
    psi = None
    for G in state.transitions:
        if max(G.shape) > 500:
            raise ValueError("transition map materialization is capped at n=500")
        psi = G if psi is None else psi @ G
    if psi is None:
        n0 = state.source_onehots.shape[1]
        psi = np.eye(n0)
    return psi
