"""Trigger rule and sample-selection strategies for labeling interventions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class InterventionPolicy:
    threshold: float = 0.1
    budget_fraction: float = 0.5
    strategy: str = "UI"  # UI | CEI | RI
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.threshold < 0:
            raise ValueError("threshold must be >= 0")
        if not 0 < self.budget_fraction <= 1:
            raise ValueError("budget_fraction must be in (0, 1]")
        if self.strategy not in ("UI", "CEI", "RI"):
            raise ValueError(f"unknown strategy {self.strategy!r}")


def should_trigger(total_uncertainty: float, policy: InterventionPolicy) -> bool:
    """Fire only on strictly exceeding the threshold."""
    return total_uncertainty > policy.threshold


def budget(n_t: int, policy: InterventionPolicy) -> int:
    """Number of samples to label: ceil(fraction * n), clamped to [1, n]."""
    m = int(np.ceil(policy.budget_fraction * n_t))
    return max(1, min(m, n_t))


def _top_m(scores: np.ndarray, m: int) -> np.ndarray:
    # stable sort on negated scores: ties resolve to the lower index
    return np.argsort(-scores, kind="stable")[:m]


def select_ui(per_sample_sd: np.ndarray, m: int) -> np.ndarray:
    """Indices of the m largest per-sample uncertainty contributions.

    Zero-SD samples (pinned ones in particular) lose every tie against
    positive SDs, so they are selected only when nothing else remains.
    """
    sd = np.asarray(per_sample_sd, dtype=float)
    if m > len(sd):
        raise ValueError("m exceeds batch size")
    return _top_m(sd, m)


def select_cei(belief_probs: np.ndarray, model_probs: np.ndarray, m: int) -> np.ndarray:
    """Top-m expected cross-entropy of the model under the belief."""
    model_probs = np.asarray(model_probs, dtype=float)
    scores = -(belief_probs * np.log(np.clip(model_probs, 1e-12, None))).sum(axis=0)
    if m > len(scores):
        raise ValueError("m exceeds batch size")
    return _top_m(scores, m)


def select_ri(n_t: int, m: int, rng: np.random.Generator) -> np.ndarray:
    """m distinct indices uniformly without replacement."""
    if m > n_t:
        raise ValueError("m exceeds batch size")
    return rng.choice(n_t, size=m, replace=False)
