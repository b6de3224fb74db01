"""Empirical shift-strength diagnostics for a monitored stream.

Per step: eps_hat is the exact 1-Wasserstein distance between consecutive
feature batches (Euclidean ground metric, so it is a true metric W1, unlike
the squared-Euclidean cost the monitoring couplings use); L_hat is the
reciprocal of the smallest cross-label distance, a lower bound on how fast
labels can flip per unit of input motion.  Their products bound how much the
label relationship may have drifted.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from driftmon.ot import exact_wasserstein1


@dataclass
class SmoothnessTrace:
    eps_hat: list = field(default_factory=list)
    L_hat: list = field(default_factory=list)
    shift_strength: list = field(default_factory=list)  # (1 + L) * eps
    cumulative_bound: list = field(default_factory=list)  # running sum of L * eps

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["t", "eps_hat", "L_hat", "shift_strength", "cum_bound"])
        rows = zip(self.eps_hat, self.L_hat, self.shift_strength, self.cumulative_bound)
        for t, row in enumerate(rows, start=1):
            writer.writerow([t] + [repr(float(v)) if v is not None else "" for v in row])
        return buf.getvalue()


def _euclidean_costs(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    diff = A[:, None, :] - B[None, :, :]
    return np.sqrt((diff * diff).sum(axis=2))


def estimate_epsilon(
    F_prev: np.ndarray,
    F_t: np.ndarray,
    rng: np.random.Generator | None = None,
) -> float:
    """Exact W1 between two batches; the larger one is subsampled to match."""
    A = np.asarray(F_prev, dtype=float)
    B = np.asarray(F_t, dtype=float)
    if len(A) != len(B):
        if rng is None:
            rng = np.random.default_rng(0)
        m = min(len(A), len(B))
        if len(A) > m:
            A = A[rng.choice(len(A), size=m, replace=False)]
        else:
            B = B[rng.choice(len(B), size=m, replace=False)]
    cost, _ = exact_wasserstein1(_euclidean_costs(A, B))
    return cost


def estimate_lipschitz(
    F_prev: np.ndarray,
    y_prev: np.ndarray,
    F_t: np.ndarray,
    y_t: np.ndarray,
) -> tuple[float, tuple[int, int]]:
    """Reciprocal of the minimal cross-label distance between the batches.

    Returns (L_hat, (i_prev, j_t)) for the minimizing pair.  Errors when no
    cross-label pair exists or the minimal distance is zero (contradictory
    labels at one point).
    """
    A = np.asarray(F_prev, dtype=float)
    B = np.asarray(F_t, dtype=float)
    ya = np.asarray(y_prev, dtype=int)
    yb = np.asarray(y_t, dtype=int)
    cross = ya[:, None] != yb[None, :]
    if not cross.any():
        raise ValueError("no cross-label pair between the batches")
    D = _euclidean_costs(A, B)
    D[~cross] = np.inf
    flat = int(np.argmin(D))
    i, j = np.unravel_index(flat, D.shape)
    dmin = float(D[i, j])
    if dmin == 0.0:
        raise ValueError("identical points with different labels")
    return 1.0 / dmin, (int(i), int(j))


def pearson(
    x: np.ndarray,
    y: np.ndarray,
    permutations: int = 10000,
    seed: int = 0,
) -> tuple[float, float]:
    """Sample Pearson correlation with a permutation-test p-value.

    Two-sided: the p-value is the add-one-smoothed fraction of label
    shuffles whose |rho| reaches the observed |rho|.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) != len(y) or len(x) < 3:
        raise ValueError("need equal-length inputs with at least 3 points")
    xc = x - x.mean()
    yc = y - y.mean()
    sx = np.sqrt((xc * xc).sum())
    sy = np.sqrt((yc * yc).sum())
    if sx == 0 or sy == 0:
        raise ValueError("zero variance input")
    rho = float((xc * yc).sum() / (sx * sy))
    rng = np.random.default_rng(seed)
    hits = 0
    for _ in range(permutations):
        perm = rng.permutation(len(y))
        r = (xc * yc[perm]).sum() / (sx * sy)
        if abs(r) >= abs(rho) - 1e-15:
            hits += 1
    p = (hits + 1) / (permutations + 1)
    return rho, float(p)


def trace(
    feature_batches: list,
    label_batches: list | None = None,
    rng: np.random.Generator | None = None,
) -> SmoothnessTrace:
    """Per-step shift diagnostics over a sequence of batches.

    label_batches may be None (or contain None entries) when ground truth
    is unavailable; the Lipschitz parts are then recorded as None.
    """
    out = SmoothnessTrace()
    running = 0.0
    have_labels = label_batches is not None
    for t in range(1, len(feature_batches)):
        eps = estimate_epsilon(feature_batches[t - 1], feature_batches[t], rng)
        labels_ok = (
            have_labels
            and label_batches[t - 1] is not None
            and label_batches[t] is not None
        )
        if labels_ok:
            L, _ = estimate_lipschitz(
                feature_batches[t - 1],
                label_batches[t - 1],
                feature_batches[t],
                label_batches[t],
            )
            running += L * eps
            out.L_hat.append(L)
            out.shift_strength.append((1.0 + L) * eps)
            out.cumulative_bound.append(running)
        else:
            out.L_hat.append(None)
            out.shift_strength.append(None)
            out.cumulative_bound.append(None)
        out.eps_hat.append(eps)
    return out
