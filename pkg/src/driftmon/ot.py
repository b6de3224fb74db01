"""Entropic and exact optimal transport between finite sample sets.

All couplings here are between uniform empirical measures: mass 1/n0 per
source point, 1/n1 per target point.  The entropic solver works entirely in
the log domain with dual potentials, which is what makes regularization as
small as 1e-4 usable on costs of order one; a naive kernel K = exp(-C/lam)
underflows to zero rows there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment


@dataclass
class SinkhornResult:
    """Entropic coupling plus convergence information.

    gamma sums to 1 overall; rows sum to 1/n0 and columns to 1/n1 within
    marginal_error.  converged is False when the iteration budget ran out
    before the tolerance was met; the best iterate is still returned.
    """

    gamma: np.ndarray
    converged: bool
    marginal_error: float
    iterations: int


def cost_matrix(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Pairwise squared Euclidean distances, shape (len(A), len(B))."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.ndim != 2 or B.ndim != 2:
        raise ValueError("expected 2-D sample arrays")
    if A.shape[1] != B.shape[1]:
        raise ValueError(
            f"feature dimension mismatch: {A.shape[1]} vs {B.shape[1]}"
        )
    sq = (A * A).sum(axis=1)[:, None] + (B * B).sum(axis=1)[None, :]
    sq -= 2.0 * (A @ B.T)
    # the expansion can go slightly negative for near-identical points
    np.maximum(sq, 0.0, out=sq)
    return sq


def _segment_lse(vals: np.ndarray, indptr: np.ndarray) -> np.ndarray:
    """Log-sum-exp over contiguous segments of a flat array."""
    mx = np.maximum.reduceat(vals, indptr[:-1])
    seg = np.repeat(np.arange(len(indptr) - 1), np.diff(indptr))
    s = np.add.reduceat(np.exp(vals - mx[seg]), indptr[:-1])
    return mx + np.log(s)


def sinkhorn(
    C: np.ndarray,
    lam: float,
    max_iter: int = 10000,
    tol: float = 1e-8,
) -> SinkhornResult:
    """Entropic-regularized optimal coupling with uniform marginals.

    Log-domain dual-potential iterations with stepwise regularization
    annealing (start near mean(C), shrink toward lam), followed by
    refinement at the target lam restricted to the active set of entries
    that carry non-negligible mass.  The active set is revalidated against
    the full dense matrix periodically, so the result is identical to a
    dense iteration up to the tolerance.

    Non-convergence within max_iter is not an error: the best iterate is
    returned with converged=False.  Non-finite costs are an error.
    """
    C = np.asarray(C, dtype=float)
    if C.ndim != 2:
        raise ValueError("cost matrix must be 2-D")
    if not np.all(np.isfinite(C)):
        raise ValueError("cost matrix contains non-finite entries")
    if lam <= 0:
        raise ValueError("lambda must be positive")
    n0, n1 = C.shape
    loga = -np.log(n0)
    logb = -np.log(n1)
    f = np.zeros(n0)
    g = np.zeros(n1)
    W = np.empty_like(C)
    iters = 0

    def dense_pass(level: float, count: int) -> None:
        nonlocal f, g, iters, W
        for _ in range(count):
            iters += 1
            np.subtract(g[None, :], C, out=W)
            W /= level
            mx = W.max(axis=1)
            np.exp(W - mx[:, None], out=W)
            f = level * (loga - mx - np.log(W.sum(axis=1)))
            np.subtract(f[:, None], C, out=W)
            W /= level
            mx = W.max(axis=0)
            np.exp(W - mx[None, :], out=W)
            g = level * (logb - mx - np.log(W.sum(axis=0)))

    def log_plan() -> np.ndarray:
        nonlocal W
        np.add(f[:, None], g[None, :], out=W)
        W -= C
        W /= lam
        return W

    def marginal_error(P: np.ndarray) -> float:
        r = np.abs(P.sum(axis=1) - 1.0 / n0).max()
        c = np.abs(P.sum(axis=0) - 1.0 / n1).max()
        return float(max(r, c))

    # annealing stages: a handful of dense iterations per level
    level = max(float(C.mean()), lam)
    while level > lam * (1 + 1e-9) and iters < max_iter:
        dense_pass(level, min(10, max_iter - iters))
        level = max(level * 0.5, lam)

    # refinement at the target regularization
    best_err = np.inf
    best = (f.copy(), g.copy())
    slack = 60.0  # exp(-60) * n is far below any useful tolerance
    check_every = 50
    while iters < max_iter:
        logP = log_plan()
        P = np.exp(logP)
        err = marginal_error(P)
        if err < best_err:
            best_err = err
            best = (f.copy(), g.copy())
        if err < tol:
            break
        # active entries relative to the largest log mass
        mask = logP > logP.max() - slack
        rows_amax = logP.argmax(axis=1)
        cols_amax = logP.argmax(axis=0)
        mask[np.arange(n0), rows_amax] = True
        mask[cols_amax, np.arange(n1)] = True
        rows, cols = np.nonzero(mask)
        Cr = C[rows, cols]
        r_indptr = np.searchsorted(rows, np.arange(n0 + 1))
        order = np.lexsort((rows, cols))
        rows_c = rows[order]
        cols_c = cols[order]
        Cc = C[rows_c, cols_c]
        c_indptr = np.searchsorted(cols_c, np.arange(n1 + 1))
        for _ in range(min(check_every, max_iter - iters)):
            iters += 1
            f = lam * (loga - _segment_lse((g[cols] - Cr) / lam, r_indptr))
            g = lam * (logb - _segment_lse((f[rows_c] - Cc) / lam, c_indptr))

    logP = log_plan()
    P = np.exp(logP)
    err = marginal_error(P)
    if err > best_err:
        f, g = best
        logP = log_plan()
        P = np.exp(logP)
        err = marginal_error(P)
    return SinkhornResult(
        gamma=P, converged=bool(err < tol), marginal_error=err, iterations=iters
    )


def conditional_coupling(gamma: np.ndarray) -> np.ndarray:
    """Column-normalize a coupling into backward transition probabilities.

    Column j of the result is the conditional distribution over source
    points given target point j.
    """
    gamma = np.asarray(gamma, dtype=float)
    sums = gamma.sum(axis=0)
    if np.any(sums <= 0):
        raise ValueError("coupling has a zero column; cannot condition on it")
    return gamma / sums[None, :]


def exact_wasserstein1(C: np.ndarray) -> tuple[float, np.ndarray]:
    """Exact OT cost between equal-size uniform measures, via assignment.

    Returns (cost, assignment) where cost = (1/n) * sum_i C[i, pi(i)] and
    assignment[i] = pi(i).  With a metric ground cost this is the empirical
    1-Wasserstein distance.
    """
    C = np.asarray(C, dtype=float)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise ValueError("exact solver requires a square cost matrix")
    rows, cols = linear_sum_assignment(C)
    perm = np.empty(C.shape[0], dtype=int)
    perm[rows] = cols
    cost = float(C[rows, cols].mean())
    return cost, perm
