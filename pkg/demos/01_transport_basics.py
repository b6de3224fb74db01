"""
Entropic optimal transport between point clouds
===============================================

The couplings that drive every accuracy estimate in this package come from
Sinkhorn iterations over a squared-Euclidean cost matrix.  This script walks
through the primitive pieces: building costs, solving the coupling at
different regularization strengths, and checking against the exact
assignment-based W1.
"""

import numpy as np

from driftmon.ot import conditional_coupling, cost_matrix, exact_wasserstein1, sinkhorn

rng = np.random.default_rng(0)

# two small clouds: B is A shifted right by one unit
A = rng.normal(size=(6, 2))
B = A + np.array([1.0, 0.0])

C = cost_matrix(A, B)
print("cost matrix shape:", C.shape)
print("diagonal (paired points, squared distance 1):", np.round(np.diag(C), 3))

# strong regularization spreads mass; weak regularization sharpens toward
# the exact assignment
for lam in (1.0, 1e-2, 1e-4):
    res = sinkhorn(C, lam)
    cost = float((res.gamma * C).sum())
    print(f"lambda={lam:g}: transport cost {cost:.4f}, "
          f"converged={res.converged} after {res.iterations} iterations")

exact_cost, perm = exact_wasserstein1(C)
print("exact assignment cost:", round(exact_cost, 4))
print("optimal permutation:", perm)

# lambda = 1e-4 with O(1) costs is far below what a naive exp(-C/lambda)
# implementation survives: every scaling factor underflows to zero.
print("\nnaive kernel row sums at lambda=1e-4:",
      np.exp(-C / 1e-4).sum(axis=1))
print("(all zero, yet the log-domain solver above converged)")

# the belief engine consumes the coupling column-normalized, i.e. as the
# distribution over source points given each target point
G = conditional_coupling(sinkhorn(C, 1e-4).gamma)
print("\nconditional coupling columns sum to one:", G.sum(axis=0))
print("sharpest column mass:", round(float(G.max()), 4))
