"""Shift-strength diagnostics: W1 drift, label-flip bound, correlation probe."""

import itertools

import numpy as np
import pytest

from driftmon.smoothness import (
    estimate_epsilon,
    estimate_lipschitz,
    pearson,
    trace,
)


def brute_w1(A, B):
    diff = A[:, None, :] - B[None, :, :]
    C = np.sqrt((diff * diff).sum(axis=2))
    n = len(A)
    return min(
        C[np.arange(n), list(perm)].mean()
        for perm in itertools.permutations(range(n))
    )


class TestEpsilon:
    def test_identical_batches(self):
        A = np.random.default_rng(0).normal(size=(12, 3))
        assert estimate_epsilon(A, A.copy()) == 0.0

    def test_single_points(self):
        assert estimate_epsilon([[0.0, 0.0]], [[3.0, 4.0]]) == pytest.approx(5.0)

    def test_pure_translation(self):
        A = np.random.default_rng(1).normal(size=(9, 2))
        assert estimate_epsilon(A, A + [0.6, -0.8]) == pytest.approx(1.0, abs=1e-9)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(2)
        for n in (2, 4, 6, 7):
            A = rng.normal(size=(n, 2))
            B = rng.normal(size=(n, 2))
            assert estimate_epsilon(A, B) == pytest.approx(brute_w1(A, B), abs=1e-12)

    def test_subsampling_is_seeded(self):
        rng = np.random.default_rng(3)
        A = rng.normal(size=(30, 2))
        B = rng.normal(size=(10, 2))
        d1 = estimate_epsilon(A, B, np.random.default_rng(7))
        d2 = estimate_epsilon(A, B, np.random.default_rng(7))
        d3 = estimate_epsilon(A, B)  # implicit default seed
        assert d1 == d2
        assert d3 == estimate_epsilon(A, B)

    def test_triangle_inequality(self):
        rng = np.random.default_rng(4)
        A, B, C = (rng.normal(size=(6, 2)) for _ in range(3))
        ab = estimate_epsilon(A, B)
        bc = estimate_epsilon(B, C)
        ac = estimate_epsilon(A, C)
        assert ac <= ab + bc + 1e-12


class TestLipschitz:
    def test_reciprocal_of_min_cross_distance(self):
        A = np.array([[0.0, 0.0], [1.0, 0.0]])
        B = np.array([[0.25, 0.0], [5.0, 0.0]])
        L, pair = estimate_lipschitz(A, [0, 0], B, [1, 0])
        assert L == pytest.approx(4.0)
        assert pair == (0, 0)

    def test_same_label_pairs_ignored(self):
        # nearest pair shares a label; the bound must use the cross pair
        A = np.array([[0.0], [10.0]])
        B = np.array([[0.1], [10.2]])
        L, pair = estimate_lipschitz(A, [0, 1], B, [0, 1])
        assert pair in ((0, 1), (1, 0))
        assert L == pytest.approx(1.0 / 9.9)

    def test_no_cross_pair(self):
        with pytest.raises(ValueError, match="cross-label"):
            estimate_lipschitz(np.zeros((2, 1)), [1, 1], np.ones((2, 1)), [1, 1])

    def test_contradictory_labels_at_zero_distance(self):
        A = np.array([[1.0, 2.0]])
        with pytest.raises(ValueError, match="identical points"):
            estimate_lipschitz(A, [0], A.copy(), [1])

    def test_exhaustive_scan_agrees(self):
        rng = np.random.default_rng(5)
        A = rng.normal(size=(3, 2))
        B = rng.normal(size=(3, 2))
        ya, yb = [0, 1, 0], [1, 1, 0]
        L, _ = estimate_lipschitz(A, ya, B, yb)
        best = min(
            np.linalg.norm(A[i] - B[j])
            for i in range(3)
            for j in range(3)
            if ya[i] != yb[j]
        )
        assert L == pytest.approx(1.0 / best)

    def test_batch_order_symmetry(self):
        rng = np.random.default_rng(6)
        A, B = rng.normal(size=(4, 2)), rng.normal(size=(4, 2))
        ya, yb = [0, 0, 1, 1], [1, 0, 1, 0]
        La, _ = estimate_lipschitz(A, ya, B, yb)
        Lb, _ = estimate_lipschitz(B, yb, A, ya)
        assert La == pytest.approx(Lb)


class TestPearson:
    def test_perfect_positive(self):
        x = np.array([1.0, 2.0, 3.0, 4.0])
        rho, p = pearson(x, 2 * x + 1, permutations=500)
        assert rho == pytest.approx(1.0)
        assert p < 0.2

    def test_perfect_negative(self):
        x = np.array([0.0, 1.0, 2.0, 5.0])
        rho, _ = pearson(x, -x, permutations=200)
        assert rho == pytest.approx(-1.0)

    def test_independent_is_insignificant(self):
        rng = np.random.default_rng(8)
        rho, p = pearson(rng.normal(size=40), rng.normal(size=40),
                         permutations=2000)
        assert abs(rho) < 0.4
        assert p > 0.05

    def test_zero_variance(self):
        with pytest.raises(ValueError, match="zero variance"):
            pearson([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])

    def test_too_short(self):
        with pytest.raises(ValueError):
            pearson([1.0, 2.0], [1.0, 2.0])

    def test_p_is_smoothed(self):
        # even a perfect fit cannot report p below 1/(permutations+1)
        x = np.array([0.0, 1.0, 2.0, 3.0, 4.0, 5.0])
        _, p = pearson(x, x, permutations=99)
        assert p >= 1 / 100


class TestTrace:
    def test_single_step_products(self):
        A = np.array([[0.0, 0.0], [2.0, 0.0]])
        B = A + [0.5, 0.0]
        tr = trace([A, B], [[0, 1], [0, 1]])
        eps = tr.eps_hat[0]
        assert eps == pytest.approx(0.5)
        L = tr.L_hat[0]
        assert L == pytest.approx(1.0 / 1.5)  # A[0] vs B[1] / A[1] vs B[0]
        assert tr.shift_strength[0] == pytest.approx((1 + L) * eps)
        assert tr.cumulative_bound[0] == pytest.approx(L * eps)

    def test_cumulative_is_running_sum(self):
        rng = np.random.default_rng(9)
        batches = [rng.normal(size=(8, 2)) for _ in range(4)]
        labels = [rng.integers(0, 2, size=8) for _ in range(4)]
        tr = trace(batches, labels)
        assert len(tr.eps_hat) == 3
        partial = np.cumsum([l * e for l, e in zip(tr.L_hat, tr.eps_hat)])
        np.testing.assert_allclose(tr.cumulative_bound, partial)

    def test_missing_labels_leave_gaps(self):
        rng = np.random.default_rng(10)
        batches = [rng.normal(size=(5, 2)) for _ in range(3)]
        tr = trace(batches)
        assert tr.L_hat == [None, None]
        assert tr.shift_strength == [None, None]
        assert all(e >= 0 for e in tr.eps_hat)
        partial = trace(batches, [[0, 1, 0, 1, 0], None, [1, 0, 1, 0, 1]])
        assert partial.L_hat == [None, None]

    def test_csv_shape(self):
        A = np.array([[0.0], [2.0]])
        tr = trace([A, A + 1.0, A + 1.0], [[0, 1]] * 3)
        text = tr.to_csv()
        lines = text.splitlines()
        assert lines[0] == "t,eps_hat,L_hat,shift_strength,cum_bound"
        assert len(lines) == 3
        assert lines[1].startswith("1,1.0,")
        assert "\r" not in text

    def test_csv_blank_cells_without_labels(self):
        A = np.zeros((2, 1))
        tr = trace([A, A + 1.0])
        assert tr.to_csv().splitlines()[1] == "1,1.0,,,"
