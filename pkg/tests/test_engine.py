"""Belief-propagation engine tests: recurrence, estimates, pinning."""

import math

import numpy as np
import pytest

from driftmon.datasets import make_moons
from driftmon.engine import (
    LabelBelief,
    advance,
    apply_labels,
    estimate_accuracy,
    estimate_uncertainty,
    init,
    nipm_estimate,
    transition_map,
)
from driftmon.intervention import select_ui
from driftmon.mlp import TrainConfig, train


def moons_state(n=40, lam=1e-3, seed=0, **kw):
    batch = make_moons(n, seed=seed)
    return batch, init(batch.features, batch.labels, 2, lam, **kw)


class TestInit:
    def test_one_hot_columns(self):
        st = init(np.zeros((2, 2)), [0, 1], 2, 1e-3)
        np.testing.assert_array_equal(st.belief.probs, np.eye(2))

    def test_repeated_label(self):
        st = init(np.zeros((2, 2)), [1, 1], 2, 1e-3)
        np.testing.assert_array_equal(st.belief.probs, [[0, 0], [1, 1]])

    def test_three_classes(self):
        st = init(np.zeros((3, 2)), [0, 2, 1], 3, 1e-3)
        expected = np.zeros((3, 3))
        expected[0, 0] = expected[2, 1] = expected[1, 2] = 1
        np.testing.assert_array_equal(st.belief.probs, expected)

    def test_label_out_of_range(self):
        with pytest.raises(ValueError):
            init(np.zeros((2, 2)), [0, 2], 2, 1e-3)
        with pytest.raises(ValueError):
            init(np.zeros((2, 2)), [-1, 0], 2, 1e-3)


class TestAdvance:
    def test_identical_batch_keeps_belief(self):
        batch, st = moons_state(30, lam=1e-3, seed=1)
        before = st.belief.probs.copy()
        advance(st, batch.features)
        assert st.t == 1
        np.testing.assert_allclose(st.belief.probs, before, atol=1e-6)

    def test_mixing_by_hand_product(self):
        batch, st = moons_state(20, seed=2, track_transitions=True)
        target = make_moons(20, seed=3)
        advance(st, target.features)
        G = st.transitions[0]
        onehots = st.source_onehots
        np.testing.assert_array_equal(st.belief.probs, onehots @ G)

    def test_recurrence_equals_explicit_transition_product(self):
        batch, st = moons_state(50, seed=4, track_transitions=True)
        for step_seed in range(5):
            advance(st, make_moons(50, seed=10 + step_seed).features)
        psi = transition_map(st)
        np.testing.assert_allclose(st.belief.probs, st.source_onehots @ psi,
                                   atol=1e-10)
        np.testing.assert_allclose(psi.sum(axis=0), 1.0, atol=1e-8)

    def test_empty_batch_rejected(self):
        _, st = moons_state()
        with pytest.raises(ValueError):
            advance(st, np.zeros((0, 2)))

    def test_dimension_change_rejected(self):
        _, st = moons_state()
        with pytest.raises(ValueError):
            advance(st, np.zeros((5, 3)))

    def test_columns_stay_stochastic(self):
        _, st = moons_state(25, seed=5)
        rng = np.random.default_rng(5)
        for k in range(4):
            advance(st, make_moons(20 + 5 * k, seed=20 + k).features)
            sums = st.belief.probs.sum(axis=0)
            np.testing.assert_allclose(sums, 1.0, atol=1e-8)
            idx = rng.choice(st.belief.n, size=3, replace=False)
            apply_labels(st, idx, rng.integers(0, 2, size=3))
            np.testing.assert_allclose(st.belief.probs.sum(axis=0), 1.0,
                                       atol=1e-8)


class TestEstimates:
    def test_agreeing_predictions(self):
        belief = LabelBelief(np.eye(2), np.zeros(2, dtype=bool))
        assert estimate_accuracy(belief, [0, 1]) == 1.0
        assert estimate_accuracy(belief, [1, 0]) == 0.0

    def test_single_column(self):
        belief = LabelBelief(np.array([[0.7], [0.3]]), np.zeros(1, dtype=bool))
        assert estimate_accuracy(belief, [0]) == pytest.approx(0.7)

    def test_uncertainty_certain(self):
        belief = LabelBelief(np.eye(2), np.zeros(2, dtype=bool))
        total, per = estimate_uncertainty(belief, [0, 1])
        assert total == 0.0
        np.testing.assert_array_equal(per, [0.0, 0.0])

    def test_uncertainty_half(self):
        belief = LabelBelief(np.array([[0.5], [0.5]]), np.zeros(1, dtype=bool))
        total, _ = estimate_uncertainty(belief, [0])
        assert total == pytest.approx(0.5)

    def test_uncertainty_hand_values(self):
        probs = np.array([[0.7, 0.3, 1.0], [0.3, 0.7, 0.0]])
        belief = LabelBelief(probs, np.zeros(3, dtype=bool))
        total, per = estimate_uncertainty(belief, [0, 0, 0])
        sd = math.sqrt(0.21)
        np.testing.assert_allclose(per, [sd, sd, 0.0], atol=1e-12)
        assert total == pytest.approx((2 * sd) / 3, abs=1e-12)
        assert round(total, 5) == 0.30551


class TestApplyLabels:
    def test_one_hot_overwrite_and_pin(self):
        belief = LabelBelief(np.array([[0.2, 0.5], [0.8, 0.5]]),
                             np.zeros(2, dtype=bool))
        st = init(np.zeros((2, 2)), [0, 1], 2, 1e-3)
        st.belief = belief
        apply_labels(st, [0], [0])
        np.testing.assert_array_equal(st.belief.probs[:, 0], [1.0, 0.0])
        assert st.belief.pinned[0] and not st.belief.pinned[1]

    def test_pinned_column_has_zero_sd(self):
        st = init(np.zeros((2, 2)), [0, 1], 2, 1e-3)
        st.belief = LabelBelief(np.full((2, 2), 0.5), np.zeros(2, dtype=bool))
        apply_labels(st, [1], [1])
        total, per = estimate_uncertainty(st.belief, [0, 1])
        assert per[1] == 0.0
        assert total == pytest.approx(0.25)

    def test_duplicate_indices_rejected(self):
        _, st = moons_state()
        with pytest.raises(ValueError):
            apply_labels(st, [1, 1], [0, 0])

    def test_out_of_range_rejected(self):
        _, st = moons_state(10)
        with pytest.raises(ValueError):
            apply_labels(st, [3], [2])
        with pytest.raises(ValueError):
            apply_labels(st, [99], [0])

    def test_correction_persists_through_advance(self):
        batch, st = moons_state(30, lam=1e-3, seed=6)
        # scramble belief, pin one column, then advance on identical points:
        # the pinned one-hot must flow through the near-identity coupling
        st.belief = LabelBelief(np.full((2, 30), 0.5), np.zeros(30, dtype=bool))
        apply_labels(st, [4], [1])
        advance(st, batch.features)
        assert st.belief.probs[1, 4] > 0.99
        assert not st.belief.pinned.any()

    def test_monotone_uncertainty_removal(self):
        rng = np.random.default_rng(7)
        probs = rng.dirichlet((1.0, 1.0), size=12).T
        st = init(np.zeros((12, 2)), [0] * 12, 2, 1e-3)
        st.belief = LabelBelief(probs, np.zeros(12, dtype=bool))
        preds = rng.integers(0, 2, size=12)
        total, per = estimate_uncertainty(st.belief, preds)
        for m in (1, 3, 12):
            sub_st = init(np.zeros((12, 2)), [0] * 12, 2, 1e-3)
            sub_st.belief = LabelBelief(probs.copy(), np.zeros(12, dtype=bool))
            idx = select_ui(per, m)
            apply_labels(sub_st, idx, preds[idx])
            new_total, _ = estimate_uncertainty(sub_st.belief, preds)
            assert new_total <= total + 1e-12
            assert new_total <= total - per[idx].sum() / 12 + 1e-9
        # labeling everything removes all uncertainty exactly
        st_all = init(np.zeros((12, 2)), [0] * 12, 2, 1e-3)
        st_all.belief = LabelBelief(probs.copy(), np.zeros(12, dtype=bool))
        apply_labels(st_all, np.arange(12), preds)
        assert estimate_uncertainty(st_all.belief, preds)[0] == 0.0


class TestZeroShiftFidelity:
    def test_twenty_identical_steps(self):
        batch = make_moons(60, seed=8)
        model = train(batch.features, batch.labels, TrainConfig(epochs=400, seed=8))
        pred = model.predict(batch.features)
        truth = (pred == batch.labels).mean()
        st = init(batch.features, batch.labels, 2, 1e-3)
        for _ in range(20):
            advance(st, batch.features)
            est = estimate_accuracy(st.belief, pred)
            assert abs(est - truth) <= 0.02


class TestNipm:
    def test_source_as_target_recovers_accuracy(self):
        batch = make_moons(50, seed=9)
        model = train(batch.features, batch.labels, TrainConfig(epochs=400, seed=9))
        pred = model.predict(batch.features)
        truth = (pred == batch.labels).mean()
        est = nipm_estimate(batch.features, batch.labels, 2,
                            batch.features, pred, 1e-3)
        assert est == pytest.approx(truth, abs=0.01)

    def test_single_step_equals_iupm_bitwise(self):
        source = make_moons(40, seed=10)
        target = make_moons(40, seed=11)
        model = train(source.features, source.labels, TrainConfig(epochs=200, seed=10))
        pred = model.predict(target.features)
        st = init(source.features, source.labels, 2, 1e-4)
        advance(st, target.features)
        iupm = estimate_accuracy(st.belief, pred)
        nipm = nipm_estimate(source.features, source.labels, 2,
                             target.features, pred, 1e-4)
        assert iupm == nipm


class TestTransitionMap:
    def test_identity_before_any_step(self):
        _, st = moons_state(8, track_transitions=True)
        np.testing.assert_array_equal(transition_map(st), np.eye(8))

    def test_requires_tracking(self):
        _, st = moons_state(8)
        with pytest.raises(ValueError):
            transition_map(st)

    def test_refuses_large_batches(self):
        _, st = moons_state(8, track_transitions=True)
        advance(st, make_moons(501, seed=12).features)
        with pytest.raises(ValueError):
            transition_map(st)
