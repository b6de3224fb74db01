"""
The monitored classifier
========================

A small two-layer MLP trained with Adam on the two-moons toy problem.  The
monitoring methods never retrain this model; they only read its predicted
probabilities.  The gradient check at the end is the same one the test
suite relies on.
"""

import numpy as np

from driftmon.datasets import make_moons
from driftmon.mlp import TrainConfig, grad_check, loss_curve, mean_cross_entropy, train

train_batch = make_moons(600, seed=0)
test_batch = make_moons(400, seed=1)

cfg = TrainConfig(epochs=800, seed=0)
model = train(train_batch.features, train_batch.labels, cfg)

acc = (model.predict(test_batch.features) == test_batch.labels).mean()
print(f"held-out accuracy after {cfg.epochs} epochs: {acc:.3f}")

# the loss curve starts at log K exactly: the output layer is
# zero-initialized, so the untrained model is uniform
losses = loss_curve(train_batch.features, train_batch.labels, cfg)
print(f"loss at epoch 0: {losses[0]:.4f}  (log 2 = {np.log(2):.4f})")
print(f"loss at epoch {cfg.epochs}: {losses[-1]:.4f}")

ce = mean_cross_entropy(model, test_batch.features, test_batch.labels)
print(f"held-out cross-entropy: {ce:.4f}")

# spot-check the analytic gradients against central finite differences
err = grad_check(model, test_batch.features[:50], test_batch.labels[:50])
print(f"max relative gradient error vs finite differences: {err:.2e}")
