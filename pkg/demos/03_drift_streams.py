"""
Synthetic drift streams
=======================

A stream is a labeled training pool followed by step batches whose features
drift a little more each step: rotation in degrees, translation of selected
classes, or radial scaling.  The classifier is trained once on the pool, so
its true accuracy decays as the stream walks away from it.
"""

from dataclasses import replace

from driftmon.datasets import ShiftStream, gen_stream
from driftmon.mlp import TrainConfig, train

stream = ShiftStream(dataset="moons", shift="rotation", magnitude=2.0,
                     steps=30, samples_per_step=200, train_size=600, seed=0)

batches = list(gen_stream(stream))
train_batch, omega0, steps = batches[0], batches[1], batches[2:]
print(f"pool {len(train_batch.features)} pts, init batch "
      f"{len(omega0.features)} pts, {len(steps)} drifting steps")

model = train(train_batch.features, train_batch.labels, TrainConfig(epochs=800))

print("\n   t   degrees   true accuracy")
for t, batch in enumerate(steps, start=1):
    if t % 5 == 0 or t == 1:
        acc = (model.predict(batch.features) == batch.labels).mean()
        print(f"  {t:3d}   {t * stream.magnitude:7.1f}   {acc:.3f}")

# the same machinery generates translation and scaling streams; a zero
# magnitude freezes the world (the step batch repeats verbatim)
frozen = replace(stream, magnitude=0.0, steps=3)
fb = list(gen_stream(frozen))
print("\nzero-magnitude stream repeats the init batch:",
      all((b.features == fb[1].features).all() for b in fb[2:]))
