"""
Monitoring your own model from CSV files
========================================

Streams do not have to come from the synthetic generators.  Drop one CSV
per step into a directory (features f0..f{d-1}, the model's predicted
probabilities p0..p{K-1}, and a label column wherever ground truth exists)
and point a run at it.  The first file initializes the belief engine, so it
must carry labels.
"""

import csv
import tempfile
from pathlib import Path

import numpy as np

from driftmon.runner import RunConfig, ingest_external, run_batch

step_dir = Path(tempfile.mkdtemp()) / "steps"
step_dir.mkdir()

# fabricate a tiny drifting problem with an intentionally mediocre "model":
# p1 is a logistic read of the first feature, truth is a shifted rule
rng = np.random.default_rng(8)
for t in range(4):
    X = rng.normal(size=(40, 2)) + [0.15 * t, 0.0]
    y = (X[:, 0] + 0.3 * X[:, 1] > 0.1 * t).astype(int)
    p1 = 1.0 / (1.0 + np.exp(-3.0 * X[:, 0]))
    with (step_dir / f"step{t:02d}.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["f0", "f1", "label", "p0", "p1"])
        for i in range(40):
            w.writerow([f"{X[i,0]:.6f}", f"{X[i,1]:.6f}", y[i],
                        f"{1-p1[i]:.6f}", f"{p1[i]:.6f}"])

batches = ingest_external(step_dir)
print(f"ingested {len(batches)} step files, "
      f"{batches[0].features.shape[1]} features, "
      f"{batches[0].probs.shape[0]} classes")

cfg = RunConfig(run_id="external-demo", output_dir="runs",
                external_dir=str(step_dir), ot_lambda=1e-3)
res = run_batch(cfg)
print("\n   t   true    IUPM     AC")
for rec in res.records:
    print(f"  {rec['t']:3d}  {rec['acc_true']:.3f}   "
          f"{rec['estimates']['IUPM']:.3f}   {rec['estimates']['AC']:.3f}")
print("\nMAE:", {m: None if v is None else round(v, 4)
                 for m, v in res.summary["mae"].items()})
