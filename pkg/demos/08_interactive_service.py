"""
The interactive labeling service, driven end to end
===================================================

In production the runner does not know true labels; a human answers label
queries over HTTP.  This script embeds the FastAPI app in-process and plays
both sides: it advances the run, and whenever the service parks in
AWAITING_LABELS it submits labels like an annotator would (here: oracle
truth, since the demo stream is synthetic).

The same server comes up standalone via `driftmon serve --config cfg.json`.
"""

from fastapi.testclient import TestClient

from driftmon.datasets import ShiftStream
from driftmon.intervention import InterventionPolicy
from driftmon.mlp import TrainConfig
from driftmon.runner import RunConfig
from driftmon.server import RunSession, create_app

cfg = RunConfig(
    run_id="interactive-demo",
    output_dir="runs",
    stream=ShiftStream(dataset="moons", shift="rotation", magnitude=4.0,
                       steps=6, samples_per_step=40, train_size=150, seed=6),
    ot_lambda=1e-3,
    train=TrainConfig(epochs=600),
    labeler="human",
    policy=InterventionPolicy(threshold=0.5),
    force_steps=(2, 5),  # make the demo deterministic
)

session = RunSession(cfg)
client = TestClient(create_app([session]))

print(client.get("/runs/interactive-demo").json()["status"], "-> advancing")
while True:
    out = client.post("/runs/interactive-demo/advance").json()
    if out["status"] == "AWAITING_LABELS":
        pending = out["pending"]
        print(f"  step {pending['step']}: service asks for "
              f"{len(pending['indices'])} labels")
        batch = session.run.feed.batches[pending["step"]]
        payload = {
            "step": pending["step"],
            "labels": [{"index": i, "class": int(batch.labels[i])}
                       for i in pending["indices"]],
        }
        out = client.post("/runs/interactive-demo/labels", json=payload).json()
        rec = out["record"]
        print(f"    estimate {rec['estimates']['IUPM']:.3f} -> "
              f"{rec['estimate_post']:.3f} after labeling")
    elif out["status"] == "DONE":
        break
    else:
        rec = out["record"]
        print(f"  step {rec['t']}: estimate {rec['estimates']['IUPM']:.3f}, "
              f"wall {rec['wall_time'] * 1000:.0f} ms")

print("DONE")
steps = client.get("/runs/interactive-demo/steps").json()["records"]
print(f"{len(steps)} records on disk; smoothness trace:",
      [round(v, 3) for v in client.get("/runs/interactive-demo/trace").json()["cum_bound"]])
