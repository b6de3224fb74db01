"""Command line surface, driven in-process through main(argv)."""

import json

import numpy as np
import pytest

from driftmon.cli import main
from driftmon.datasets import ShiftStream
from driftmon.intervention import InterventionPolicy
from driftmon.mlp import TrainConfig
from driftmon.runner import RunConfig, config_to_dict


def write_config(tmp_path, **kw):
    stream = ShiftStream(dataset="moons", shift="rotation", magnitude=2.0,
                         steps=4, samples_per_step=30, train_size=80,
                         noise=0.2, seed=2)
    base = dict(run_id="cli", output_dir=str(tmp_path / "out"), stream=stream,
                ot_lambda=1e-3, train=TrainConfig(epochs=200),
                policy=InterventionPolicy(threshold=0.05))
    base.update(kw)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(config_to_dict(RunConfig(**base))), encoding="utf-8")
    return path


def test_run_success(tmp_path, capsys):
    cfg = write_config(tmp_path)
    assert main(["run", "--config", str(cfg)]) == 0
    out = capsys.readouterr().out
    assert "run cli: 4 steps" in out
    assert "MAE IUPM:" in out
    assert (tmp_path / "out" / "cli" / "summary.json").exists()


def test_run_bad_config_exits_2(tmp_path, capsys):
    path = tmp_path / "cfg.json"
    path.write_text('{"run_id": "x", "nonsense": 1}', encoding="utf-8")
    assert main(["run", "--config", str(path)]) == 2
    assert "config error" in capsys.readouterr().err


def test_run_missing_config_file_exits_2(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "absent.json")]) == 2
    assert "cannot read config" in capsys.readouterr().err


def test_run_invalid_json_exits_2(tmp_path, capsys):
    path = tmp_path / "cfg.json"
    path.write_text("{not json", encoding="utf-8")
    assert main(["run", "--config", str(path)]) == 2
    assert "not valid JSON" in capsys.readouterr().err


def test_divergent_training_exits_3(tmp_path, capsys):
    cfg = write_config(tmp_path, policy=None,
                       train=TrainConfig(learning_rate=1e155, epochs=40))
    with np.errstate(all="ignore"):
        assert main(["run", "--config", str(cfg)]) == 3
    assert "numerical failure" in capsys.readouterr().err


def test_verify_round_trip(tmp_path, capsys):
    cfg = write_config(tmp_path)
    main(["run", "--config", str(cfg)])
    capsys.readouterr()
    run_dir = tmp_path / "out" / "cli"
    assert main(["verify", "--run-dir", str(run_dir)]) == 0
    assert "consistent" in capsys.readouterr().out


def test_verify_detects_edits(tmp_path, capsys):
    cfg = write_config(tmp_path)
    main(["run", "--config", str(cfg)])
    run_dir = tmp_path / "out" / "cli"
    summ = json.loads((run_dir / "summary.json").read_text())
    summ["n_steps"] += 1
    (run_dir / "summary.json").write_text(json.dumps(summ), encoding="utf-8")
    capsys.readouterr()
    assert main(["verify", "--run-dir", str(run_dir)]) == 1
    assert "INCONSISTENT" in capsys.readouterr().out


def test_verify_missing_dir_exits_2(tmp_path):
    assert main(["verify", "--run-dir", str(tmp_path / "nope")]) == 2


def test_sweep_table(tmp_path, capsys):
    cfg = write_config(tmp_path)
    assert main(["sweep", "--config", str(cfg), "--thresholds", "0.3,0.05"]) == 0
    out = capsys.readouterr().out
    assert "threshold" in out.splitlines()[0]
    assert len(out.splitlines()) == 3
    assert (tmp_path / "out" / "cli-sweep.json").exists()


def test_sweep_bad_threshold_list(tmp_path, capsys):
    cfg = write_config(tmp_path)
    assert main(["sweep", "--config", str(cfg), "--thresholds", "a,b"]) == 2
    assert "bad threshold list" in capsys.readouterr().err


def test_unknown_command_rejected(capsys):
    with pytest.raises(SystemExit):
        main(["frobnicate"])
