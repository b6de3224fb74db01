"""Run orchestration: config, the monitoring loop, persistence, verification.

A run trains the classifier once, initializes the belief engine on the
labeled step-0 batch, then walks the stream: per step it fans out every
configured accuracy estimator, checks the intervention trigger, applies
labels when fired, and appends one JSON record to steps.jsonl.  Identical
configs produce byte-identical logs in oracle mode, so wall-clock timing is
logged only for interactive runs.
"""

from __future__ import annotations

import csv
import json
import os
import re
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from driftmon import baselines as bl
from driftmon import engine, intervention, mlp, smoothness
from driftmon.datasets import LabeledBatch, ShiftStream, gen_stream
from driftmon.intervention import InterventionPolicy
from driftmon.mlp import TrainConfig

METHODS = ("IUPM", "NIPM", "AC", "DOC", "ATC", "IM")


class ConfigError(ValueError):
    """Invalid run configuration; maps to CLI exit code 2."""


class NumericalFailure(RuntimeError):
    """Training or estimation diverged mid-run; maps to CLI exit code 3."""


@dataclass
class RunConfig:
    """Everything a run needs, serializable to one JSON object.

    `seed` is the master seed: the data stream, classifier init, and random
    intervention draws each get an independent child seed derived from it,
    so switching one concern on or off never perturbs the others.  The
    nested stream/train seeds are ignored inside a run for that reason.
    """

    run_id: str = "run"
    output_dir: str = "runs"
    stream: ShiftStream | None = None
    external_dir: str | None = None
    matching_space: str = "raw"  # raw | hidden
    ot_lambda: float = 1e-4
    # engine default is 10000; runs cap lower because the conditional
    # coupling renormalizes any residual marginal error exactly
    ot_max_iter: int = 1500
    ot_tol: float = 1e-8
    methods: tuple = METHODS
    policy: InterventionPolicy | None = None
    labeler: str = "oracle"  # oracle | human
    train: TrainConfig = field(default_factory=TrainConfig)
    seed: int = 0
    mae_uses_post: bool = True
    force_steps: tuple = ()
    probe: bool = True

    def validate(self) -> None:
        if not self.run_id or not re.fullmatch(r"[A-Za-z0-9._-]+", self.run_id):
            raise ConfigError(f"invalid run id {self.run_id!r}")
        if (self.stream is None) == (self.external_dir is None):
            raise ConfigError("exactly one of stream / external_dir required")
        if self.matching_space not in ("raw", "hidden"):
            raise ConfigError(f"unknown matching space {self.matching_space!r}")
        if self.external_dir is not None and self.matching_space == "hidden":
            raise ConfigError("hidden matching needs a trained model; "
                              "external features are used as provided")
        if not (self.ot_lambda > 0 and np.isfinite(self.ot_lambda)):
            raise ConfigError("ot_lambda must be a positive finite real")
        if not self.methods:
            raise ConfigError("at least one method required")
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise ConfigError(f"unknown methods {unknown}")
        if self.labeler not in ("oracle", "human"):
            raise ConfigError(f"unknown labeler {self.labeler!r}")
        if (self.policy is not None or self.force_steps) and "IUPM" not in self.methods:
            raise ConfigError("interventions require the IUPM method")
        if any((not isinstance(t, int)) or t < 1 for t in self.force_steps):
            raise ConfigError("force_steps must be positive step indices")


def config_to_dict(cfg: RunConfig) -> dict:
    d = {}
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        if f.name in ("stream", "policy", "train"):
            v = None if v is None else {
                sf.name: _plain(getattr(v, sf.name)) for sf in fields(v)
            }
        else:
            v = _plain(v)
        d[f.name] = v
    return d


def _plain(v):
    if isinstance(v, tuple):
        return list(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    return v


def config_from_dict(d: dict) -> RunConfig:
    if not isinstance(d, dict):
        raise ConfigError("config must be a JSON object")
    known = {f.name for f in fields(RunConfig)}
    unknown = set(d) - known
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    kwargs = dict(d)
    try:
        for key, cls in (("stream", ShiftStream), ("policy", InterventionPolicy),
                         ("train", TrainConfig)):
            if kwargs.get(key) is not None:
                sub = dict(kwargs[key])
                for name, val in sub.items():
                    if isinstance(val, list):
                        sub[name] = tuple(val)
                kwargs[key] = cls(**sub)
        if "methods" in kwargs:
            kwargs["methods"] = tuple(kwargs["methods"])
        if "force_steps" in kwargs:
            kwargs["force_steps"] = tuple(int(t) for t in kwargs["force_steps"])
        cfg = RunConfig(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    cfg.validate()
    return cfg


def canonical_config_json(cfg: RunConfig) -> str:
    return json.dumps(config_to_dict(cfg), sort_keys=True, separators=(",", ":"))


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8")
    os.replace(tmp, path)


def _record_line(rec: dict) -> str:
    return json.dumps(rec, separators=(",", ":"), allow_nan=False)


@dataclass
class ExternalBatch:
    features: np.ndarray
    labels: np.ndarray | None
    probs: np.ndarray | None  # K x n when present


def ingest_external(step_dir: str | Path) -> list[ExternalBatch]:
    """Load per-step CSVs `f0..f{d-1}[,label][,p0..p{K-1}]`, sorted by name.

    Feature dimension and class count must be constant across files, and
    each probability row must sum to 1 within 1e-6.
    """
    paths = sorted(Path(step_dir).glob("*.csv"))
    if not paths:
        raise ConfigError(f"no step CSV files in {step_dir}")
    batches = []
    dims = None
    for path in paths:
        with path.open(newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        header = rows[0]
        fcols = [i for i, h in enumerate(header) if re.fullmatch(r"f\d+", h)]
        pcols = [i for i, h in enumerate(header) if re.fullmatch(r"p\d+", h)]
        lcol = header.index("label") if "label" in header else None
        if [header[i] for i in fcols] != [f"f{j}" for j in range(len(fcols))]:
            raise ConfigError(f"{path.name}: feature columns must be f0..f{{d-1}}")
        if [header[i] for i in pcols] != [f"p{j}" for j in range(len(pcols))]:
            raise ConfigError(f"{path.name}: probability columns must be p0..p{{K-1}}")
        if not fcols:
            raise ConfigError(f"{path.name}: no feature columns")
        key = (len(fcols), len(pcols))
        if dims is None:
            dims = key
        elif key != dims:
            raise ConfigError(f"{path.name}: dimensions {key} differ from {dims}")
        feats, labs, probs = [], [], []
        for rnum, row in enumerate(rows[1:], start=2):
            if not row:
                continue
            try:
                feats.append([float(row[i]) for i in fcols])
                if lcol is not None:
                    labs.append(int(row[lcol]))
                if pcols:
                    p = [float(row[i]) for i in pcols]
                    if abs(sum(p) - 1.0) > 1e-6:
                        raise ConfigError(
                            f"{path.name} row {rnum}: probabilities sum to "
                            f"{sum(p):.6f}, expected 1")
                    probs.append(p)
            except ConfigError:
                raise
            except ValueError as exc:
                raise ConfigError(f"{path.name} row {rnum}: {exc}") from exc
        batches.append(ExternalBatch(
            np.array(feats, dtype=float),
            np.array(labs, dtype=int) if lcol is not None else None,
            np.array(probs, dtype=float).T if pcols else None,
        ))
    return batches


@dataclass
class RunResult:
    run_dir: Path
    summary: dict
    records: list


class _Steps:
    """Per-run data feed: features to match, model probabilities, truth."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.model = None
        if cfg.stream is not None:
            ss = np.random.SeedSequence(cfg.seed).spawn(3)
            stream = replace(cfg.stream, seed=int(ss[0].generate_state(1)[0]))
            clf_seed = int(ss[1].generate_state(1)[0])
            self.ri_seed = int(ss[2].generate_state(1)[0])
            batches = list(gen_stream(stream))
            train, omega0, rest = batches[0], batches[1], batches[2:]
            tc = replace(cfg.train, seed=clf_seed)
            try:
                self.model = mlp.train(train.features, train.labels, tc)
            except FloatingPointError as exc:
                raise NumericalFailure(f"classifier training failed: {exc}") from exc
            self.K = int(train.labels.max()) + 1
            self.batches = [omega0] + rest
            self.train_batch = train
        else:
            ext = ingest_external(cfg.external_dir)
            first = ext[0]
            if first.labels is None:
                raise ConfigError("the first external step file must carry labels"
                                  " to initialize the belief engine")
            if first.probs is None:
                raise ConfigError("external step files need probability columns")
            self.ri_seed = cfg.seed
            self.K = first.probs.shape[0]
            self.batches = [LabeledBatch(b.features, b.labels)
                            if b.labels is not None
                            else _UnlabeledBatch(b.features)
                            for b in ext]
            self._ext_probs = [b.probs for b in ext]
            if self.cfg.policy is not None and any(
                    b.labels is None for b in ext[1:]):
                raise ConfigError("oracle interventions need labels in every"
                                  " external step file")

    def match_features(self, batch) -> np.ndarray:
        if self.cfg.matching_space == "hidden":
            return self.model.hidden_features(batch.features)
        return batch.features

    def probs(self, t: int) -> np.ndarray:
        if self.model is not None:
            return self.model.predict_proba(self.batches[t].features)
        return self._ext_probs[t]


@dataclass
class _UnlabeledBatch:
    features: np.ndarray
    labels = None


def _null_intervention() -> dict:
    return {"triggered": False, "strategy": None, "m": 0,
            "indices": [], "labels_used": []}


class Run:
    """Stepwise executor shared by the batch runner and the HTTP service.

    Holds the trained model, belief engine state, and baseline calibration;
    `begin_step` advances estimation and reports whether labels are needed,
    `finish_step` applies them (when any) and emits the final StepRecord.
    """

    def __init__(self, cfg: RunConfig):
        cfg.validate()
        self.cfg = cfg
        self.feed = _Steps(cfg)
        self.run_dir = Path(cfg.output_dir) / cfg.run_id
        self.records: list = []
        self.t = 0
        self.n_steps = len(self.feed.batches) - 1
        self._pending = None
        self.last_query_sd_post = None
        omega0 = self.feed.batches[0]
        self.ri_rng = np.random.default_rng(self.feed.ri_seed)
        source_probs = self.feed.probs(0)
        self.cal = bl.calibrate(source_probs, omega0.labels)
        self.source_conf = source_probs.max(axis=0)
        self.state = None
        if "IUPM" in cfg.methods:
            self.state = engine.init(
                self.feed.match_features(omega0), omega0.labels, self.feed.K,
                cfg.ot_lambda, cfg.ot_max_iter, cfg.ot_tol)

    # -- persistence ----------------------------------------------------

    def open_dir(self) -> None:
        self.run_dir.mkdir(parents=True, exist_ok=True)
        _write_atomic(self.run_dir / "config.json",
                      canonical_config_json(self.cfg) + "\n")
        (self.run_dir / "steps.jsonl").write_text("", encoding="utf-8")

    def append_record(self, rec: dict) -> None:
        with (self.run_dir / "steps.jsonl").open("a", encoding="utf-8") as fh:
            fh.write(_record_line(rec) + "\n")
            fh.flush()

    # -- stepping -------------------------------------------------------

    def begin_step(self):
        """Estimate on the next batch.  Returns (record, query_or_None).

        When a query is returned the record is incomplete; pass labels to
        finish_step to resolve it.  Otherwise finish_step(record, None).
        """
        t = self.t + 1
        batch = self.feed.batches[t]
        feats = self.feed.match_features(batch)
        probs = self.feed.probs(t)
        pred = probs.argmax(axis=0)
        conf = probs.max(axis=0)
        cfg = self.cfg

        estimates = {}
        unc_pre = None
        per_sd = None
        try:
            if self.state is not None:
                self.state = engine.advance(self.state, feats)
                estimates["IUPM"] = engine.estimate_accuracy(self.state.belief, pred)
                unc_pre, per_sd = engine.estimate_uncertainty(self.state.belief, pred)
            if "NIPM" in cfg.methods:
                omega0 = self.feed.batches[0]
                estimates["NIPM"] = engine.nipm_estimate(
                    self.feed.match_features(omega0), omega0.labels, self.feed.K,
                    feats, pred, cfg.ot_lambda, cfg.ot_max_iter, cfg.ot_tol)
            if "AC" in cfg.methods:
                estimates["AC"] = bl.ac(probs)
            if "DOC" in cfg.methods:
                estimates["DOC"] = bl.doc(self.cal, probs)
            if "ATC" in cfg.methods:
                estimates["ATC"] = bl.atc_estimate(self.cal.atc_threshold, conf)
            if "IM" in cfg.methods:
                estimates["IM"] = bl.im_estimate(self.cal, self.source_conf, conf)
        except FloatingPointError as exc:
            raise NumericalFailure(f"step {t}: {exc}") from exc

        acc_true = None
        if batch.labels is not None:
            acc_true = float((pred == batch.labels).mean())

        rec = {
            "t": t,
            "n_t": int(len(batch.features)),
            "acc_true": acc_true,
            "estimates": {k: float(v) for k, v in estimates.items()},
            "uncertainty_pre": None if unc_pre is None else float(unc_pre),
            "intervention": _null_intervention(),
            "estimate_post": None,
            "uncertainty_post": None,
            "wall_time": None,
        }

        query = None
        fire = False
        if self.state is not None and cfg.policy is not None and unc_pre is not None:
            fire = intervention.should_trigger(unc_pre, cfg.policy)
        if t in cfg.force_steps:
            fire = True
        if fire:
            policy = cfg.policy or InterventionPolicy()
            m = intervention.budget(len(batch.features), policy)
            if policy.strategy == "UI":
                idx = intervention.select_ui(per_sd, m)
            elif policy.strategy == "CEI":
                idx = intervention.select_cei(self.state.belief.probs, probs, m)
            else:
                idx = intervention.select_ri(len(batch.features), m, self.ri_rng)
            rec["intervention"].update(
                triggered=True, strategy=policy.strategy, m=int(m),
                indices=[int(i) for i in idx])
            # features carry the whole batch so an annotator sees the queried
            # points (indices) in context; labels are owed only for indices
            query = {"step": t, "indices": [int(i) for i in idx],
                     "features": batch.features.tolist(), "K": self.feed.K}
        self._pending = (rec, batch, pred, query)
        return rec, query

    def finish_step(self, labels: list | None) -> dict:
        """Complete the pending step, applying queried labels when present."""
        rec, batch, pred, query = self._pending
        self._pending = None
        if query is not None:
            if labels is None:
                raise ValueError("step has a pending label query")
            idx = np.array(query["indices"], dtype=int)
            labs = np.array(labels, dtype=int)
            engine.apply_labels(self.state, idx, labs)
            rec["intervention"]["labels_used"] = [int(v) for v in labs]
            rec["estimate_post"] = float(
                engine.estimate_accuracy(self.state.belief, pred))
            post, per_sd = engine.estimate_uncertainty(self.state.belief, pred)
            rec["uncertainty_post"] = float(post)
            # pinned columns are one-hot, so these are exact zeros; kept out
            # of the record to leave the step log byte-stable
            self.last_query_sd_post = [float(per_sd[i]) for i in idx]
        self.t = rec["t"]
        self.records.append(rec)
        return rec

    def oracle_labels(self, query: dict) -> list:
        batch = self.feed.batches[query["step"]]
        return [int(batch.labels[i]) for i in query["indices"]]

    # -- end-of-run artifacts --------------------------------------------

    def summary(self) -> dict:
        return summarize(self.records, self.cfg.methods, self.cfg.mae_uses_post)

    def smoothness_trace(self) -> smoothness.SmoothnessTrace | None:
        batches = self.feed.batches[: self.t + 1]
        if any(b.labels is None for b in batches):
            return None
        return smoothness.trace([self.feed.match_features(b) for b in batches],
                                [b.labels for b in batches])

    def write_final(self) -> dict:
        summ = self.summary()
        _write_atomic(self.run_dir / "summary.json",
                      json.dumps(summ, sort_keys=True, indent=2) + "\n")
        if self.cfg.probe:
            tr = self.smoothness_trace()
            if tr is not None:
                _write_atomic(self.run_dir / "trace.csv", tr.to_csv())
        return summ


def summarize(records: list, methods, mae_uses_post: bool) -> dict:
    """Per-method MAE against acc_true plus the intervention count."""
    mae = {}
    for m in methods:
        errs = []
        for rec in records:
            if rec["acc_true"] is None or m not in rec["estimates"]:
                continue
            est = rec["estimates"][m]
            if (m == "IUPM" and mae_uses_post
                    and rec["intervention"]["triggered"]):
                est = rec["estimate_post"]
            errs.append(abs(est - rec["acc_true"]))
        mae[m] = float(np.mean(errs)) if errs else None
    return {
        "n_steps": len(records),
        "mae": mae,
        "n_interventions": sum(1 for r in records if r["intervention"]["triggered"]),
        "mae_uses_post": bool(mae_uses_post),
    }


def run_batch(cfg: RunConfig) -> RunResult:
    """Execute a full oracle-labeled run and write its artifact directory."""
    cfg.validate()
    if cfg.labeler != "oracle":
        raise ConfigError("run_batch requires the oracle labeler; use serve"
                          " for human labeling")
    run = Run(cfg)
    run.open_dir()
    try:
        for _ in range(run.n_steps):
            rec, query = run.begin_step()
            labels = run.oracle_labels(query) if query is not None else None
            rec = run.finish_step(labels)
            run.append_record(rec)
    except NumericalFailure:
        raise
    summ = run.write_final()
    return RunResult(run.run_dir, summ, run.records)


def sweep(cfg: RunConfig, thresholds: list) -> list:
    """run_batch per threshold; rows carry MAE, n_I and their deltas."""
    if not thresholds:
        raise ConfigError("sweep needs at least one threshold")
    if cfg.policy is None:
        raise ConfigError("sweep needs an intervention policy")
    rows = []
    for th in thresholds:
        sub = replace(
            cfg,
            run_id=f"{cfg.run_id}-th{th:g}",
            policy=replace(cfg.policy, threshold=float(th)),
        )
        res = run_batch(sub)
        row = {
            "threshold": float(th),
            "mae": res.summary["mae"].get("IUPM"),
            "n_interventions": res.summary["n_interventions"],
            "delta_mae": None,
            "delta_n_interventions": None,
        }
        if rows:
            row["delta_mae"] = row["mae"] - rows[-1]["mae"]
            row["delta_n_interventions"] = (
                row["n_interventions"] - rows[-1]["n_interventions"])
        rows.append(row)
    out = Path(cfg.output_dir) / f"{cfg.run_id}-sweep.json"
    _write_atomic(out, json.dumps(rows, indent=2) + "\n")
    return rows


def load_records(run_dir: str | Path) -> list:
    path = Path(run_dir) / "steps.jsonl"
    records = []
    with path.open(encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records


def verify(run_dir: str | Path) -> dict:
    """Recompute the summary from the step log and diff against summary.json.

    Returns {"ok": bool, "recomputed": .., "stored": .., "mismatches": [..]}.
    """
    run_dir = Path(run_dir)
    try:
        stored = json.loads((run_dir / "summary.json").read_text(encoding="utf-8"))
        cfg_dict = json.loads((run_dir / "config.json").read_text(encoding="utf-8"))
        records = load_records(run_dir)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"unreadable run directory: {exc}") from exc
    recomputed = summarize(records, tuple(cfg_dict["methods"]),
                           bool(cfg_dict["mae_uses_post"]))
    mismatches = []
    for key in ("n_steps", "n_interventions", "mae_uses_post"):
        if recomputed[key] != stored.get(key):
            mismatches.append(key)
    for m, v in recomputed["mae"].items():
        sv = stored.get("mae", {}).get(m)
        same = (v is None and sv is None) or (
            v is not None and sv is not None and v == sv)
        if not same:
            mismatches.append(f"mae.{m}")
    for rec in records:
        if rec["intervention"]["triggered"]:
            if rec["intervention"]["m"] < 1 or rec["estimate_post"] is None:
                mismatches.append(f"step {rec['t']}: malformed intervention")
    return {"ok": not mismatches, "recomputed": recomputed,
            "stored": stored, "mismatches": mismatches}
