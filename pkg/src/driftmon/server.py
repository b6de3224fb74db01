"""HTTP surface for interactive runs: advance, pending queries, labels.

One session per run, serialized by a per-run lock.  A triggered step parks
the run in AWAITING_LABELS with its query persisted, so a process restart
can rebuild the exact state by replaying the completed step log and
re-deriving the in-flight step (all estimation is deterministic).
"""

from __future__ import annotations

import json
import os
import threading
import time
from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from driftmon import runner as rn

INIT = "INIT"
RUNNING = "RUNNING"
AWAITING_LABELS = "AWAITING_LABELS"
DONE = "DONE"


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, detail=None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message
        self.detail = detail


class RunSession:
    """State machine wrapper over a Run: INIT -> RUNNING <-> AWAITING_LABELS -> DONE."""

    def __init__(self, cfg: rn.RunConfig, resume: bool = False):
        cfg.validate()
        if cfg.labeler != "human":
            raise rn.ConfigError("interactive sessions require the human labeler")
        self.lock = threading.Lock()
        self.run = rn.Run(cfg)
        self.status = INIT
        self.pending = None
        self._step_started = None
        if resume:
            self._replay()
        else:
            self.run.open_dir()

    @property
    def cfg(self) -> rn.RunConfig:
        return self.run.cfg

    def _pending_path(self) -> Path:
        return self.run.run_dir / "pending.json"

    def _replay(self) -> None:
        """Restore state from the run directory written by a previous process."""
        run_dir = self.run.run_dir
        if not (run_dir / "config.json").exists():
            raise rn.ConfigError(f"{run_dir} has no config.json to resume from")
        for rec in rn.load_records(run_dir):
            _, query = self.run.begin_step()
            labels = rec["intervention"]["labels_used"] if query else None
            replayed = self.run.finish_step(labels)
            if replayed["t"] != rec["t"]:
                raise rn.ConfigError(f"step log does not replay: step {rec['t']}")
            # keep the log's record (with its wall time) as source of truth
            self.run.records[-1] = rec
        if self._pending_path().exists():
            _, query = self.run.begin_step()
            if query is None:
                raise rn.ConfigError("pending query does not replay")
            self.pending = query
            self.status = AWAITING_LABELS
            self._step_started = time.monotonic()
        elif self.run.t >= self.run.n_steps:
            self.status = DONE
        elif self.run.t > 0:
            self.status = RUNNING

    def info(self) -> dict:
        return {
            "run_id": self.cfg.run_id,
            "status": self.status,
            "t": self.run.t,
            "n_steps": self.run.n_steps,
        }

    def advance(self) -> dict:
        with self.lock:
            if self.status == AWAITING_LABELS:
                raise ApiError(409, "awaiting_labels",
                               "run is waiting for label submission",
                               {"step": self.pending["step"]})
            if self.status == DONE:
                raise ApiError(409, "run_done", "run already completed")
            self._step_started = time.monotonic()
            rec, query = self.run.begin_step()
            if query is not None:
                self.pending = query
                self.status = AWAITING_LABELS
                rn._write_atomic(self._pending_path(),
                                 json.dumps(query, indent=2) + "\n")
                return {"status": self.status,
                        "pending": self._pending_body()}
            rec = self.run.finish_step(None)
            rec["wall_time"] = time.monotonic() - self._step_started
            self.run.append_record(rec)
            self._complete_if_last()
            return {"status": self.status, "record": rec}

    def _pending_body(self) -> dict:
        return {
            "run_id": self.cfg.run_id,
            "step": self.pending["step"],
            "indices": self.pending["indices"],
            "features": self.pending["features"],
            "n_classes": self.pending["K"],
        }

    def submit_labels(self, step, labels) -> dict:
        with self.lock:
            if self.status != AWAITING_LABELS:
                raise ApiError(409, "wrong_state",
                               "no label query is pending", {"status": self.status})
            if step != self.pending["step"]:
                raise ApiError(409, "stale_step",
                               "submission targets a different step",
                               {"pending_step": self.pending["step"], "got": step})
            want = self.pending["indices"]
            K = self.pending["K"]
            if not isinstance(labels, list):
                raise ApiError(422, "bad_labels", "labels must be a list")
            by_index = {}
            for item in labels:
                if (not isinstance(item, dict)
                        or not isinstance(item.get("index"), int)
                        or not isinstance(item.get("class"), int)):
                    raise ApiError(422, "bad_labels",
                                   "each label needs integer index and class",
                                   {"item": item})
                if item["index"] in by_index:
                    raise ApiError(422, "bad_labels", "duplicate index",
                                   {"index": item["index"]})
                by_index[item["index"]] = item["class"]
            if sorted(by_index) != sorted(want):
                raise ApiError(422, "bad_labels",
                               "label set must cover exactly the queried indices",
                               {"expected": want, "got": sorted(by_index)})
            bad = [i for i, c in by_index.items() if not 0 <= c < K]
            if bad:
                raise ApiError(422, "bad_labels", "class out of range",
                               {"indices": bad, "n_classes": K})
            ordered = [by_index[i] for i in want]
            rec = self.run.finish_step(ordered)
            if self._step_started is not None:
                rec["wall_time"] = time.monotonic() - self._step_started
            self.run.append_record(rec)
            sd_post = self.run.last_query_sd_post
            self.pending = None
            try:
                os.remove(self._pending_path())
            except FileNotFoundError:
                pass
            self._complete_if_last()
            return {"status": self.status, "record": rec,
                    "queried_sd_post": sd_post}

    def _complete_if_last(self) -> None:
        if self.run.t >= self.run.n_steps:
            self.status = DONE
            self.run.write_final()
        else:
            self.status = RUNNING

    def trace_body(self) -> dict:
        tr = self.run.smoothness_trace()
        if tr is None:
            raise ApiError(409, "no_labels",
                           "smoothness trace needs ground-truth labels")
        return {
            "t": list(range(1, len(tr.eps_hat) + 1)),
            "eps_hat": tr.eps_hat,
            "L_hat": tr.L_hat,
            "shift_strength": tr.shift_strength,
            "cum_bound": tr.cumulative_bound,
        }


def create_app(sessions: list) -> FastAPI:
    app = FastAPI(title="driftmon", docs_url=None, redoc_url=None)
    # the console is opened straight from disk, so its origin is opaque
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])
    app.state.sessions = {s.cfg.run_id: s for s in sessions}

    def session(run_id: str) -> RunSession:
        s = app.state.sessions.get(run_id)
        if s is None:
            raise ApiError(404, "unknown_run", f"no run {run_id!r}")
        return s

    @app.exception_handler(ApiError)
    async def _api_error(_req: Request, exc: ApiError):
        return JSONResponse(
            {"code": exc.code, "message": exc.message, "detail": exc.detail},
            status_code=exc.status)

    @app.get("/runs")
    def list_runs():
        return [s.info() for s in app.state.sessions.values()]

    @app.get("/runs/{run_id}")
    def run_info(run_id: str):
        s = session(run_id)
        body = s.info()
        body["config"] = rn.config_to_dict(s.cfg)
        body["threshold"] = None if s.cfg.policy is None else s.cfg.policy.threshold
        return body

    @app.get("/runs/{run_id}/steps")
    def steps(run_id: str, from_t: int = Query(default=1, alias="from")):
        s = session(run_id)
        return {"records": [r for r in s.run.records if r["t"] >= from_t]}

    @app.get("/runs/{run_id}/pending")
    def pending(run_id: str):
        s = session(run_id)
        if s.status != AWAITING_LABELS:
            return {"pending": None}
        return {"pending": s._pending_body()}

    @app.post("/runs/{run_id}/labels")
    def labels(run_id: str, body: dict):
        s = session(run_id)
        if not isinstance(body.get("step"), int) or "labels" not in body:
            raise ApiError(422, "bad_request",
                           "body must carry integer step and labels list")
        return s.submit_labels(body["step"], body["labels"])

    @app.post("/runs/{run_id}/advance")
    def advance(run_id: str):
        return session(run_id).advance()

    @app.get("/runs/{run_id}/trace")
    def trace(run_id: str):
        return session(run_id).trace_body()

    return app


def serve(cfg: rn.RunConfig, port: int = 8000, host: str = "127.0.0.1") -> None:
    """Run one interactive session behind uvicorn (resumes if artifacts exist)."""
    import uvicorn

    resume = (Path(cfg.output_dir) / cfg.run_id / "config.json").exists()
    app = create_app([RunSession(cfg, resume=resume)])
    uvicorn.run(app, host=host, port=port, log_level="warning")
