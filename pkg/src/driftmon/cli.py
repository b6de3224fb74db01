"""Command line entry points: run, sweep, serve, verify.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from driftmon import runner, server


def _load_config(path: str) -> runner.RunConfig:
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise runner.ConfigError(f"cannot read config: {exc}") from exc
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise runner.ConfigError(f"config is not valid JSON: {exc}") from exc
    return runner.config_from_dict(data)


def _cmd_run(args) -> int:
    cfg = _load_config(args.config)
    res = runner.run_batch(cfg)
    print(f"run {cfg.run_id}: {res.summary['n_steps']} steps, "
          f"{res.summary['n_interventions']} interventions")
    for m, v in res.summary["mae"].items():
        print(f"  MAE {m}: {'n/a' if v is None else f'{v:.4f}'}")
    print(f"artifacts: {res.run_dir}")
    return 0


def _cmd_sweep(args) -> int:
    cfg = _load_config(args.config)
    try:
        thresholds = [float(v) for v in args.thresholds.split(",") if v.strip()]
    except ValueError as exc:
        raise runner.ConfigError(f"bad threshold list: {exc}") from exc
    rows = runner.sweep(cfg, thresholds)
    print(f"{'threshold':>10} {'MAE':>8} {'n_I':>5} {'dMAE':>8} {'dn_I':>5}")
    for r in rows:
        dm = "" if r["delta_mae"] is None else f"{r['delta_mae']:+.4f}"
        dn = "" if r["delta_n_interventions"] is None else f"{r['delta_n_interventions']:+d}"
        print(f"{r['threshold']:>10g} {r['mae']:>8.4f} "
              f"{r['n_interventions']:>5d} {dm:>8} {dn:>5}")
    return 0


def _cmd_serve(args) -> int:
    cfg = _load_config(args.config)
    server.serve(cfg, port=args.port)
    return 0


def _cmd_verify(args) -> int:
    report = runner.verify(args.run_dir)
    if report["ok"]:
        print(f"{args.run_dir}: summary consistent with step log")
        return 0
    print(f"{args.run_dir}: INCONSISTENT: {', '.join(report['mismatches'])}")
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="driftmon",
        description="label-free accuracy monitoring under gradual drift")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a batch run with oracle labels")
    p_run.add_argument("--config", required=True)
    p_run.set_defaults(fn=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="repeat a run across thresholds")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--thresholds", required=True,
                         help="comma separated, e.g. 0.2,0.1,0.02")
    p_sweep.set_defaults(fn=_cmd_sweep)

    p_serve = sub.add_parser("serve", help="interactive run over HTTP")
    p_serve.add_argument("--config", required=True)
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.set_defaults(fn=_cmd_serve)

    p_verify = sub.add_parser("verify", help="recheck a run directory")
    p_verify.add_argument("--run-dir", required=True)
    p_verify.set_defaults(fn=_cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except runner.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except runner.NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
