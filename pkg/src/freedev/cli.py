"""Command line entry point: ``freedev <experiment> --config cfg.json --out dir``."""

from __future__ import annotations

import argparse
import json
import sys

from .experiments import KINDS, ConfigError, ExperimentConfig, emit_report, run_experiment

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="freedev", description="Run a seeded experiment and write CSV/JSON/SVG reports.")
    ap.add_argument("experiment", choices=KINDS)
    ap.add_argument("--config", required=True, help="JSON config with \"schema\": \"1\"")
    ap.add_argument("--out", required=True, help="output directory")
    ap.add_argument("--seed", type=int, help="override the config seed")
    ap.add_argument("--workers", type=int, help="worker processes for replicates")
    return ap


def load_config(path, experiment: str, seed=None, workers=None) -> ExperimentConfig:
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ConfigError("config must be a JSON object")
    named = obj.get("experiment")
    if named is not None and named != experiment:
        raise ConfigError(f"config is for {named!r}, not {experiment!r}")
    obj = {**obj, "experiment": experiment}
    if seed is not None:
        obj["seed"] = seed
    if workers is not None:
        if workers < 1:
            raise ConfigError("workers must be >= 1")
        obj["workers"] = workers
    return ExperimentConfig.from_json(obj)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.experiment, args.seed, args.workers)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    report = run_experiment(cfg)
    try:
        paths = emit_report(report, args.out, cfg)
    except OSError as exc:
        print(f"cannot write report: {exc}", file=sys.stderr)
        return EXIT_FAIL
    for v in report.verdicts:
        print(f"{v.status:8s} {v.name}  value={v.value}  threshold={v.threshold}")
    for kind, path in paths.items():
        print(f"wrote {kind}: {path}")
    return EXIT_OK if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
