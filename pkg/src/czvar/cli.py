"""Command line entry point: ``czvar <experiment> --config FILE``.

Exit codes: 0 when every check passes, 1 when a check fails, 2 on bad
input (unreadable or invalid config, rho <= 2 for operator bound experiments,
h > eps_min / 10 without ``--allow-floor``).
"""
from __future__ import annotations

import argparse
import sys
import warnings

from .errors import ConfigError, DomainError
from .experiments import EXPERIMENTS, ExperimentConfig, emit_report, run_experiment

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="czvar", description="Run a seeded singular-integral experiment.")
    p.add_argument("experiment", choices=sorted(EXPERIMENTS))
    p.add_argument("--config", required=True, help="JSON experiment configuration")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--out", default=None, help="output directory for CSV reports")
    p.add_argument("--allow-floor", action="store_true",
                   help="allow quadrature resolution above eps_min / 10")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_PASS
    try:
        with open(args.config) as fh:
            cfg = ExperimentConfig.from_json(fh.read())
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ConfigError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    cfg.experiment = args.experiment
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.out = args.out
    if args.allow_floor:
        cfg.allow_floor = True
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            result = run_experiment(cfg)
    except (ConfigError, DomainError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    summary = emit_report(result, cfg.out)
    sys.stdout.write(summary)
    return EXIT_PASS if result.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
