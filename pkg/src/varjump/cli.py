"""varjump <experiment> [--config PATH] [--seed S] [--out DIR] [--format csv,json,svg]

Exit status: 0 all verdicts pass, 1 some verdict fails, 2 bad configuration.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from . import _backend
from .config import EXPERIMENTS, ConfigError, defaults_for, parse_config
from .experiments import ExperimentError, run_experiment
from .report import FORMATS, emit_report


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="varjump", description="Run a jump/variation verification experiment.")
    p.add_argument("experiment", choices=EXPERIMENTS + ("list",))
    p.add_argument("--config", help="sectioned key = value file; defaults apply when omitted")
    p.add_argument("--seed", type=int, help="override the master seed")
    p.add_argument("--out", help="output directory (default: [experiment] out, then runs/)")
    p.add_argument("--format", default="csv,json", help=f"comma list from {','.join(FORMATS)}")
    p.add_argument("-q", "--quiet", action="store_true", help="print only the overall verdict")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.experiment == "list":
        for name in EXPERIMENTS:
            print(name)
        return 0
    try:
        if args.config:
            try:
                text = open(args.config).read()
            except OSError as e:
                raise ConfigError([f"cannot read config {args.config}: {e.strerror}"]) from None
            cfg = parse_config(text, args.experiment)
            if cfg.experiment != args.experiment:
                raise ConfigError([f"config names experiment {cfg.experiment!r}, command line {args.experiment!r}"])
        else:
            cfg = defaults_for(args.experiment)
        formats = tuple(f.strip() for f in args.format.split(",") if f.strip())
        bad = [f for f in formats if f not in FORMATS]
        if bad:
            raise ConfigError([f"unknown format(s): {', '.join(bad)}"])
    except ConfigError as e:
        for msg in e.errors:
            print(f"config error: {msg}", file=sys.stderr)
        return 2
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.out:
        cfg = replace(cfg, out=args.out)
    try:
        report = run_experiment(cfg)
    except ExperimentError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    try:
        paths = emit_report(report, cfg.out, formats)
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    if not args.quiet:
        print(f"{cfg.experiment} (seed {cfg.seed}, backend {_backend.NAME}): {len(report.rows)} cases")
        for v in report.verdicts:
            tag = "PASS" if v.passed else "FAIL"
            crit = f"[{v.criterion}] " if v.criterion else ""
            note = f" ({v.note})" if v.note else ""
            print(f"  {tag} {crit}{v.name}: {v.measured:.6g} vs {v.bound:.6g}{note}")
        for p in paths:
            print(f"  wrote {p}")
    print("PASS" if report.passed else "FAIL")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
