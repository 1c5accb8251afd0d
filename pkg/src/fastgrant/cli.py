"""Command-line entry point.

    fastgrant list
    fastgrant validate --config FILE
    fastgrant run EXPERIMENT [--config FILE] [--seed S] [--reps R] [--out DIR] [--jobs J]
    fastgrant reproduce MANIFEST [--out DIR]
"""
from __future__ import annotations

import argparse
import configparser
import logging
import sys
from pathlib import Path

from .config import ConfigError, ScenarioConfig, config_from_overrides, load_config
from .experiments import (
    EXPERIMENTS,
    run_experiment,
    sweep_prediction_error,
    write_manifest,
    write_result,
    write_summary,
)

EXIT_OK, EXIT_USAGE, EXIT_CONFIG = 0, 2, 3

log = logging.getLogger("fastgrant")


def build_parser():
    p = argparse.ArgumentParser(prog="fastgrant", description="Fast uplink grant with NOMA pairing simulator")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="list registered experiments")

    v = sub.add_parser("validate", help="check a configuration file")
    v.add_argument("--config", required=True, type=Path)

    r = sub.add_parser("run", help="run a named experiment")
    r.add_argument("experiment")
    r.add_argument("--config", type=Path)
    r.add_argument("--seed", type=int)
    r.add_argument("--reps", type=int, default=1)
    r.add_argument("--out", type=Path, default=Path("results"))
    r.add_argument("--jobs", type=int, default=1)
    r.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="override one scenario parameter (repeatable)")
    r.add_argument("--no-figures", action="store_true")
    r.add_argument("-q", "--quiet", action="store_true")

    m = sub.add_parser("reproduce", help="rerun the experiment recorded in a manifest")
    m.add_argument("manifest", type=Path)
    m.add_argument("--out", type=Path, default=Path("results"))
    m.add_argument("--jobs", type=int, default=1)
    m.add_argument("--no-figures", action="store_true")
    return p


def resolve_config(config_path, overrides, seed) -> ScenarioConfig:
    cfg = load_config(config_path, validate=False) if config_path else ScenarioConfig()
    pairs = {}
    for item in overrides:
        if "=" not in item:
            raise ConfigError([f"override {item!r} is not KEY=VALUE"])
        k, val = item.split("=", 1)
        pairs[k.strip()] = val
    cfg = config_from_overrides(pairs, cfg)
    if seed is not None:
        cfg = cfg.replace(rng_seed=seed)
    return cfg.validate()


def run(experiment, cfg, reps, out, jobs=1, figures=True):
    exp = EXPERIMENTS[experiment]
    outdir = Path(out) / experiment
    outdir.mkdir(parents=True, exist_ok=True)
    seed = cfg.rng_seed
    log.info("running %s: %d replication(s), %d cycles, seed %d", experiment, reps, cfg.n_cycles, seed)
    if exp.sweep:
        results = sweep_prediction_error(cfg, exp.sweep, reps, exp.variants, seed, jobs)
        rows = {}
        for err, res in results.items():
            write_result(outdir, res, suffix=f"-ep{err:g}")
            rows.update({f"{v}@{err:g}": s for v, s in res.summaries.items()})
        write_summary(outdir / "summary.csv", rows)
        payload = results
    else:
        payload = run_experiment(cfg, reps, exp.variants, seed, jobs)
        write_result(outdir, payload)
        write_summary(outdir / "summary.csv", payload.summaries)
    write_manifest(outdir / "manifest.ini", experiment, cfg, seed, reps)
    if figures:
        from .plotting import plot_experiment

        plot_experiment(outdir, exp, payload)
    log.info("wrote %s", outdir)
    return outdir


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING if getattr(args, "quiet", False) else logging.INFO,
                        stream=sys.stderr, format="%(message)s")

    if args.command == "list":
        for name, exp in EXPERIMENTS.items():
            print(f"{name:18s} {exp.description}")
        return EXIT_OK

    try:
        if args.command == "validate":
            load_config(args.config)
            print(f"{args.config}: ok")
            return EXIT_OK

        if args.command == "reproduce":
            parser = configparser.ConfigParser(interpolation=None)
            parser.read(args.manifest)
            run_info = parser["run"]
            cfg = load_config(args.manifest)
            run(run_info["experiment"], cfg, int(run_info["replications"]), args.out, args.jobs,
                not args.no_figures)
            return EXIT_OK

        if args.experiment not in EXPERIMENTS:
            print(f"unknown experiment {args.experiment!r}; choose from: {', '.join(EXPERIMENTS)}",
                  file=sys.stderr)
            return EXIT_USAGE
        cfg = resolve_config(args.config, args.overrides, args.seed)
        run(args.experiment, cfg, args.reps, args.out, args.jobs, not args.no_figures)
        return EXIT_OK
    except ConfigError as e:
        print("invalid configuration:", file=sys.stderr)
        for v in e.violations:
            print(f"  - {v}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
