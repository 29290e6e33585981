"""
Command line entry point.

    aifpong run [CONFIG.json] [--preset CFL-4] [--agent cfl --memory 4] [--trials 100]
                [--episodes 70] [--seed 7] [--out DIR]
    aifpong summarize DIR
    aifpong compare DIR [DIR ...]

Exit codes: 0 success, 1 configuration error, 2 runtime failure.
"""

import argparse
import dataclasses
import json
import logging
import sys
from pathlib import Path

from .harness import PRESETS, ConfigError, ExperimentConfig, run_experiment, summarize_dir

OVERRIDES = {
    "agent": ("agent", str),
    "memory": ("memory", int),
    "horizon": ("horizon", int),
    "trials": ("trials", int),
    "episodes": ("episodes_per_trial", int),
    "seed": ("base_seed", int),
    "out": ("out_dir", str),
    "hit_halfwidth": ("hit_halfwidth", int),
    "max_steps": ("max_steps", int),
    "precision": ("precision", float),
    "replan_mode": ("replan_mode", str),
    "trace_interval": ("trace_interval", int),
}


def build_parser():
    p = argparse.ArgumentParser(prog="aifpong", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment")
    run.add_argument("config", nargs="?", help="JSON config file")
    run.add_argument("--preset", choices=sorted(PRESETS), help="benchmark group preset")
    for flag, (_, kind) in OVERRIDES.items():
        run.add_argument(f"--{flag.replace('_', '-')}", dest=flag, type=kind)

    s = sub.add_parser("summarize", help="recompute summary files of a run directory")
    s.add_argument("dir")

    c = sub.add_parser("compare", help="tabulate summaries of several runs")
    c.add_argument("dirs", nargs="+")
    return p


def load_config(args):
    data = {}
    if args.preset:
        data.update(PRESETS[args.preset])
    if args.config:
        with open(args.config) as f:
            data.update(json.load(f))
    for flag, (name, _) in OVERRIDES.items():
        value = getattr(args, flag)
        if value is not None:
            data[name] = value
    return ExperimentConfig.from_dict(data).validate()


def _num(x, fmt="{:.3f}"):
    return "-" if x is None else fmt.format(x)


def compare(dirs, stream=None):
    stream = sys.stdout if stream is None else stream
    rows = []
    for d in dirs:
        path = Path(d) / "summary.json"
        summary = json.loads(path.read_text()) if path.exists() else summarize_dir(d)
        for metric, st in summary["metrics"].items():
            rows.append((summary["group"], metric, st["first_mean"], st["last_mean"],
                         st["relative_improvement"], st["p_improvement"]))
    print(f"{'group':8} {'metric':15} {'first5':>8} {'last15':>8} {'rel_imp':>8} {'p':>8}", file=stream)
    for g, m, f, l, r, p in rows:
        print(f"{g:8} {m:15} {_num(f):>8} {_num(l):>8} {_num(r):>8} {_num(p, '{:.2g}'):>8}",
              file=stream)
    return rows


def main(argv=None):
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            config = load_config(args)
            if config.out_dir is None:
                config = dataclasses.replace(config, out_dir=f"runs/{config.group}")
            manifest = run_experiment(config)
            if manifest["failed_trials"]:
                logging.error("failed trials: %s", manifest["failed_trials"])
                return 2
            compare([config.out_dir])
        elif args.command == "summarize":
            summarize_dir(args.dir)
            compare([args.dir])
        else:
            compare(args.dirs)
    except (ConfigError, json.JSONDecodeError) as exc:
        logging.error("%s", exc)
        return 1
    except (OSError, RuntimeError) as exc:
        logging.error("%s", exc)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
