"""Command-line entry point: run experiments and analyze memory dumps.

``impb run`` executes every configured (variant, seed) pair and writes,
per run, a curves CSV, a policy-size histogram CSV and a memory dump,
plus one manifest capturing the fully resolved configuration.
``impb analyze`` recomputes a histogram from an existing dump.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import evaluation, learner
from .config import ConfigError, load_config, resolve
from .evaluation import generate_benchmark, policy_size_histogram
from .memory import Memory
from .spaces import N_SPACES

HIST_QUERIES = 10000
HIST_SEED = 0


def _parse_space(text: str) -> int:
    name = text.strip().lower()
    if name.startswith("omega"):
        name = name[5:]
    try:
        space = int(name)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad task space {text!r}")
    if space not in range(N_SPACES):
        raise argparse.ArgumentTypeError(f"task space must be 0..{N_SPACES - 1}")
    return space


def _write_curves(path, rows, variant, seed):
    with open(path, "w") as fh:
        fh.write(
            "episode,"
            + ",".join(f"err_omega{s}" for s in range(N_SPACES))
            + ",global_err,variant,seed\n"
        )
        for episode, per_space, global_err in rows:
            errs = ",".join(repr(e) for e in per_space)
            fh.write(f"{episode},{errs},{repr(global_err)},{variant},{seed}\n")


def _write_hist(path, hists):
    with open(path, "w") as fh:
        fh.write("space,size,count\n")
        for space in sorted(hists):
            for size in sorted(hists[space]):
                fh.write(f"{space},{size},{hists[space][size]}\n")


def cmd_run(args) -> int:
    try:
        flat = load_config(args.config)
        spec = resolve(flat, args.variant, args.seed, args.episodes)
    except (ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    benchmark = generate_benchmark(spec.benchmark_scale, spec.benchmark_seed)

    manifest = {
        "config": {k: list(v) if isinstance(v, tuple) else v for k, v in spec.flat.items()},
        "runs": [{"variant": v, "seed": s} for v, s in spec.runs],
        "benchmark_points": benchmark.total,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")

    for variant, seed in spec.runs:
        cfg = spec.learner_config(variant, seed)
        memory, rows = learner.run(cfg, benchmark, evaluation.evaluate)
        stem = f"{variant}_{seed}"
        _write_curves(out / f"{stem}_curves.csv", rows, variant, seed)
        memory.dump(out / f"{stem}_memory.jsonl")
        rng = np.random.default_rng(HIST_SEED)
        hists = {
            s: policy_size_histogram(memory, s, HIST_QUERIES, rng)
            for s in range(N_SPACES)
        }
        _write_hist(out / f"{stem}_hist.csv", hists)
        print(f"{stem}: {len(memory)} memory entries, {len(rows)} checkpoints")
    return 0


def cmd_analyze(args) -> int:
    try:
        memory = Memory.load(args.memory)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: cannot read memory dump: {exc}", file=sys.stderr)
        return 1
    rng = np.random.default_rng(args.seed)
    hist = policy_size_histogram(memory, args.space, args.queries, rng)
    if not hist and args.queries > 0:
        print(f"warning: no entries for space {args.space}", file=sys.stderr)
    _write_hist(args.out, {args.space: hist})
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="impb", description="Procedure-babbling arm experiments"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one variant or the full comparison")
    p_run.add_argument("--config", default=None, help="flat key = value config file")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--variant", default=None, choices=learner.VARIANTS)
    p_run.add_argument("--seed", type=int, default=None)
    p_run.add_argument("--episodes", type=int, default=None)
    p_run.set_defaults(func=cmd_run)

    p_an = sub.add_parser("analyze", help="policy-size histogram from a memory dump")
    p_an.add_argument("--memory", required=True)
    p_an.add_argument("--space", type=_parse_space, required=True)
    p_an.add_argument("--queries", type=int, default=1000000)
    p_an.add_argument("--seed", type=int, default=0)
    p_an.add_argument("--out", default="histogram.csv")
    p_an.set_defaults(func=cmd_analyze)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
