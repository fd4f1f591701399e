"""Batch command line: run | sweep | bench.

Examples::

    agmec run --config base.cfg --seed 0 --agent kernel --out-dir runs/k0
    agmec sweep --config base.cfg --vary n_step=1 --vary n_step=30 \\
        --seeds 0,1,2,3,4 --out-dir runs/nstep
    agmec bench --config base.cfg --seed 0 --out-dir runs/bench

Exit code 0 on success; 2 with a message naming the offending key on a
rejected configuration.
"""

from __future__ import annotations

import argparse
import sys

from agmec.config import ConfigError, describe_keys, load_config
from agmec.runner import run_experiment
from agmec.sweep import sweep, timing_benchmark


def _common_overrides(args: argparse.Namespace) -> dict[str, str]:
    overrides: dict[str, str] = {}
    if args.agent is not None:
        overrides["agent"] = args.agent
    if args.timeslots is not None:
        overrides["timeslots"] = str(args.timeslots)
    if args.n_step is not None:
        overrides["n_step"] = str(args.n_step)
    if args.we is not None:
        overrides["w_e"] = str(args.we)
    if args.wd is not None:
        overrides["w_d"] = str(args.wd)
    if args.set:
        for item in args.set:
            if "=" not in item:
                raise ConfigError(f"--set expects key=value, got {item!r}")
            key, value = item.split("=", 1)
            overrides[key.strip()] = value.strip()
    return overrides


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key = value config file")
    parser.add_argument("--agent", choices=("kernel", "dnn"))
    parser.add_argument("--timeslots", type=int)
    parser.add_argument("--n-step", dest="n_step", type=int)
    parser.add_argument("--we", type=float, help="energy objective weight w_e")
    parser.add_argument("--wd", type=float, help="backlog objective weight w_d")
    parser.add_argument("--out-dir", dest="out_dir")
    parser.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override any config key (repeatable)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="agmec", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="one seeded experiment, CSV metrics out")
    _add_common(p_run)
    p_run.add_argument("--seed", type=int, default=0)

    p_sweep = sub.add_parser("sweep", help="compare config variations over shared seeds")
    _add_common(p_sweep)
    p_sweep.add_argument("--vary", action="append", required=True, metavar="KEY=VAL[,KEY=VAL...]",
                         help="one variation's overrides (repeat for each variation)")
    p_sweep.add_argument("--seeds", help="comma-separated seed list (default: config seeds)")
    p_sweep.add_argument("--workers", type=int, default=1)

    p_bench = sub.add_parser("bench", help="kernel vs dnn decision/learning time")
    _add_common(p_bench)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--warmup", type=int, default=500)
    p_bench.add_argument("--measure", type=int, default=2000)

    sub.add_parser("keys", help="list every config key and its default")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "keys":
        print(describe_keys())
        return 0
    try:
        config = load_config(args.config, _common_overrides(args))
        if args.command == "run":
            out_dir = args.out_dir or config.out_dir
            summary = run_experiment(config, args.seed, out_dir)
            for key, value in summary.items():
                print(f"{key}: {value}")
        elif args.command == "sweep":
            variations = []
            for spec in args.vary:
                overrides = {}
                for item in spec.split(","):
                    key, value = item.split("=", 1)
                    overrides[key.strip()] = value.strip()
                variations.append(overrides)
            seeds = tuple(int(s) for s in args.seeds.split(",")) if args.seeds else None
            rows = sweep(config, variations, seeds=seeds,
                         out_dir=args.out_dir or config.out_dir, workers=args.workers)
            for row in rows:
                print(
                    f"{row['variation']}: mean long-term energy "
                    f"{row['mean_longterm_energy_j']:.4g} J, backlog "
                    f"{row['mean_longterm_backlog_bits']:.4g} bits "
                    f"(per-seed backlog {['%.4g' % b for b in row['backlog_per_seed']]})"
                )
        elif args.command == "bench":
            result = timing_benchmark(config, seed=args.seed,
                                      warmup_slots=args.warmup, measure_slots=args.measure)
            for kind in ("kernel", "dnn"):
                print(f"{kind}: {result[kind]['mean_s']:.6f} s/slot "
                      f"(std {result[kind]['std_s']:.6f})")
            print(f"dnn/kernel ratio: {result['dnn_over_kernel_ratio']:.1f}x")
            if args.out_dir:
                import json
                import os
                os.makedirs(args.out_dir, exist_ok=True)
                with open(os.path.join(args.out_dir, "bench.json"), "w", encoding="utf-8") as fh:
                    json.dump(result, fh, indent=2)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
