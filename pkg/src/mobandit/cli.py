"""Command-line surface: gen / run / lowerbound / verify.

Every flag of `run` and `lowerbound` can also be supplied through a JSON
config file (`--config`); values given on the command line win. When
`--workers` is absent, the MOBAI_WORKERS environment variable supplies the
default worker count (falling back to 1).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .instances import gen_synthetic, load_instance_csv, save_instance_csv
from .simulate import (TrialConfig, format_lowerbound_report, lowerbound_report,
                       run_batch, summarize, write_results_csv, write_summary_csv)
from .verify import run_verification

_RUN_DEFAULTS = {
    "scale": 1.0,
    "policy": "mobai",
    "eta": 0.1,
    "iter": 20,
    "warm_start": False,
    "delta": 0.1,
    "threshold": "practical",
    "trials": 1,
    "seed": 0,
    "workers": None,  # resolved against MOBAI_WORKERS, then 1
    "cap": 10_000_000,
    "non_stopping": False,
    "out": "results.csv",
}

_LOWERBOUND_DEFAULTS = {
    "scale": 1.0,
    "eta": 0.1,
    "iters": 100_000,
    "grid": None,
}


def _merge_config(args: argparse.Namespace, defaults: dict) -> argparse.Namespace:
    """Fill unset flags from the JSON config file, then from defaults."""
    file_values = {}
    if getattr(args, "config", None):
        with open(args.config, "r", encoding="utf-8") as fh:
            file_values = json.load(fh)
    for key, fallback in defaults.items():
        if getattr(args, key, None) is None:
            setattr(args, key, file_values.get(key, fallback))
    return args


def _resolve_workers(value) -> int:
    if value is not None:
        return int(value)
    env = os.environ.get("MOBAI_WORKERS")
    return int(env) if env else 1


def _add_run_parser(sub):
    p = sub.add_parser("run", help="run a batch of seeded trials and write CSVs")
    p.add_argument("--config", help="JSON file mirroring these flags")
    p.add_argument("--instance", required=True, help="instance CSV path")
    p.add_argument("--scale", type=float)
    p.add_argument("--policy", choices=["mobai", "baseline", "mose"])
    p.add_argument("--eta", type=float)
    p.add_argument("--iter", type=int, help="baseline subroutine iterations")
    p.add_argument("--warm-start", dest="warm_start", action="store_const", const=True)
    p.add_argument("--delta", type=float)
    p.add_argument("--threshold", choices=["practical", "theoretical"])
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--cap", type=int)
    p.add_argument("--non-stopping", dest="non_stopping", action="store_const", const=True)
    p.add_argument("--out")


def _add_lowerbound_parser(sub):
    p = sub.add_parser("lowerbound", help="report identification-complexity constants")
    p.add_argument("--config", help="JSON file mirroring these flags")
    p.add_argument("--instance", required=True)
    p.add_argument("--scale", type=float)
    p.add_argument("--eta", type=float)
    p.add_argument("--iters", type=int)
    p.add_argument("--grid", type=int)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="mobandit")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="write a synthetic instance CSV")
    p_gen.add_argument("--k", type=int, required=True)
    p_gen.add_argument("--m", type=int, required=True)
    p_gen.add_argument("--seed", type=int, required=True)
    p_gen.add_argument("--out", required=True)

    _add_run_parser(sub)
    _add_lowerbound_parser(sub)
    sub.add_parser("verify", help="run the independent-oracle checks")

    args = parser.parse_args(argv)

    if args.command == "gen":
        save_instance_csv(gen_synthetic(args.k, args.m, args.seed), args.out)
        print(f"wrote {args.out}")
        return 0

    if args.command == "run":
        _merge_config(args, _RUN_DEFAULTS)
        inst = load_instance_csv(args.instance, scale=args.scale)
        cfg = TrialConfig(
            instance=inst, policy=args.policy, delta=args.delta, seed=args.seed,
            eta=args.eta if args.policy == "mobai" else None,
            iter_steps=args.iter if args.policy == "baseline" else None,
            warm_start=bool(args.warm_start), threshold_mode=args.threshold,
            pull_cap=args.cap, non_stopping=bool(args.non_stopping),
        )
        results = run_batch(cfg, args.trials, args.seed, _resolve_workers(args.workers))
        write_results_csv(args.out, results, cfg)
        summary = summarize(results, cfg)
        summary_path = args.out[:-4] + ".summary.csv" if args.out.endswith(".csv") \
            else args.out + ".summary.csv"
        write_summary_csv(summary_path, summary)
        print(f"policy={summary['policy']} trials={summary['trials']} "
              f"tau_mean={summary['tau_mean']:.2f} tau_std={summary['tau_std']:.2f} "
              f"error_rate={summary['error_rate']:.4f} "
              f"opt_ms_mean={summary['opt_ms_mean']:.3f}")
        print(f"wrote {args.out} and {summary_path}")
        return 0

    if args.command == "lowerbound":
        _merge_config(args, _LOWERBOUND_DEFAULTS)
        inst = load_instance_csv(args.instance, scale=args.scale)
        report = lowerbound_report(inst, eta=args.eta, iters=args.iters,
                                   grid_resolution=args.grid)
        print(format_lowerbound_report(report))
        return 0

    if args.command == "verify":
        return 0 if run_verification() else 1

    parser.error(f"unknown command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
