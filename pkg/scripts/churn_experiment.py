#!/usr/bin/env python3
"""Churn runs over several seeds in both planning modes; one summary line per run."""
import argparse
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction

from peerhelp.churn import ChurnConfig, records_to_jsonl, run_simulation
from peerhelp.cli import write_atomic


def one_run(cfg: ChurnConfig):
    records = list(run_simulation(cfg))
    return cfg, records


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--users", type=int, nargs="+", default=[4, 10, 50])
    ap.add_argument("--steps", type=int, default=200)
    ap.add_argument("--seeds", type=int, default=4)
    ap.add_argument("--switches-per-step", type=int, default=1)
    ap.add_argument("--outdir", default="results/churn")
    args = ap.parse_args()

    configs = [ChurnConfig(n, args.steps, seed, args.switches_per_step, mode)
               for mode in ("theorem3", "capacity") for n in args.users for seed in range(args.seeds)]
    with ProcessPoolExecutor() as pool:
        results = list(pool.map(one_run, configs))

    print(f"{'mode':>9} {'N':>4} {'seed':>4} {'min rate':>10} {'mean idle':>9} {'feasible':>8}")
    for cfg, records in results:
        path = f"{args.outdir}/{cfg.mode}_n{cfg.users}_s{cfg.seed}.jsonl"
        write_atomic(path, records_to_jsonl(records))
        lo = min(r.min_rate for r in records)
        idle = Fraction(sum(r.idle_count for r in records), len(records))
        feasible = all(r.feasible for r in records)
        print(f"{cfg.mode:>9} {cfg.users:>4} {cfg.seed:>4} {str(lo):>10} {float(idle):>9.2f} {str(feasible):>8}")


if __name__ == "__main__":
    main()
