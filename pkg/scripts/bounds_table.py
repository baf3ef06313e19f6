#!/usr/bin/env python3
"""Sweep (n, q) group shapes and print where each rate family bottoms out."""
import argparse
from fractions import Fraction

from peerhelp.capacity import CHAINED_REFERENCE, capacity_lower_bound_sweep
from peerhelp.cli import write_atomic


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=100)
    ap.add_argument("--out", default="results/bounds.csv")
    args = ap.parse_args()

    table = capacity_lower_bound_sweep(args.n_max)
    write_atomic(args.out, table.to_csv())
    print(f"{len(table.rows)} shapes -> {args.out}")
    print(f"{'n':>4} {'corollary(q=0)':>16} {'fixed point(q=0)':>18}")
    for r in table.rows:
        if r.q == 0 and (r.n <= 6 or r.n % 25 == 0):
            print(f"{r.n:>4} {str(r.corollary_rate):>16} {str(r.fixed_point_rate):>18}")
    print(f"min corollary   {table.corollary_min} at {table.corollary_argmin}")
    print(f"min fixed point {table.fixed_point_min} at {table.fixed_point_argmin}")
    gain = table.fixed_point_min - CHAINED_REFERENCE
    print(f"gain over chained reference {CHAINED_REFERENCE}: {gain} ({float(gain):.4f})")
    assert table.fixed_point_min == Fraction(5, 6)


if __name__ == "__main__":
    main()
