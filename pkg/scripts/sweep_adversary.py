#!/usr/bin/env python3
"""Water-filling against the full adversary over a (T, m) grid; writes a CSV of ratios and budgets."""
import argparse
from pathlib import Path

from hypermatch.harness import rows_to_csv, sweep, sweep_grid


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--T", default="4,8,16")
    ap.add_argument("--m", default="100,1000")
    ap.add_argument("--algos", default="waterfill,greedy_fractional")
    ap.add_argument("--epsilon", type=float, default=0.0)
    ap.add_argument("--out", type=Path, default=Path("results/sweep.csv"))
    args = ap.parse_args()
    cfgs = sweep_grid([int(v) for v in args.m.split(",")], [int(v) for v in args.T.split(",")],
                      (args.epsilon,), args.algos.split(","))
    rows = sweep(cfgs)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(rows_to_csv(rows), encoding="utf-8")
    for r in rows:
        print(f"{r['algo']:>18} T={r['T']:>3} m={r['m']:>5} ratio={r['ratio']:.5f} "
              f"budget={r['upper_bound_budget']:.3f} {r['runtime']:.1f}s")


if __name__ == "__main__":
    main()
