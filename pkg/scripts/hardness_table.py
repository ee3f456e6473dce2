#!/usr/bin/env python3
"""Best deterministic value on the randomized instance: recurrence, expectimax, enumeration and Monte Carlo."""
import argparse

from hypermatch.hardness import (
    closed_form_value,
    enumerate_strategies,
    expectimax_value,
    optimal_deterministic_value,
    simulate_greedy,
)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k-max", type=int, default=10)
    ap.add_argument("--trials", type=int, default=100_000)
    args = ap.parse_args()
    print("k,dp,closed_form,expectimax,enumerated,greedy_mean,greedy_stderr,ratio_bound")
    for k in range(2, args.k_max + 1):
        dp = optimal_deterministic_value(k)
        emax = expectimax_value(k) if k <= 10 else ""
        enum = enumerate_strategies(k) if k <= 5 else ""
        mc = simulate_greedy(k, args.trials, seed=k)
        print(f"{k},{dp},{closed_form_value(k)},{emax},{enum},{mc.empirical_mean:.5f},{mc.stderr:.5f},"
              f"{float(dp) / k:.5f}")


if __name__ == "__main__":
    main()
