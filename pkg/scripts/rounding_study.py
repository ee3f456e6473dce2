#!/usr/bin/env python3
"""Online rounding of water-filling into b-matchings: E|M| / sum(x) against the guarantee factor."""
import argparse

import numpy as np

from hypermatch.algorithms import WaterFilling, rounding_guarantee, simulate_rounding
from hypermatch.game import random_instance, run_game


class Recorder(WaterFilling):
    def __init__(self):
        super().__init__()
        self.events, self.allocs = [], []

    def allocate(self, state, event):
        x = super().allocate(state, event)
        self.events.append(event)
        self.allocs.append(x)
        return x


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--b", type=int, nargs="+", default=[1, 2, 4, 12, 48])
    ap.add_argument("--epsilon", type=float, default=0.25)
    ap.add_argument("--trials", type=int, default=2000)
    args = ap.parse_args()
    rec = Recorder()
    inst = random_instance(np.random.default_rng(0), 3, 24, 12, 5)
    run_game(rec, inst)
    print("b,guarantee_factor,mean_size,stderr,fractional_value,empirical_factor,max_degree")
    for b in args.b:
        s = simulate_rounding(rec.events, rec.allocs, inst.num_offline, 3, b, args.epsilon, args.trials, seed=b)
        print(f"{b},{rounding_guarantee(3, b, args.epsilon):.4f},{s.mean:.4f},{s.stderr:.4f},"
              f"{s.fractional_value:.4f},{s.mean / s.fractional_value:.4f},{s.max_degree}")


if __name__ == "__main__":
    main()
