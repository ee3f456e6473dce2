#!/usr/bin/env python3
"""Per-phase values, r_t, q_t and cover residuals of one adversary run, plus the load-bound check."""
import argparse
import json
from pathlib import Path

from hypermatch.adversary import FullAdversary, check_last_phase, check_load_lower_bounds
from hypermatch.algorithms import WaterFilling
from hypermatch.game import run_game


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m", type=int, default=20)
    ap.add_argument("--T", type=int, default=10)
    ap.add_argument("--out", type=Path, default=Path("results"))
    args = ap.parse_args()
    adv = FullAdversary(args.m, args.T)
    run_game(WaterFilling(), adv, record=False, keep_transcript=False)
    args.out.mkdir(parents=True, exist_ok=True)
    adv.phase_report_csv(args.out / f"phases_m{args.m}_T{args.T}.csv")
    loads = check_load_lower_bounds(adv.components)
    summary = {"loads": loads.to_dict(), "last_phase": check_last_phase(adv).to_dict(),
               "outer_violations": [list(map(str, v)) for v in loads.violations[:10]]}
    print(json.dumps(summary, indent=2))


if __name__ == "__main__":
    main()
