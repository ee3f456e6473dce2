"""Command-line front end.

Exit codes: 0 success, 1 failed check (replay mismatch, psi property,
failed bound), 2 configuration error, 3 certificate or monitor failure
under --strict.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .adversary import GadgetSource, check_psi_properties, gadget_value_bound
from .algorithms import WaterFillConfig, WaterFilling, simulate_rounding
from .certificates import DualState, verify_certificate
from .errors import ConfigError, HypermatchError
from .game import StaticInstance, random_instance, run_game
from .harness import (
    SOURCES,
    AlgoConfig,
    TrialConfig,
    rows_to_csv,
    run_trial,
    sweep,
    sweep_grid,
    sweep_row,
    write_outputs,
)
from .hardness import (
    MAX_EXPECTIMAX_K,
    closed_form_value,
    enumerate_strategies,
    expectimax_value,
    simulate_greedy,
)
from .model import MatchingState
from .oracles import brute_force_opt

EXIT_FAIL, EXIT_CONFIG, EXIT_STRICT = 1, 2, 3
PSI_T_MAX = 5000


def _emit(obj, fmt: str, out: Path | None = None, name: str = "result") -> None:
    if fmt == "csv":
        rows = obj if isinstance(obj, list) else [obj]
        text = rows_to_csv(rows, list(rows[0])) if rows else ""
    else:
        text = json.dumps(obj, indent=2, sort_keys=True, default=float) + "\n"
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{name}.{fmt}").write_text(text, encoding="utf-8")
    sys.stdout.write(text)


def _ints(s: str) -> list[int]:
    return [int(v) for v in s.split(",") if v]


def _floats(s: str) -> list[float]:
    return [float(v) for v in s.split(",") if v]


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--out", type=Path, default=None, help="output directory")
    p.add_argument("--strict", action="store_true", help="nonzero exit on certificate or monitor failure")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def _trial_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="trial config JSON (flags below are then ignored)")
    p.add_argument("--source", default="adversary", help=f"{' | '.join(SOURCES)} | file:PATH")
    p.add_argument("--algo", default="waterfill")
    p.add_argument("--mode", default="exact_disjoint", help="water-filling mode")
    p.add_argument("--step", type=float, default=1e-4)
    p.add_argument("--d", type=int, default=2, help="degree bound for RANDOM")
    p.add_argument("--b", type=int, default=12, help="capacity for rounding")
    p.add_argument("--round-epsilon", type=float, default=0.25)
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--T", type=int, default=3)
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("--gadget-mode", default="symmetric_pairs")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--num-offline", type=int, default=12)
    p.add_argument("--num-arrivals", type=int, default=12)
    p.add_argument("--max-degree", type=int, default=5)
    p.add_argument("--overlapping", action="store_true", help="random instances may share offline nodes")
    p.add_argument("--no-record", action="store_true", help="skip per-hyperedge arrays and transcript rows")


def _trial_config(args) -> TrialConfig:
    if args.config is not None:
        try:
            data = json.loads(args.config.read_text(encoding="utf-8"))
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        data.setdefault("seed", args.seed)
        return TrialConfig.from_json(data)
    algo = AlgoConfig(args.algo, args.mode, args.step, None, args.d, args.b, args.round_epsilon)
    return TrialConfig(
        source=args.source, algo=algo, seed=args.seed, m=args.m, T=args.T, epsilon=args.epsilon,
        gadget_mode=args.gadget_mode, n=args.n, k=args.k, num_offline=args.num_offline,
        num_arrivals=args.num_arrivals, max_degree=args.max_degree, disjoint=not args.overlapping,
        record=False if args.no_record else None,
    )


def _report_ok(report) -> bool:
    cert_ok = report.certificate is None or report.certificate["pass"]
    mon_ok = all(m.get("pass", True) for m in report.monitors.values())
    return cert_ok and mon_ok


# ---- subcommands ---------------------------------------------------

def cmd_run(args) -> int:
    cfg = _trial_config(args)
    report, art = run_trial(cfg)
    if args.out is not None:
        write_outputs(report, art, args.out)
    if args.format == "csv":
        _emit(sweep_row(0, report), "csv")
    else:
        sys.stdout.write(report.to_json() + "\n")
    return EXIT_STRICT if args.strict and not _report_ok(report) else 0


def cmd_sweep(args) -> int:
    cfgs = sweep_grid(_ints(args.m), _ints(args.T), _floats(args.epsilon), args.algo.split(","), seed=args.seed)
    rows = sweep(cfgs, workers=args.workers)
    if args.format == "csv":
        text = rows_to_csv(rows)
        if args.out is not None:
            args.out.mkdir(parents=True, exist_ok=True)
            (args.out / "sweep.csv").write_text(text, encoding="utf-8")
        sys.stdout.write(text)
    else:
        _emit(rows, "json", args.out, "sweep")
    bad = [r for r in rows if r["algo"] == "waterfill"
           and (r["lower_ok"] is False or r["upper_ok"] is False or r["certificate_pass"] is False)]
    return EXIT_STRICT if args.strict and bad else 0


def cmd_gadget(args) -> int:
    rows = []
    for n in _ints(args.n):
        src = GadgetSource(n, args.mode)
        alg = WaterFilling(WaterFillConfig())
        state, _ = run_game(alg, src, record=n <= args.brute_max)
        bound = float(gadget_value_bound(n))
        row = {"n": n, "value": state.value, "bound": bound, "pass": bool(state.value <= bound + 1e-6),
               "opt_analytic": n, "opt_brute_force": None}
        if n <= args.brute_max:
            row["opt_brute_force"] = brute_force_opt(state, guard=n * (n + 1) // 2 + 1).opt_integral
            row["pass"] = row["pass"] and row["opt_brute_force"] == n
        rows.append(row)
    _emit(rows, args.format, args.out, "gadget")
    return 0 if all(r["pass"] for r in rows) else EXIT_FAIL


def cmd_hardness(args) -> int:
    if args.k > MAX_EXPECTIMAX_K:
        raise ConfigError(f"k must be at most {MAX_EXPECTIMAX_K}")
    summary = simulate_greedy(args.k, args.trials, args.seed)
    out = {
        "k": args.k,
        "dp_value": float(summary.dp_value),
        "closed_form": float(closed_form_value(args.k)),
        "empirical_mean": summary.empirical_mean,
        "stderr": summary.stderr,
    }
    if args.enumerate:
        out["enumerated"] = float(enumerate_strategies(args.k))
        out["expectimax"] = float(expectimax_value(args.k))
    _emit(out, args.format, args.out, "hardness")
    return 0 if summary.dp_value == closed_form_value(args.k) else EXIT_FAIL


class _Recorder:
    """Water-filling that also keeps each event and its allocation."""

    mode = "fractional"
    name = "waterfill"

    def __init__(self):
        self.inner = WaterFilling()
        self.events, self.allocs = [], []

    def start(self, source):
        self.inner.start(source)

    def allocate(self, state, event):
        x = self.inner.allocate(state, event)
        self.events.append(event)
        self.allocs.append(x)
        return x


def cmd_round(args) -> int:
    seeds = np.random.SeedSequence(args.seed).spawn(2)
    rng = np.random.default_rng(seeds[0])
    inst = random_instance(rng, 3, args.num_offline, args.num_arrivals, args.max_degree, disjoint=True)
    rec = _Recorder()
    run_game(rec, inst)
    trial_seed = int(seeds[1].generate_state(1, np.uint32)[0])
    summary = simulate_rounding(rec.events, rec.allocs, inst.num_offline, 3, args.b, args.round_epsilon,
                                args.trials, trial_seed)
    out = summary.to_dict()
    out["degree_ok"] = summary.max_degree <= args.b
    _emit(out, args.format, args.out, "round")
    return 0 if out["pass"] and out["degree_ok"] else EXIT_FAIL


def cmd_psi_check(args) -> int:
    if not 1 <= args.t_max <= PSI_T_MAX:
        raise ConfigError(f"t_max must lie in [1, {PSI_T_MAX}]")
    res = check_psi_properties(args.t_max)
    if args.format == "csv":
        rows = [{"property": k, **v} for k, v in res.items()]
        _emit(rows, "csv", args.out, "psi_check")
    else:
        _emit(res, "json", args.out, "psi_check")
    return 0 if all(v["pass"] for v in res.values()) else EXIT_FAIL


def rebuild_state(instance: StaticInstance, transcript_path: Path) -> MatchingState:
    """Replay recorded allocations on ``instance`` without running any algorithm."""
    alloc = {}
    with open(transcript_path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            alloc[int(row["hyperedge_id"])] = float(row["allocation"])
    state = MatchingState(instance.k, instance.num_offline, mode="fractional", record=True)
    for ev in instance.events():
        state.apply(ev, np.array([alloc.get(int(h), 0.0) for h in ev.ids]))
    return state


def cmd_certify(args) -> int:
    run_dir = args.dir
    try:
        inst = StaticInstance.load(run_dir / "instance.json")
        duals = DualState.from_dict(json.loads((run_dir / "duals.json").read_text(encoding="utf-8")))
        state = rebuild_state(inst, run_dir / "transcript.csv")
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError(f"cannot load run directory {run_dir}: {exc}") from exc
    verdict = verify_certificate(state, duals).to_dict()
    _emit(verdict, args.format, args.out, "certificate")
    return EXIT_STRICT if args.strict and not verdict["pass"] else (0 if verdict["pass"] else EXIT_FAIL)


def cmd_replay(args) -> int:
    run_dir = args.dir
    try:
        stored = json.loads((run_dir / "report.json").read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read {run_dir / 'report.json'}: {exc}") from exc
    cfg = TrialConfig.from_json(stored["config"])
    report, art = run_trial(cfg)
    out = {"stored_digest": stored["transcript_digest"], "replay_digest": report.transcript_digest,
           "digest_match": stored["transcript_digest"] == report.transcript_digest}
    old_csv = run_dir / "transcript.csv"
    if old_csv.exists() and art.log.transcript.keep:
        new_dir = args.out if args.out is not None else run_dir / "replay"
        write_outputs(report, art, new_dir)
        out["csv_identical"] = old_csv.read_bytes() == (new_dir / "transcript.csv").read_bytes()
    out["match"] = out["digest_match"] and out.get("csv_identical", True)
    _emit(out, args.format, None, "replay")
    return 0 if out["match"] else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hypermatch", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="play one game and report")
    _common(p)
    _trial_args(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="adversary grid over m, T, epsilon and algorithms")
    _common(p)
    p.add_argument("--m", default="10,100")
    p.add_argument("--T", default="4,8")
    p.add_argument("--epsilon", default="0")
    p.add_argument("--algo", default="waterfill", help="comma-separated algorithms")
    p.add_argument("--workers", type=int, default=None, help="defaults to HYPERMATCH_WORKERS or 1")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("gadget", help="water-filling on standalone gadgets")
    _common(p)
    p.add_argument("--n", default="10,100,1000", help="comma-separated sizes")
    p.add_argument("--mode", default="plain", choices=("plain", "symmetric_pairs"))
    p.add_argument("--brute-max", type=int, default=8, help="confirm OPT by brute force up to this n")
    p.set_defaults(func=cmd_gadget)

    p = sub.add_parser("hardness", help="value of the randomized instance against integral algorithms")
    _common(p)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--enumerate", action="store_true", help="also run strategy enumeration (k <= 5)")
    p.set_defaults(func=cmd_hardness)

    p = sub.add_parser("round", help="round a water-filling run into a b-matching")
    _common(p)
    p.add_argument("--b", type=int, default=12)
    p.add_argument("--round-epsilon", type=float, default=0.25)
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--num-offline", type=int, default=24)
    p.add_argument("--num-arrivals", type=int, default=12)
    p.add_argument("--max-degree", type=int, default=5)
    p.set_defaults(func=cmd_round)

    p = sub.add_parser("psi-check", help="structural properties of psi")
    _common(p)
    p.add_argument("--t-max", type=int, default=2000)
    p.set_defaults(func=cmd_psi_check)

    p = sub.add_parser("certify", help="re-verify the dual certificate of a run directory")
    _common(p)
    p.add_argument("dir", type=Path)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("replay", help="rerun a stored run and compare transcripts")
    _common(p)
    p.add_argument("dir", type=Path)
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except HypermatchError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
