"""Trial configuration, single-trial runner, sweeps and report serialization."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np

from .adversary import FullAdversary, GadgetSource, check_last_phase, gadget_value_bound
from .adversary.psi import A_CONST
from .algorithms import (
    GreedyFractional,
    GreedyIntegral,
    RandomAlgConfig,
    RandomMatching,
    RoundingState,
    WaterFillConfig,
    WaterFilling,
    rounding_arrival,
    rounding_guarantee,
)
from .certificates import (
    StreamingCoverageMonitor,
    verify_certificate,
    verify_streaming_certificate,
)
from .errors import ConfigError, TooLarge
from .game import StaticInstance, random_instance, run_game
from .hardness import sample_hardness_instance
from .model import RHO
from .monitors import SymmetryMonitor, ThresholdMonitor
from .oracles import analytic_opt, brute_force_opt

ALGOS = ("waterfill", "greedy", "greedy_fractional", "random", "rounding")
SOURCES = ("adversary", "gadget", "hardness", "random")
# adversary runs larger than this (T*m) do not keep per-hyperedge arrays
RECORD_LIMIT = 4000
HARNESS_GUARD = 60


@dataclass
class AlgoConfig:
    algo: str = "waterfill"
    mode: str = "exact_disjoint"
    step: float = 1e-4
    seed: int | None = None  # overrides the derived algorithm stream
    d: int = 2
    b: int = 12
    epsilon: float = 0.25  # rounding only

    def __post_init__(self):
        if self.algo not in ALGOS:
            raise ConfigError(f"unknown algorithm {self.algo!r}; choose from {', '.join(ALGOS)}")
        if self.algo == "rounding" and not 0 < self.epsilon < 0.5:
            raise ConfigError("rounding epsilon must lie in (0, 1/2)")
        WaterFillConfig(self.mode, self.step)

    @classmethod
    def from_json(cls, data: dict) -> "AlgoConfig":
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigError(f"unknown algorithm config keys {sorted(unknown)}")
        return cls(**data)


@dataclass
class TrialConfig:
    source: str = "adversary"  # adversary | gadget | hardness | random | file:PATH
    algo: AlgoConfig = field(default_factory=AlgoConfig)
    seed: int = 0
    # adversary
    m: int = 4
    T: int = 3
    epsilon: float = 0.0
    gadget_mode: str = "symmetric_pairs"
    # gadget
    n: int = 10
    # hardness / random instances
    k: int = 3
    num_offline: int = 12
    num_arrivals: int = 12
    max_degree: int = 5
    disjoint: bool = True
    # output control; None picks by size
    record: bool | None = None
    opt_guard: int = HARNESS_GUARD

    def __post_init__(self):
        if isinstance(self.algo, dict):
            self.algo = AlgoConfig.from_json(self.algo)
        if not (self.source in SOURCES or self.source.startswith("file:")):
            raise ConfigError(f"unknown source {self.source!r}")
        if self.epsilon < 0:
            raise ConfigError("epsilon must be non-negative")

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data: dict) -> "TrialConfig":
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigError(f"unknown trial config keys {sorted(unknown)}")
        return cls(**data)


def split_seeds(master: int) -> dict:
    """Independent (algorithm, source, trial) streams from one master seed."""
    children = np.random.SeedSequence(master).spawn(3)
    vals = [int(c.generate_state(1, np.uint32)[0]) for c in children]
    return {"master": int(master), "algorithm": vals[0], "source": vals[1], "trial": vals[2]}


def upper_bound_budget(T: int, m: int, epsilon: float = 0.0) -> float:
    """B(T, m, eps): admissible excess of the adversary ratio over rho."""
    last = 2.0 * A_CONST * (2.0 + 0.5 * math.sqrt(max(T - 1, 0))) * m
    return epsilon * T + (15.0 * T ** (5 / 3) * m ** (2 / 3) + last + 2.0 * epsilon * T * T * m) / (T * m)


class RoundedWaterFilling:
    """Water-filling whose allocation is rounded online into a b-matching."""

    mode = "fractional"
    name = "rounding"

    def __init__(self, cfg: AlgoConfig, seed: int):
        self.inner = WaterFilling(WaterFillConfig(cfg.mode, cfg.step))
        self.cfg = cfg
        self.rng = np.random.default_rng(seed)
        self.rs: RoundingState | None = None

    @property
    def duals(self):
        return self.inner.duals

    def start(self, source) -> None:
        self.inner.start(source)
        self.rs = RoundingState(self.cfg.epsilon, self.cfg.b, source.num_offline)

    def allocate(self, state, event):
        x = self.inner.allocate(state, event)
        rounding_arrival(self.rs, event, x, self.rng)
        return x


def make_source(cfg: TrialConfig, seed: int):
    if cfg.source == "adversary":
        return FullAdversary(cfg.m, cfg.T, cfg.epsilon, cfg.gadget_mode)
    if cfg.source == "gadget":
        return GadgetSource(cfg.n)
    if cfg.source == "hardness":
        return sample_hardness_instance(cfg.k, seed)
    if cfg.source == "random":
        rng = np.random.default_rng(seed)
        return random_instance(rng, cfg.k, cfg.num_offline, cfg.num_arrivals, cfg.max_degree, disjoint=cfg.disjoint)
    path = cfg.source[len("file:"):]
    try:
        return StaticInstance.load(path)
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError(f"cannot read instance {path!r}: {exc}") from exc


def make_algorithm(cfg: AlgoConfig, k: int, seed: int):
    if cfg.algo == "waterfill":
        return WaterFilling(WaterFillConfig(cfg.mode, cfg.step))
    if cfg.algo == "greedy":
        return GreedyIntegral()
    if cfg.algo == "greedy_fractional":
        return GreedyFractional()
    if cfg.algo == "random":
        return RandomMatching(RandomAlgConfig(k, cfg.d, seed))
    return RoundedWaterFilling(cfg, seed)


@dataclass
class TrialReport:
    config: dict
    alg_value: float
    opt: int | None
    opt_source: str | None
    ratio: float | None
    certificate: dict | None
    monitors: dict
    phase_values: dict
    last_phase_value: float
    runtime: float
    seeds: dict
    transcript_digest: str
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "TrialReport":
        data = dict(data)
        data["phase_values"] = {int(k): v for k, v in data["phase_values"].items()}
        return cls(**data)


@dataclass
class TrialArtifacts:
    source: object
    algorithm: object
    state: object
    log: object

    def instance(self) -> StaticInstance | None:
        if isinstance(self.source, StaticInstance):
            return self.source
        if self.state.record:
            return StaticInstance.from_state(self.state)
        return None


def _should_record(cfg: TrialConfig) -> bool:
    if cfg.record is not None:
        return cfg.record
    return not (cfg.source == "adversary" and cfg.T * cfg.m > RECORD_LIMIT)


def _opt(source, state, cfg: TrialConfig):
    try:
        return analytic_opt(source).to_dict()
    except Exception:  # noqa: BLE001 - any source without a closed form
        pass
    if not state.record:
        return None
    try:
        return brute_force_opt(state, guard=cfg.opt_guard).to_dict()
    except TooLarge:
        return None


def run_trial(cfg: TrialConfig) -> tuple[TrialReport, TrialArtifacts]:
    start = time.perf_counter()
    seeds = split_seeds(cfg.seed)
    algo_seed = cfg.algo.seed if cfg.algo.seed is not None else seeds["algorithm"]
    origin = make_source(cfg, seeds["source"])
    source = origin.to_static() if cfg.source == "hardness" else origin
    algorithm = make_algorithm(cfg.algo, source.k, algo_seed if cfg.algo.algo != "rounding" else seeds["trial"])
    record = _should_record(cfg)

    monitors = []
    if algorithm.mode == "fractional":
        tol = 2.0 * cfg.algo.step if cfg.algo.mode == "discretized" else 0.0
        monitors.append(ThresholdMonitor(max(cfg.epsilon, tol)))
    if isinstance(source, FullAdversary):
        monitors.append(SymmetryMonitor(source.symmetry_pairs()))
    stream = None
    if cfg.algo.algo == "waterfill" and not record:
        stream = StreamingCoverageMonitor(algorithm)
        monitors.append(stream)

    state, log = run_game(algorithm, source, monitors, record=record, keep_transcript=record)

    certificate = None
    # RANDOM's coverage guarantee holds only in expectation, see estimate_random_certificate
    if cfg.algo.algo == "waterfill":
        duals = algorithm.duals
        if record:
            certificate = verify_certificate(state, duals).to_dict()
        else:
            certificate = verify_streaming_certificate(state, duals, stream, duals.rho_target).to_dict()

    extras: dict = {}
    alg_value = float(state.value)
    if isinstance(source, FullAdversary):
        phase_values = source.per_phase_totals()
        budget = upper_bound_budget(cfg.T, cfg.m, cfg.epsilon)
        extras.update(rho=RHO, upper_bound_budget=budget,
                      last_phase=check_last_phase(source).to_dict())
    else:
        phase_values = {int(k): float(v) for k, v in sorted(log.phase_values.items())}
    if isinstance(source, GadgetSource):
        extras["gadget_bound"] = float(gadget_value_bound(cfg.n))
    if isinstance(algorithm, RoundedWaterFilling):
        extras.update(fractional_value=alg_value, b=cfg.algo.b, rounding_epsilon=cfg.algo.epsilon,
                      max_degree=algorithm.rs.max_degree(),
                      guarantee_factor=rounding_guarantee(source.k, cfg.algo.b, cfg.algo.epsilon))
        alg_value = float(len(algorithm.rs.matched))

    opt = _opt(origin, state, cfg)
    ratio = alg_value / opt["opt"] if opt and opt["opt"] else None
    if isinstance(source, FullAdversary) and cfg.algo.algo == "waterfill":
        extras["within_bounds"] = bool(RHO - 1e-6 <= ratio <= RHO + extras["upper_bound_budget"])
    last = phase_values[max(phase_values)] if phase_values else 0.0
    report = TrialReport(
        config=cfg.to_json(),
        alg_value=alg_value,
        opt=opt["opt"] if opt else None,
        opt_source=opt["opt_source"] if opt else None,
        ratio=ratio,
        certificate=certificate,
        monitors={k: v.to_dict() for k, v in log.monitor_reports.items()},
        phase_values=phase_values,
        last_phase_value=float(last),
        runtime=time.perf_counter() - start,
        seeds=seeds,
        transcript_digest=log.transcript.digest,
        extras=extras,
    )
    return report, TrialArtifacts(source, algorithm, state, log)


def write_outputs(report: TrialReport, art: TrialArtifacts, outdir) -> list[Path]:
    """report.json, plus transcript.csv, instance.json and duals.json when available."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    written = [out / "report.json"]
    (out / "report.json").write_text(report.to_json() + "\n", encoding="utf-8")
    if art.log.transcript.keep:
        art.log.transcript.to_csv(out / "transcript.csv")
        written.append(out / "transcript.csv")
    inst = art.instance()
    if inst is not None:
        inst.save(out / "instance.json")
        written.append(out / "instance.json")
    duals = getattr(art.algorithm, "duals", None)
    if duals is not None:
        (out / "duals.json").write_text(json.dumps(duals.to_dict()) + "\n", encoding="utf-8")
        written.append(out / "duals.json")
    return written


# ---- sweeps ----------------------------------------------------------

SWEEP_COLUMNS = ["index", "source", "algo", "m", "T", "epsilon", "seed", "alg_value", "opt", "ratio",
                 "rho", "upper_bound_budget", "lower_ok", "upper_ok", "certificate_pass", "runtime"]


def sweep_row(index: int, report: TrialReport) -> dict:
    cfg = report.config
    budget = report.extras.get("upper_bound_budget")
    ratio = report.ratio
    cert = report.certificate
    return {
        "index": index,
        "source": cfg["source"],
        "algo": cfg["algo"]["algo"],
        "m": cfg["m"],
        "T": cfg["T"],
        "epsilon": cfg["epsilon"],
        "seed": cfg["seed"],
        "alg_value": report.alg_value,
        "opt": report.opt,
        "ratio": ratio,
        "rho": RHO,
        "upper_bound_budget": budget,
        "lower_ok": None if ratio is None else ratio >= RHO - 1e-6,
        "upper_ok": None if ratio is None or budget is None else ratio <= RHO + budget,
        "certificate_pass": None if cert is None else cert["pass"],
        "runtime": report.runtime,
    }


def sweep_grid(ms, Ts, epsilons=(0.0,), algos=("waterfill",), seed: int = 0, **common) -> list[TrialConfig]:
    """Cells in grid order: algo, then T, then m, then epsilon."""
    out = []
    for algo in algos:
        for T in Ts:
            for m in ms:
                for eps in epsilons:
                    out.append(TrialConfig(source="adversary", algo=AlgoConfig(algo), seed=seed,
                                           m=int(m), T=int(T), epsilon=float(eps), **common))
    return out


def _cell(args):
    index, cfg = args
    report, _ = run_trial(cfg)
    return sweep_row(index, report)


def workers_from_env() -> int:
    raw = os.environ.get("HYPERMATCH_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError as exc:
        raise ConfigError(f"HYPERMATCH_WORKERS must be an integer, got {raw!r}") from exc


def sweep(configs: list[TrialConfig], workers: int | None = None) -> list[dict]:
    """Run every cell; rows come back in grid order whatever the completion order."""
    workers = workers_from_env() if workers is None else workers
    jobs = list(enumerate(configs))
    if workers <= 1 or len(jobs) <= 1:
        rows = [_cell(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_cell, jobs))
    return sorted(rows, key=lambda r: r["index"])


def rows_to_csv(rows: list[dict], columns=SWEEP_COLUMNS) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: ("" if row[k] is None else (f"{row[k]:.17g}" if isinstance(row[k], float) else row[k]))
                    for k in columns})
    return buf.getvalue()
