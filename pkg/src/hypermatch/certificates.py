"""Dual solutions tracked alongside the primal, and their verification.

A dual vector y with sum(y) = sum(x) whose coverage sum_{v in h} y_v is at
least c on every revealed hyperedge shows ALG >= c * OPT_LP, because y / c is
dual-feasible.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import RHO, GrowableArray, MatchingState

TINY = 1e-300


class DualState:
    def __init__(self, num_offline: int, rho_target: float = RHO):
        self.y_offline = np.zeros(int(num_offline))
        self._y_online = GrowableArray(np.float64)
        self.rho_target = float(rho_target)

    @property
    def y_online(self) -> np.ndarray:
        return self._y_online.view

    def add_online(self, w: int, amount: float) -> None:
        self._y_online.ensure_size(w + 1)
        self._y_online.view[w] += amount

    def set_online(self, w: int, value: float) -> None:
        self._y_online.ensure_size(w + 1)
        self._y_online.view[w] = value

    def total(self) -> float:
        return float(self.y_offline.sum() + self.y_online.sum())

    def min_value(self) -> float:
        vals = [self.y_offline.min()] if len(self.y_offline) else []
        if len(self.y_online):
            vals.append(self.y_online.min())
        return float(min(vals)) if vals else 0.0

    def coverage(self, he_online: np.ndarray, he_offline: np.ndarray) -> np.ndarray:
        if len(he_online) and int(he_online.max()) >= len(self.y_online):
            self._y_online.ensure_size(int(he_online.max()) + 1)
        return self.y_offline[he_offline].sum(axis=1) + self.y_online[he_online]

    def to_dict(self) -> dict:
        return {
            "rho_target": self.rho_target,
            "y_offline": self.y_offline.tolist(),
            "y_online": self.y_online.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DualState":
        ds = cls(len(data["y_offline"]), data["rho_target"])
        ds.y_offline[:] = data["y_offline"]
        for w, val in enumerate(data["y_online"]):
            ds.set_online(w, val)
        return ds


@dataclass
class CertificateVerdict:
    primal_value: float
    dual_value: float
    primal_dual_gap: float
    gap_pass: bool
    min_coverage: float
    rho_target: float
    coverage_pass: bool
    min_dual: float
    num_hyperedges: int
    # "final": coverage of every hyperedge under the final duals;
    # "streaming": coverage measured right after each arrival, a lower bound
    # on the final one because duals never decrease
    coverage_mode: str = "final"

    @property
    def passed(self) -> bool:
        return self.gap_pass and self.coverage_pass

    @property
    def implied_ratio(self) -> float:
        """Lower bound on ALG / OPT_LP implied by the certificate."""
        if self.num_hyperedges == 0:
            return 1.0
        return self.min_coverage * self.primal_value / max(self.dual_value, TINY)

    def to_dict(self) -> dict:
        return {
            "primal_value": self.primal_value,
            "dual_value": self.dual_value,
            "primal_dual_gap": self.primal_dual_gap,
            "min_coverage": None if self.num_hyperedges == 0 else self.min_coverage,
            "rho_target": self.rho_target,
            "min_dual": self.min_dual,
            "num_hyperedges": self.num_hyperedges,
            "implied_ratio": self.implied_ratio,
            "coverage_mode": self.coverage_mode,
            "pass": self.passed,
        }


def verify_certificate(state: MatchingState, duals: DualState, rho_target: float | None = None,
                       gap_tol: float = 1e-7, coverage_tol: float = 1e-7) -> CertificateVerdict:
    rho = duals.rho_target if rho_target is None else rho_target
    primal = float(np.sum(state.x)) if state.num_hyperedges else 0.0
    dual = duals.total()
    gap = abs(primal - dual)
    if state.num_hyperedges:
        cover = duals.coverage(state.he_online, state.he_offline)
        min_cov = float(cover.min())
    else:
        min_cov = float("inf")
    min_dual = duals.min_value()
    return CertificateVerdict(
        primal_value=primal,
        dual_value=dual,
        primal_dual_gap=gap,
        gap_pass=gap <= gap_tol * (1.0 + primal),
        min_coverage=min_cov,
        rho_target=rho,
        coverage_pass=min_cov >= rho - coverage_tol and min_dual >= -1e-12,
        min_dual=min_dual,
        num_hyperedges=state.num_hyperedges,
    )


def verify_waterfill_certificate(state: MatchingState, duals: DualState) -> CertificateVerdict:
    """Check sum(x) = sum(y) and coverage >= (e-1)/(e+1) over every revealed hyperedge."""
    return verify_certificate(state, duals, rho_target=RHO)


class StreamingCoverageMonitor:
    """Tracks min coverage of each arrival's hyperedges as soon as it is processed.

    Offline duals only grow and an online dual is final once its arrival is
    processed, so these values bound the final coverage from below. This
    allows certification of runs that do not record per-hyperedge arrays.
    """

    name = "coverage_stream"

    def __init__(self, algorithm):
        self.algorithm = algorithm
        self.min_coverage = float("inf")
        self.num_hyperedges = 0

    def on_arrival(self, state, event, alloc, phi=None) -> None:
        duals = self.algorithm.duals
        y_w = duals.y_online[event.online_id] if event.online_id < len(duals.y_online) else 0.0
        cov = duals.y_offline[event.offline].sum(axis=1) + y_w
        self.min_coverage = min(self.min_coverage, float(cov.min()))
        self.num_hyperedges += event.n

    def on_phase_end(self, state, phase) -> None:
        pass

    def finish(self, state):
        return self

    def to_dict(self) -> dict:
        return {"min_coverage": None if self.num_hyperedges == 0 else self.min_coverage,
                "num_hyperedges": self.num_hyperedges}


def verify_streaming_certificate(state: MatchingState, duals: DualState, monitor: StreamingCoverageMonitor,
                                 rho_target: float | None = None, gap_tol: float = 1e-7,
                                 coverage_tol: float = 1e-7) -> CertificateVerdict:
    rho = duals.rho_target if rho_target is None else rho_target
    primal = float(state.value)
    dual = duals.total()
    gap = abs(primal - dual)
    min_dual = duals.min_value()
    return CertificateVerdict(
        primal_value=primal,
        dual_value=dual,
        primal_dual_gap=gap,
        gap_pass=gap <= gap_tol * (1.0 + primal),
        min_coverage=monitor.min_coverage,
        rho_target=rho,
        coverage_pass=monitor.min_coverage >= rho - coverage_tol and min_dual >= -1e-12,
        min_dual=min_dual,
        num_hyperedges=monitor.num_hyperedges,
        coverage_mode="streaming",
    )


@dataclass
class RandomCertificateEstimate:
    rho: float
    trials: int
    mean: np.ndarray  # per hyperedge, E[sum of y over h]
    stderr: np.ndarray
    sizes: np.ndarray  # matching size per trial

    @property
    def flagged(self) -> np.ndarray:
        """Hyperedges whose estimate plus three standard errors stays below rho."""
        return np.flatnonzero(self.mean + 3.0 * self.stderr < self.rho - 1e-12)

    @property
    def min_slack(self) -> float:
        """min over hyperedges of (mean + 3 stderr - rho)."""
        return float(np.min(self.mean + 3.0 * self.stderr - self.rho)) if len(self.mean) else float("inf")

    def to_dict(self) -> dict:
        return {
            "rho": self.rho,
            "trials": self.trials,
            "num_hyperedges": int(len(self.mean)),
            "min_mean_coverage": float(self.mean.min()) if len(self.mean) else None,
            "min_slack": self.min_slack,
            "flagged": self.flagged.tolist(),
            "mean_size": float(self.sizes.mean()),
            "pass": len(self.flagged) == 0,
        }


def estimate_random_certificate(instance, cfg, trials: int, seed: int | None = None) -> RandomCertificateEstimate:
    """Monte Carlo estimate of E[sum_{v in h} y_v] per hyperedge under RANDOM.

    All trials run side by side: per arrival, each trial draws one uniform
    number and takes the corresponding available hyperedge. ``cfg`` provides
    k, d, seed and the dual values (see ``RandomAlgConfig``).
    """
    from .errors import DegreeBound

    if trials < 100:
        raise ValueError("use at least 100 trials")
    if instance.k != cfg.k:
        raise ValueError(f"instance is {instance.k}-uniform, RANDOM configured for k={cfg.k}")
    rng = np.random.default_rng(np.random.SeedSequence([cfg.seed if seed is None else seed, 0x52414E44]))
    matched = np.zeros((trials, instance.num_offline), dtype=bool)
    y_on, y_off = float(cfg.y_online), float(cfg.y_offline)
    online_hit = []  # per arrival: bool (trials,) whether its online node was matched
    he_offline, he_arrival = [], []
    sizes = np.zeros(trials)
    rows = np.arange(trials)
    for a, (w, hes) in enumerate(instance.arrivals):
        if len(hes) > cfg.d:
            raise DegreeBound(f"online node {w} has degree {len(hes)} > d = {cfg.d}")
        off = np.asarray(hes, dtype=np.int64).reshape(len(hes), -1)
        avail = ~matched[:, off].any(axis=2)  # (trials, n)
        count = avail.sum(axis=1)
        pick = np.minimum((rng.random(trials) * count).astype(np.int64), np.maximum(count - 1, 0))
        # index of the pick-th available hyperedge in each trial
        rank = np.cumsum(avail, axis=1) - 1
        choice = np.argmax(avail & (rank == pick[:, None]), axis=1)
        hit = count > 0
        chosen_nodes = off[choice]  # (trials, k-1)
        matched[rows[hit][:, None], chosen_nodes[hit]] = True
        sizes += hit
        online_hit.append(hit)
        he_offline.append(off)
        he_arrival.extend([a] * len(hes))
    if not he_offline:
        return RandomCertificateEstimate(float(cfg.rho), trials, np.zeros(0), np.zeros(0), sizes)
    off_all = np.vstack(he_offline)
    on_hit = np.stack(online_hit, axis=1)[:, np.asarray(he_arrival)]  # (trials, H)
    cov = y_off * matched[:, off_all].sum(axis=2) + y_on * on_hit
    mean = cov.mean(axis=0)
    stderr = cov.std(axis=0, ddof=1) / np.sqrt(trials)
    return RandomCertificateEstimate(float(cfg.rho), trials, mean, stderr, sizes)
