"""Greedy baselines and the RANDOM algorithm for bounded-degree instances."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..certificates import DualState
from ..errors import ConfigError, DegreeBound
from ..model import ArrivalEvent, MatchingState


def available_mask(state: MatchingState, event: ArrivalEvent) -> np.ndarray:
    """Hyperedges of ``event`` disjoint from the current (integral) matching."""
    free = state.offline_load[event.offline] <= 0.5
    ok = free.all(axis=1)
    if state.online_load_of(event.online_id) > 0.5:
        ok[:] = False
    return ok


def greedy_integral_arrival(state: MatchingState, event: ArrivalEvent) -> int | None:
    """Index (within the event) of the lowest-id available hyperedge, or None."""
    ok = np.flatnonzero(available_mask(state, event))
    return int(ok[0]) if len(ok) else None


def _one_hot(n: int, j: int | None) -> np.ndarray:
    x = np.zeros(n)
    if j is not None:
        x[j] = 1.0
    return x


class GreedyIntegral:
    mode = "integral"
    name = "greedy"

    def start(self, source) -> None:
        pass

    def allocate(self, state, event):
        return _one_hot(event.n, greedy_integral_arrival(state, event))


class GreedyFractional:
    """Fill hyperedges in id order up to the residual capacity of their nodes."""

    mode = "fractional"
    name = "greedy_fractional"

    def start(self, source) -> None:
        pass

    def allocate(self, state, event):
        budget = max(0.0, 1.0 - state.online_load_of(event.online_id))
        flat = event.offline.ravel()
        if len(np.unique(flat)) == len(flat):
            # offline-disjoint: room per hyperedge is independent, fill by prefix sums
            room = np.maximum(0.0, 1.0 - state.offline_load[event.offline].max(axis=1))
            before = np.concatenate([[0.0], np.cumsum(room)[:-1]])
            return np.clip(budget - before, 0.0, room)
        loads = {}
        x = np.zeros(event.n)
        for j, row in enumerate(event.offline.tolist()):
            if budget <= 0:
                break
            room = min(1.0 - loads.get(v, state.offline_load[v]) for v in row)
            amt = max(0.0, min(budget, room))
            if amt > 0:
                x[j] = amt
                budget -= amt
                for v in row:
                    loads[v] = loads.get(v, state.offline_load[v]) + amt
        return x


@dataclass
class RandomAlgConfig:
    k: int = 3
    d: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.k < 2 or self.d < 1:
            raise ConfigError("RANDOM needs k >= 2 and d >= 1")

    @property
    def rho_exact(self) -> Fraction:
        k, d = self.k, self.d
        return min(Fraction(1, k - 1), Fraction(d, (d - 1) * k + 1))

    @property
    def y_online_exact(self) -> Fraction:
        k, d = self.k, self.d
        return max(Fraction(0), Fraction(d - k + 1, (d - 1) * k + 1))

    @property
    def rho(self) -> float:
        return float(self.rho_exact)

    @property
    def y_offline(self) -> float:
        return float(self.rho_exact)

    @property
    def y_online(self) -> float:
        return float(self.y_online_exact)


def arrival_rng(seed: int, arrival_index: int) -> np.random.Generator:
    """Counter-based stream keyed by (seed, arrival index)."""
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, arrival_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def random_arrival(state: MatchingState, event: ArrivalEvent, cfg: RandomAlgConfig,
                   rng: np.random.Generator | None = None):
    """Uniform choice among available hyperedges; returns (index or None, dual assignments).

    Dual assignments are ``(offline_nodes, y_offline, y_online)`` on a match,
    otherwise None.
    """
    if event.n > cfg.d:
        raise DegreeBound(f"online node {event.online_id} has degree {event.n} > d = {cfg.d}")
    rng = rng if rng is not None else arrival_rng(cfg.seed, state.num_arrivals)
    ok = np.flatnonzero(available_mask(state, event))
    if len(ok) == 0:
        return None, None
    j = int(ok[rng.integers(len(ok))]) if len(ok) > 1 else int(ok[0])
    return j, (event.offline[j], cfg.y_offline, cfg.y_online)


class RandomMatching:
    mode = "integral"
    name = "random"

    def __init__(self, cfg: RandomAlgConfig):
        self.cfg = cfg
        self.duals: DualState | None = None

    def start(self, source) -> None:
        if source.k != self.cfg.k:
            raise ConfigError(f"RANDOM configured for k={self.cfg.k}, instance is {source.k}-uniform")
        self.duals = DualState(source.num_offline, self.cfg.rho)

    def allocate(self, state, event):
        j, dual = random_arrival(state, event, self.cfg)
        if dual is not None:
            nodes, y_off, y_on = dual
            self.duals.y_offline[nodes] = y_off
            self.duals.set_online(event.online_id, y_on)
        return _one_hot(event.n, j)
