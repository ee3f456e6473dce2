"""Online rounding of a fractional solution into a b-matching.

Each hyperedge of an arrival is sampled with probability (1 - eps) x_h and
kept if none of its nodes (the online node included) already has degree b.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError
from ..model import ArrivalEvent


@dataclass
class RoundingState:
    epsilon: float
    b: int
    num_offline: int
    sampled: list = field(default_factory=list)
    matched: list = field(default_factory=list)

    def __post_init__(self):
        if not 0 < self.epsilon < 0.5:
            raise ConfigError("epsilon must lie in (0, 1/2)")
        if self.b < 1:
            raise ConfigError("b must be at least 1")
        self.offline_degree = np.zeros(self.num_offline, dtype=np.int64)
        self.online_degree: dict = {}

    def max_degree(self) -> int:
        on = max(self.online_degree.values(), default=0)
        off = int(self.offline_degree.max()) if self.num_offline else 0
        return max(on, off)


def rounding_arrival(rs: RoundingState, event: ArrivalEvent, x, rng: np.random.Generator) -> list[int]:
    """Sample and accept hyperedges of ``event``; returns accepted hyperedge ids (canonical order)."""
    x = np.asarray(x, dtype=np.float64)
    probs = (1.0 - rs.epsilon) * np.clip(x, 0.0, 1.0)
    hits = rng.random(event.n) < probs
    accepted = []
    w = event.online_id
    for j in np.flatnonzero(hits):
        hid = event.first_id + int(j)
        rs.sampled.append(hid)
        row = event.offline[j]
        if rs.online_degree.get(w, 0) < rs.b and np.all(rs.offline_degree[row] < rs.b):
            rs.offline_degree[row] += 1
            rs.online_degree[w] = rs.online_degree.get(w, 0) + 1
            rs.matched.append(hid)
            accepted.append(hid)
    return accepted


def rounding_guarantee(k: int, b: int, epsilon: float) -> float:
    """Factor (1 - eps)(1 - k exp(-eps^2 b / 3)) multiplying the fractional value."""
    return (1.0 - epsilon) * (1.0 - k * math.exp(-epsilon * epsilon * b / 3.0))


@dataclass
class RoundingSummary:
    fractional_value: float
    sizes: np.ndarray
    max_degree: int
    guarantee: float

    @property
    def mean(self) -> float:
        return float(self.sizes.mean())

    @property
    def stderr(self) -> float:
        return float(self.sizes.std(ddof=1) / math.sqrt(len(self.sizes))) if len(self.sizes) > 1 else 0.0

    @property
    def bound(self) -> float:
        return self.guarantee * self.fractional_value

    def to_dict(self) -> dict:
        return {
            "fractional_value": self.fractional_value,
            "trials": int(len(self.sizes)),
            "mean_size": self.mean,
            "stderr": self.stderr,
            "bound": self.bound,
            "guarantee_factor": self.guarantee,
            "max_degree": self.max_degree,
            "pass": self.mean >= self.bound - 3 * self.stderr,
        }


def simulate_rounding(events: list[ArrivalEvent], allocations: list[np.ndarray], num_offline: int, k: int,
                      b: int, epsilon: float, trials: int, seed: int = 0) -> RoundingSummary:
    """Round a fixed fractional run ``trials`` times with independent streams."""
    sizes = np.zeros(trials)
    max_deg = 0
    seq = np.random.SeedSequence(seed)
    for t, child in enumerate(seq.spawn(trials)):
        rng = np.random.default_rng(child)
        rs = RoundingState(epsilon, b, num_offline)
        for ev, x in zip(events, allocations):
            rounding_arrival(rs, ev, x, rng)
        sizes[t] = len(rs.matched)
        max_deg = max(max_deg, rs.max_degree())
    frac = float(sum(float(np.sum(x)) for x in allocations))
    return RoundingSummary(frac, sizes, max_deg, rounding_guarantee(k, b, epsilon))
