"""Run-time monitors evaluated by the game loop.

Monitors see the state after every arrival (``on_arrival``), at every phase
boundary (``on_phase_end``) and once at the end (``finish``).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import ArrivalEvent, MatchingState, event_priorities


@dataclass
class ThresholdMonitorReport:
    epsilon: float
    violations: list = field(default_factory=list)  # (online_id, hyperedge_id, phi)
    max_excess: float = float("-inf")
    checked_arrivals: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "num_violations": len(self.violations),
            "violations": [list(v) for v in self.violations[:50]],
            "max_excess": None if self.max_excess == float("-inf") else self.max_excess,
            "checked_arrivals": self.checked_arrivals,
            "pass": self.ok,
        }


class ThresholdMonitor:
    """Checks epsilon-threshold respect on each arrival right after it is processed.

    Arrivals tagged with a phase above ``max_phase`` are not checked. A
    priority counts as a violation once it exceeds 1 + epsilon + tol; the
    small ``tol`` absorbs rounding on hyperedges that sit exactly at 1.
    """

    name = "threshold"

    def __init__(self, epsilon: float = 0.0, max_phase: int | None = None, tol: float = 1e-12):
        self.epsilon = float(epsilon)
        self.max_phase = max_phase
        self.tol = float(tol)
        self.report = ThresholdMonitorReport(self.epsilon)

    def on_arrival(self, state: MatchingState, event: ArrivalEvent, alloc: np.ndarray, phi=None) -> None:
        if self.max_phase is not None and event.phase is not None and event.phase > self.max_phase:
            return
        self.report.checked_arrivals += 1
        pos = alloc > 0
        if not np.any(pos):
            return
        if phi is None:
            phi = event_priorities(state, event)
        phi_pos = phi[pos]
        self.report.max_excess = max(self.report.max_excess, float(phi_pos.max()) - 1.0)
        bad = np.flatnonzero(phi_pos > 1.0 + self.epsilon + self.tol)
        if len(bad):
            ids = event.ids[pos][bad]
            for hid, val in zip(ids, phi_pos[bad]):
                self.report.violations.append((event.online_id, int(hid), float(val)))

    def on_phase_end(self, state, phase) -> None:
        pass

    def finish(self, state) -> ThresholdMonitorReport:
        return self.report


@dataclass
class SymmetryMonitorReport:
    tolerance: float
    max_asymmetry: float = 0.0
    checkpoints: int = 0

    @property
    def ok(self) -> bool:
        return self.max_asymmetry <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "tolerance": self.tolerance,
            "max_asymmetry": self.max_asymmetry,
            "checkpoints": self.checkpoints,
            "pass": self.ok,
        }


class SymmetryMonitor:
    """Compares loads of the t-th U node and t-th V node of every component."""

    name = "symmetry"

    def __init__(self, pairs, tolerance: float = 1e-9):
        self.pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        self.report = SymmetryMonitorReport(tolerance)

    @classmethod
    def from_nodes(cls, nodes, tolerance: float = 1e-9) -> "SymmetryMonitor":
        index = {}
        for n in nodes:
            if n.side in ("U", "V"):
                index[(n.component, n.side, n.rank)] = n.id
        pairs = [
            (uid, index[(c, "V", r)])
            for (c, side, r), uid in sorted(index.items(), key=lambda kv: kv[1])
            if side == "U" and (c, "V", r) in index
        ]
        return cls(pairs, tolerance)

    def _check(self, state: MatchingState) -> None:
        self.report.checkpoints += 1
        if len(self.pairs) == 0:
            return
        load = state.offline_load
        gap = float(np.max(np.abs(load[self.pairs[:, 0]] - load[self.pairs[:, 1]])))
        self.report.max_asymmetry = max(self.report.max_asymmetry, gap)

    def on_arrival(self, state, event, alloc, phi=None) -> None:
        pass

    def on_phase_end(self, state, phase) -> None:
        self._check(state)

    def finish(self, state) -> SymmetryMonitorReport:
        self._check(state)
        return self.report
