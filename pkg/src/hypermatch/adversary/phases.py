"""Per-component phase matchings and active-rank bookkeeping.

Both sides of a component carry ranks 1..T. The phase-1 matching is the
single edge (1, 1). After phase t the active ranks sigma_t(1) < ... < sigma_t(r_t)
are extended by the fresh rank t + 1, and the next matching pairs position k
with position r_t + 2 - k (1-based). Every matching is closed under reversal.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..errors import PhaseOverflow
from ..model import f

ACTIVE_TOL = 1e-9


def node_id(component: int, side: int, rank: int, T: int) -> int:
    """Dense id of rank ``rank`` (1-based) on ``side`` (0 = U, 1 = V) of ``component``."""
    return component * 2 * T + side * T + (rank - 1)


def next_matching(sigma: list[int], t: int) -> list[tuple[int, int]]:
    """M^(t+1) from the active ranks ``sigma`` at the end of phase t."""
    ext = list(sigma) + [t + 1]
    r = len(sigma)
    return [(ext[k], ext[r - k]) for k in range(r + 1)]


@dataclass
class PhaseRecord:
    """End-of-phase snapshot for one component."""

    t: int
    matching: list
    phi: list  # priority of each matching edge at phase end
    active: list  # sigma_t
    load_u: list  # l(t, i) measured on U, i = 1..r_t
    load_v: list
    retired: list  # matching edges whose ranks went inactive

    @property
    def r(self) -> int:
        return len(self.active)

    @property
    def q(self) -> Fraction:
        return Fraction(self.r + 1, 2)


@dataclass
class PhaseState:
    """Bookkeeping of one component across the T phases."""

    component: int
    T: int
    t: int = 1
    matching: list = field(default_factory=lambda: [(1, 1)])
    history: list = field(default_factory=list)

    def __post_init__(self):
        if self.T < 1:
            raise ValueError("T must be at least 1")

    @property
    def sigma(self) -> list:
        """Active ranks at the end of the previous phase (empty before phase 2)."""
        return self.history[-1].active if self.history else []

    def nodes_of(self, edge) -> tuple[int, int]:
        a, b = edge
        return node_id(self.component, 0, a, self.T), node_id(self.component, 1, b, self.T)

    def matching_nodes(self) -> np.ndarray:
        return np.array([self.nodes_of(e) for e in self.matching], dtype=np.int64).reshape(-1, 2)

    def close_phase(self, loads: np.ndarray, tol: float = ACTIVE_TOL) -> PhaseRecord:
        """Evaluate activeness at the end of the current phase.

        A rank a paired with b is active iff both (a, b) and its mirror (b, a)
        reach priority 1 - tol; under a symmetric algorithm the two agree.
        """
        nodes = self.matching_nodes()
        phi = f(loads[nodes[:, 0]]) + f(loads[nodes[:, 1]])
        hit = {e: bool(p >= 1.0 - tol) for e, p in zip(self.matching, phi.tolist())}
        active = sorted(a for (a, b) in self.matching if hit[(a, b)] and hit.get((b, a), False))
        act = set(active)
        retired = [e for e in self.matching if e[0] not in act]
        c, T = self.component, self.T
        rec = PhaseRecord(
            t=self.t,
            matching=list(self.matching),
            phi=phi.tolist(),
            active=active,
            load_u=[float(loads[node_id(c, 0, a, T)]) for a in active],
            load_v=[float(loads[node_id(c, 1, a, T)]) for a in active],
            retired=retired,
        )
        return rec

    def advance_phase(self, loads: np.ndarray, tol: float = ACTIVE_TOL) -> PhaseRecord:
        """Close phase t and install M^(t+1)."""
        if self.t + 1 > self.T:
            raise PhaseOverflow(f"component {self.component}: phase {self.t + 1} exceeds T = {self.T}")
        rec = self.close_phase(loads, tol)
        self.history.append(rec)
        self.matching = next_matching(rec.active, self.t)
        self.t += 1
        return rec

    def finish(self, loads: np.ndarray, tol: float = ACTIVE_TOL) -> PhaseRecord:
        """Close the last phase without building a successor."""
        rec = self.close_phase(loads, tol)
        self.history.append(rec)
        return rec

    def witness_edges(self) -> list[tuple[int, tuple[int, int]]]:
        """(phase, edge) pairs: retired edges of phases < T plus the last matching.

        Together they form a perfect matching between ranks 1..t on each side,
        where t is the last phase played.
        """
        out = []
        closed = [r for r in self.history if r.t < self.t]
        for rec in closed:
            out.extend((rec.t, e) for e in rec.retired)
        out.extend((self.t, e) for e in self.matching)
        return out


def is_reversal_closed(matching) -> bool:
    s = set(matching)
    return all((b, a) in s for (a, b) in s)


def cover_ranks(active: list, t: int) -> list:
    """Positions 1..ceil(q_t) of sigma_t extended with t + 1; they cover M^(t+1)."""
    ext = list(active) + [t + 1]
    q = Fraction(len(active) + 1, 2)
    return ext[: math.ceil(q)]


def distance_steps(prev_active: list, t_prev: int, active: list) -> list[dict]:
    """Per surviving rank: indices, distances and the distance bound.

    ``prev_active`` is sigma_{t-1}; it is extended with the fresh rank t (the
    rank that joined M^(t)). For each rank u in sigma_t at index i,
    d_t(u) = |i - q_t| and d_{t-1}(u) = |j - q_{t-1}|. The bound asks for
    d_t <= d_{t-1} + 1/2 when i < q_t and d_t <= d_{t-1} - 1/2 when i > q_t.
    """
    ext = list(prev_active) + [t_prev + 1]
    pos_prev = {a: j + 1 for j, a in enumerate(ext)}
    q_prev = Fraction(len(prev_active) + 1, 2)
    q = Fraction(len(active) + 1, 2)
    out = []
    for i, a in enumerate(active, start=1):
        j = pos_prev[a]
        d_now, d_prev = abs(i - q), abs(j - q_prev)
        if i < q:
            bound = d_prev + Fraction(1, 2)
        elif i > q:
            bound = d_prev - Fraction(1, 2)
        else:
            bound = None
        out.append({"rank": a, "i": i, "j": j, "d_t": d_now, "d_prev": d_prev, "bound": bound,
                    "ok": bound is None or d_now <= bound})
    return out
