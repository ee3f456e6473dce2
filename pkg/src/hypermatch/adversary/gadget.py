"""The obfuscation gadget over a graph matching.

Online node k is joined to every matching edge not yet removed; after the
algorithm answers, the edge of minimum accumulated value is removed and
becomes that node's partner in the optimal solution. In ``symmetric_pairs``
mode, edges without a mirror image go first in plain mode; mirrored pairs
then see two identical arrivals per round, after which the pair of minimum
total value is removed, so mirrored edges are always treated alike.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError
from ..game import IdCounter

TIE_TOL = 1e-12
GADGET_MODES = ("plain", "symmetric_pairs")


@dataclass
class GadgetState:
    """Edges (offline node pairs) of one gadget with their gadget-local values."""

    edges: np.ndarray  # (n, 2)
    mode: str = "plain"
    mirror: np.ndarray | None = None  # position of the mirror edge, or -1
    values: np.ndarray = field(init=False)
    partner: np.ndarray = field(init=False)  # hyperedge id matched to each edge in the witness
    removed: list = field(default_factory=list)
    arrivals: int = 0

    def __post_init__(self):
        if self.mode not in GADGET_MODES:
            raise ConfigError(f"unknown gadget mode {self.mode!r}")
        self.edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        n = len(self.edges)
        if len(np.unique(self.edges)) != 2 * n:
            raise ValueError("gadget edges must form a matching")
        self.values = np.zeros(n)
        self.partner = np.full(n, -1, dtype=np.int64)
        if self.mirror is None:
            self.mirror = np.full(n, -1, dtype=np.int64)
        self.mirror = np.asarray(self.mirror, dtype=np.int64)

    @property
    def n(self) -> int:
        return len(self.edges)

    def singles_and_pairs(self) -> tuple[np.ndarray, np.ndarray]:
        if self.mode == "plain":
            return np.arange(self.n), np.empty((0, 2), dtype=np.int64)
        pos = np.arange(self.n)
        mir = self.mirror
        paired = (mir >= 0) & (mir != pos)
        paired &= np.where(paired, mir[np.where(paired, mir, 0)] == pos, False)
        singles = pos[~paired]
        lo = pos[paired & (pos < mir)]
        return singles, np.column_stack([lo, mir[lo]]).astype(np.int64)

    def done(self) -> bool:
        return len(self.removed) == self.n


def _argmin_lowest(v: np.ndarray) -> int:
    return int(np.flatnonzero(v <= v.min() + TIE_TOL)[0])


def play_gadget(gs: GadgetState, ids: IdCounter, phase=None, tags=None):
    """Generator of arrival events; send the state back after each one."""
    singles, pairs = gs.singles_and_pairs()
    remaining = np.sort(singles)
    while len(remaining):
        ev = ids.event(gs.edges[remaining], phase, tags)
        state = yield ev
        gs.arrivals += 1
        gs.values[remaining] += state.last_allocation
        j = _argmin_lowest(gs.values[remaining])
        pos = int(remaining[j])
        gs.partner[pos] = ev.first_id + j
        gs.removed.append(pos)
        remaining = np.delete(remaining, j)

    groups = pairs[np.argsort(pairs[:, 0])] if len(pairs) else pairs
    while len(groups):
        flat = np.sort(groups.ravel())
        where = {int(p): k for k, p in enumerate(flat)}
        firsts = []
        for _ in range(2):
            ev = ids.event(gs.edges[flat], phase, tags)
            state = yield ev
            gs.arrivals += 1
            gs.values[flat] += state.last_allocation
            firsts.append(ev.first_id)
        totals = gs.values[groups[:, 0]] + gs.values[groups[:, 1]]
        g = _argmin_lowest(totals)
        p, q = int(groups[g, 0]), int(groups[g, 1])
        gs.partner[p] = firsts[0] + where[p]
        gs.partner[q] = firsts[1] + where[q]
        gs.removed.extend([p, q])
        groups = np.delete(groups, g, axis=0)
    return gs


def prefix_bound(n: int) -> np.ndarray:
    """B_l = sum_{k<=l} sum_{i<=k} 1/(n-i+1) for l = 1..n."""
    inner = np.cumsum(1.0 / (n - np.arange(1, n + 1) + 1))
    return np.cumsum(inner)


def prefix_margins(gs: GadgetState) -> np.ndarray:
    """B_l - sum_{k<=l} x'(e_k) along the removal order (plain mode)."""
    order = np.asarray(gs.removed, dtype=np.int64)
    return prefix_bound(gs.n)[: len(order)] - np.cumsum(gs.values[order])


def gadget_value_bound(n: int, delta: float = 1.0, extra: float = 1.5) -> float:
    """(1 - e^-delta) n + extra."""
    return (1.0 - np.exp(-delta)) * n + extra


class GadgetSource:
    """A standalone gadget over ``n`` fresh disjoint offline edges (2i, 2i+1)."""

    k = 3

    def __init__(self, n: int, mode: str = "plain", edges=None, mirror=None):
        if n < 1:
            raise ConfigError("a gadget needs at least one edge")
        self.n = n
        edges = np.arange(2 * n).reshape(n, 2) if edges is None else np.asarray(edges).reshape(-1, 2)
        if len(edges) != n:
            raise ConfigError("edge list does not match n")
        self.num_offline = int(edges.max()) + 1
        self.mode = mode
        self._edges = edges
        self._mirror = mirror
        self.gadget: GadgetState | None = None

    def descriptor(self) -> dict:
        return {"kind": "gadget", "n": self.n, "mode": self.mode}

    def play(self):
        self.gadget = GadgetState(self._edges, self.mode, self._mirror)
        yield from play_gadget(self.gadget, IdCounter(), phase=1)

    def witness(self) -> list[int]:
        if self.gadget is None or not self.gadget.done():
            raise RuntimeError("the gadget has not been played to completion")
        return sorted(int(h) for h in self.gadget.partner)
