"""Instance model: offline nodes, hyperedges, arrival events and the matching state.

Hyperedge ids are dense and assigned in arrival order, so every event carries a
contiguous id range ``first_id .. first_id + n - 1``. Offline nodes of an event
are held as an ``(n, k - 1)`` integer array rather than per-hyperedge objects;
the adversarial constructions reveal hundreds of millions of hyperedges and the
state must stay array-backed to keep up.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import CapacityViolation, UnknownHyperedge, WrongUniformity

E = math.e
#: Competitive ratio of water-filling on 3-uniform hypergraphs, (e - 1) / (e + 1).
RHO = (E - 1.0) / (E + 1.0)
#: Load at which a fresh edge reaches priority 1, ln((e + 1) / 2).
FRESH_LEVEL = math.log((E + 1.0) / 2.0)
FEAS_TOL = 1e-9


def f(x):
    """Threshold function e^x / (e + 1); accepts scalars or arrays."""
    return np.exp(x) / (E + 1.0)


class GrowableArray:
    """Append-only numpy buffer with amortised doubling."""

    def __init__(self, dtype, width: int | None = None, capacity: int = 256):
        shape = (capacity,) if width is None else (capacity, width)
        self._data = np.zeros(shape, dtype=dtype)
        self._n = 0

    def __len__(self) -> int:
        return self._n

    def _reserve(self, extra: int) -> None:
        need = self._n + extra
        if need <= len(self._data):
            return
        cap = max(need, 2 * len(self._data))
        grown = np.zeros((cap,) + self._data.shape[1:], dtype=self._data.dtype)
        grown[: self._n] = self._data[: self._n]
        self._data = grown

    def extend(self, values) -> None:
        values = np.asarray(values, dtype=self._data.dtype)
        self._reserve(len(values))
        self._data[self._n : self._n + len(values)] = values
        self._n += len(values)

    def ensure_size(self, size: int) -> None:
        """Zero-extend so that index ``size - 1`` is valid."""
        if size > self._n:
            self._reserve(size - self._n)
            self._n = size

    @property
    def view(self) -> np.ndarray:
        return self._data[: self._n]


@dataclass(frozen=True)
class OfflineNode:
    id: int
    component: int | None = None
    side: str | None = None  # "U" or "V"
    rank: int | None = None  # 1-based within side


class Hyperedge(NamedTuple):
    id: int
    online: int
    offline: tuple


class ArrivalEvent:
    """One online node together with its incident hyperedges."""

    __slots__ = ("online_id", "offline", "first_id", "phase", "tags")

    def __init__(self, online_id: int, offline, first_id: int, phase: int | None = None, tags=None):
        offline = np.asarray(offline, dtype=np.int64)
        if offline.ndim != 2 or offline.shape[0] == 0:
            raise ValueError("an arrival needs a non-empty (n, k-1) array of offline nodes")
        if offline.shape[1] >= 2:
            srt = np.sort(offline, axis=1)
            if np.any(srt[:, 1:] == srt[:, :-1]):
                raise ValueError("offline nodes of a hyperedge must be distinct")
        if offline.size and offline.min() < 0:
            raise ValueError("offline ids must be non-negative")
        self.online_id = int(online_id)
        self.offline = offline
        self.first_id = int(first_id)
        self.phase = phase
        self.tags = tags

    @classmethod
    def from_lists(cls, online_id: int, hyperedges: Sequence[Sequence[int]], first_id: int, phase=None):
        return cls(online_id, np.asarray(hyperedges, dtype=np.int64).reshape(len(hyperedges), -1), first_id, phase)

    @property
    def n(self) -> int:
        return self.offline.shape[0]

    @property
    def k(self) -> int:
        return self.offline.shape[1] + 1

    @property
    def ids(self) -> np.ndarray:
        return np.arange(self.first_id, self.first_id + self.n)

    @property
    def hyperedges(self) -> list[Hyperedge]:
        return [
            Hyperedge(self.first_id + j, self.online_id, tuple(int(v) for v in row))
            for j, row in enumerate(self.offline)
        ]

    def __repr__(self) -> str:
        return f"ArrivalEvent(online_id={self.online_id}, n={self.n}, first_id={self.first_id}, phase={self.phase})"


class MatchingState:
    """Primal solution built online: hyperedge values plus node loads.

    With ``record=False`` only loads, the running value and the latest
    allocation are kept; per-hyperedge arrays are skipped.
    """

    def __init__(self, k: int, num_offline: int, mode: str = "fractional", record: bool = True,
                 tol: float = FEAS_TOL):
        if mode not in ("fractional", "integral"):
            raise ValueError(f"unknown mode {mode!r}")
        self.k = int(k)
        self.mode = mode
        self.record = record
        self.tol = tol
        self.offline_load = np.zeros(int(num_offline))
        self._online_load = GrowableArray(np.float64)
        self.value = 0.0
        self.num_hyperedges = 0
        self.num_arrivals = 0
        self.last_event: ArrivalEvent | None = None
        self.last_allocation: np.ndarray | None = None
        if record:
            self._x = GrowableArray(np.float64)
            self._he_online = GrowableArray(np.int64)
            self._he_arrival = GrowableArray(np.int64)
            self._he_offline = GrowableArray(np.int64, width=self.k - 1)

    @property
    def num_offline(self) -> int:
        return len(self.offline_load)

    @property
    def online_load(self) -> np.ndarray:
        return self._online_load.view

    def online_load_of(self, w: int) -> float:
        view = self._online_load.view
        return float(view[w]) if w < len(view) else 0.0

    def _require_record(self):
        if not self.record:
            raise RuntimeError("state was created with record=False")

    @property
    def x(self) -> np.ndarray:
        self._require_record()
        return self._x.view

    @property
    def he_online(self) -> np.ndarray:
        self._require_record()
        return self._he_online.view

    @property
    def he_offline(self) -> np.ndarray:
        self._require_record()
        return self._he_offline.view

    @property
    def he_arrival(self) -> np.ndarray:
        self._require_record()
        return self._he_arrival.view

    def load(self, node: int) -> float:
        return float(self.offline_load[node])

    def recomputed_loads(self) -> tuple[np.ndarray, np.ndarray]:
        """Loads rebuilt from the recorded x; used by consistency checks."""
        off = np.zeros(self.num_offline)
        np.add.at(off, self.he_offline.ravel(), np.repeat(self.x, self.k - 1))
        on = np.zeros(len(self.online_load))
        np.add.at(on, self.he_online, self.x)
        return off, on

    def coerce_allocation(self, event: ArrivalEvent, alloc) -> np.ndarray:
        if alloc is None:
            return np.zeros(event.n)
        if isinstance(alloc, Mapping):
            out = np.zeros(event.n)
            for hid, val in alloc.items():
                j = int(hid) - event.first_id
                if not 0 <= j < event.n:
                    raise UnknownHyperedge(hid)
                out[j] = float(val)
            return out
        out = np.asarray(alloc, dtype=np.float64)
        if out.shape != (event.n,):
            raise ValueError(f"allocation has shape {out.shape}, event has {event.n} hyperedges")
        return out

    def apply(self, event: ArrivalEvent, alloc) -> "MatchingState":
        """Irrevocably add ``alloc`` to the hyperedges of ``event`` (in place)."""
        if event.k != self.k:
            raise WrongUniformity(f"event is {event.k}-uniform, state is {self.k}-uniform")
        if event.first_id != self.num_hyperedges:
            raise ValueError(f"event ids start at {event.first_id}, expected {self.num_hyperedges}")
        x = self.coerce_allocation(event, alloc)
        if np.any(x < 0) or not np.all(np.isfinite(x)):
            raise ValueError("allocations must be finite and non-negative")
        if self.mode == "integral" and np.any((x != 0.0) & (x != 1.0)):
            raise ValueError("integral mode accepts only 0/1 allocations")

        nodes, inv = np.unique(event.offline, return_inverse=True)
        inc = np.bincount(inv.ravel(), weights=np.repeat(x, self.k - 1), minlength=len(nodes))
        new_loads = self.offline_load[nodes] + inc
        over = np.flatnonzero(new_loads > 1.0 + self.tol)
        if len(over):
            j = over[np.argmax(new_loads[over])]
            raise CapacityViolation(int(nodes[j]), float(new_loads[j]))
        total = float(x.sum())
        w_load = self.online_load_of(event.online_id) + total
        if w_load > 1.0 + self.tol:
            raise CapacityViolation(("online", event.online_id), w_load)

        self.offline_load[nodes] = new_loads
        self._online_load.ensure_size(event.online_id + 1)
        self._online_load.view[event.online_id] = w_load
        self.value += total
        if self.record:
            self._x.extend(x)
            self._he_online.extend(np.full(event.n, event.online_id))
            self._he_arrival.extend(np.full(event.n, self.num_arrivals))
            self._he_offline.extend(event.offline)
        self.num_hyperedges += event.n
        self.num_arrivals += 1
        self.last_event = event
        self.last_allocation = x
        return self


def apply_allocation(state: MatchingState, event: ArrivalEvent, alloc) -> MatchingState:
    return state.apply(event, alloc)


def priority_of_loads(load_u, load_v):
    return f(load_u) + f(load_v)


def priority(state: MatchingState, h) -> float:
    """phi(h) = f(load u) + f(load v) for a 3-uniform hyperedge h = {u, v, w}."""
    if state.k != 3:
        raise WrongUniformity("priority is defined for 3-uniform hypergraphs")
    offline = h.offline if isinstance(h, Hyperedge) else h
    u, v = offline
    return float(priority_of_loads(state.offline_load[u], state.offline_load[v]))


def event_priorities(state: MatchingState, event: ArrivalEvent) -> np.ndarray:
    """Sum of f(load) over the offline nodes of every hyperedge of ``event``."""
    return f(state.offline_load[event.offline]).sum(axis=1)


@dataclass
class InducedGraphMatching:
    edges: dict
    total: float


def induced_graph_matching(state: MatchingState) -> InducedGraphMatching:
    """Aggregate hyperedge values onto offline pairs: x'_(u,v) = sum of x_h over h containing u, v."""
    if state.k != 3:
        raise WrongUniformity("the induced graph is defined for 3-uniform hypergraphs")
    x = state.x
    pos = x > 0
    if not np.any(pos):
        return InducedGraphMatching({}, 0.0)
    pairs = np.sort(state.he_offline[pos], axis=1)
    keys, inv = np.unique(pairs, axis=0, return_inverse=True)
    sums = np.bincount(inv.ravel(), weights=x[pos])
    edges = {(int(a), int(b)): float(s) for (a, b), s in zip(keys, sums)}
    return InducedGraphMatching(edges, float(sums.sum()))


def node_table(nodes: Iterable[OfflineNode]) -> dict:
    """Column view (component, side, rank arrays) of offline node metadata."""
    nodes = sorted(nodes, key=lambda n: n.id)
    if [n.id for n in nodes] != list(range(len(nodes))):
        raise ValueError("offline node ids must be dense and contiguous from 0")
    seen = set()
    for n in nodes:
        if n.side is not None:
            key = (n.component, n.side, n.rank)
            if key in seen:
                raise ValueError(f"duplicate (component, side, rank) {key}")
            seen.add(key)
    return {
        "component": np.array([-1 if n.component is None else n.component for n in nodes]),
        "side": np.array([n.side or "" for n in nodes]),
        "rank": np.array([-1 if n.rank is None else n.rank for n in nodes]),
    }
