"""The online protocol: instance sources, the game loop and transcripts.

A source is any object with ``k``, ``num_offline`` and a ``play()`` generator.
The generator yields :class:`ArrivalEvent` objects and receives the (read-only)
:class:`MatchingState` back after the algorithm has answered, so static event
lists and adaptive adversaries share one contract.
"""
from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .model import ArrivalEvent, GrowableArray, MatchingState, event_priorities


class IdCounter:
    """Hands out dense online-node and hyperedge ids."""

    def __init__(self):
        self.next_online = 0
        self.next_hyperedge = 0

    def event(self, offline, phase=None, tags=None) -> ArrivalEvent:
        ev = ArrivalEvent(self.next_online, offline, self.next_hyperedge, phase=phase, tags=tags)
        self.next_online += 1
        self.next_hyperedge += ev.n
        return ev


@dataclass
class StaticInstance:
    """A fixed arrival sequence; ``arrivals[i] = (online_id, [offline tuples])``."""

    k: int
    num_offline: int
    arrivals: list
    nodes: list | None = None

    def __post_init__(self):
        seen = set()
        for w, hes in self.arrivals:
            if w in seen:
                raise ValueError(f"online node {w} arrives twice")
            seen.add(w)
            if not hes:
                raise ValueError(f"online node {w} has no hyperedges")
            for h in hes:
                if len(h) != self.k - 1 or len(set(h)) != len(h):
                    raise ValueError(f"hyperedge {h} of online node {w} is not {self.k}-uniform")
                if min(h) < 0 or max(h) >= self.num_offline:
                    raise ValueError(f"hyperedge {h} references an unknown offline node")

    @property
    def num_hyperedges(self) -> int:
        return sum(len(hes) for _, hes in self.arrivals)

    def events(self) -> list[ArrivalEvent]:
        out, first = [], 0
        for w, hes in self.arrivals:
            out.append(ArrivalEvent.from_lists(w, hes, first))
            first += len(hes)
        return out

    def play(self):
        for ev in self.events():
            yield ev

    def hyperedge_sets(self) -> list[tuple[int, tuple]]:
        return [(w, tuple(h)) for w, hes in self.arrivals for h in hes]

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "num_offline": self.num_offline,
            "arrivals": [
                {"online_id": int(w), "hyperedges": [[int(v) for v in h] for h in hes]}
                for w, hes in self.arrivals
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "StaticInstance":
        arrivals = [
            (int(a["online_id"]), [tuple(int(v) for v in h) for h in a["hyperedges"]])
            for a in data["arrivals"]
        ]
        return cls(int(data["k"]), int(data["num_offline"]), arrivals)

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json()), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "StaticInstance":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))

    @classmethod
    def from_state(cls, state: MatchingState) -> "StaticInstance":
        """Freeze the hyperedges revealed during a (possibly adaptive) run."""
        arrivals = []
        arr = state.he_arrival
        bounds = np.flatnonzero(np.diff(arr)) + 1
        for block in np.split(np.arange(len(arr)), bounds):
            if len(block) == 0:
                continue
            w = int(state.he_online[block[0]])
            arrivals.append((w, [tuple(int(v) for v in row) for row in state.he_offline[block]]))
        return cls(state.k, state.num_offline, arrivals)


def random_instance(rng: np.random.Generator, k: int = 3, num_offline: int = 12, num_arrivals: int = 12,
                    max_degree: int = 5, disjoint: bool = True, min_degree: int = 1) -> StaticInstance:
    """Random k-uniform instance; with ``disjoint`` each arrival's hyperedges share no offline node."""
    arrivals = []
    for w in range(num_arrivals):
        deg = int(rng.integers(min_degree, max_degree + 1))
        if disjoint:
            deg = min(deg, num_offline // (k - 1))
            nodes = rng.choice(num_offline, size=deg * (k - 1), replace=False)
            hes = [tuple(int(v) for v in sorted(nodes[j * (k - 1):(j + 1) * (k - 1)])) for j in range(deg)]
        else:
            hes = set()
            while len(hes) < deg:
                hes.add(tuple(int(v) for v in sorted(rng.choice(num_offline, size=k - 1, replace=False))))
            hes = sorted(hes)
        arrivals.append((w, hes))
    return StaticInstance(k, num_offline, arrivals)


class Transcript:
    """Per-(arrival, hyperedge) record of allocations and post-arrival priorities.

    A SHA-256 digest of the canonical CSV bytes is maintained even when rows
    are not kept, so very large runs can still be replay-checked.
    """

    header = "arrival_index,online_id,hyperedge_id,allocation,phi_after\n"

    def __init__(self, keep: bool = True):
        self.keep = keep
        self._hash = hashlib.sha256(self.header.encode())
        self._hash_rows = keep
        if keep:
            self.arrival = GrowableArray(np.int64)
            self.online = GrowableArray(np.int64)
            self.hyperedge = GrowableArray(np.int64)
            self.allocation = GrowableArray(np.float64)
            self.phi = GrowableArray(np.float64)

    def record(self, arrival_index: int, event: ArrivalEvent, alloc: np.ndarray, phi: np.ndarray) -> None:
        if self.keep:
            n = event.n
            self.arrival.extend(np.full(n, arrival_index))
            self.online.extend(np.full(n, event.online_id))
            self.hyperedge.extend(event.ids)
            self.allocation.extend(alloc)
            self.phi.extend(phi)
            self._hash.update(self._rows_text(arrival_index, event.online_id, event.ids, alloc, phi).encode())
        else:
            # binary digest: same information, no text formatting
            self._hash.update(np.array([arrival_index, event.online_id, event.first_id, event.n], np.int64).tobytes())
            self._hash.update(np.ascontiguousarray(alloc, np.float64).tobytes())
            self._hash.update(np.ascontiguousarray(phi, np.float64).tobytes())

    @staticmethod
    def _rows_text(arrival_index, online_id, ids, alloc, phi) -> str:
        return "".join(
            f"{arrival_index},{online_id},{hid},{a:.17g},{p:.17g}\n" for hid, a, p in zip(ids.tolist(), alloc.tolist(), phi.tolist())
        )

    @property
    def digest(self) -> str:
        kind = "csv" if self._hash_rows else "bin"
        return f"{kind}:{self._hash.hexdigest()}"

    def __len__(self) -> int:
        return len(self.arrival) if self.keep else 0

    def to_csv(self, path) -> None:
        if not self.keep:
            raise RuntimeError("transcript rows were not kept")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.header)
            chunk = 200_000
            for s in range(0, len(self), chunk):
                sl = slice(s, s + chunk)
                fh.write("".join(
                    f"{a},{w},{h},{x:.17g},{p:.17g}\n"
                    for a, w, h, x, p in zip(
                        self.arrival.view[sl].tolist(), self.online.view[sl].tolist(),
                        self.hyperedge.view[sl].tolist(), self.allocation.view[sl].tolist(),
                        self.phi.view[sl].tolist(),
                    )
                ))


@dataclass
class GameLog:
    """What a single game produced besides the final state."""

    value: float
    arrivals: int
    phase_values: dict = field(default_factory=dict)
    monitor_reports: dict = field(default_factory=dict)
    transcript: Transcript | None = None
    runtime: float = 0.0


def run_game(algorithm, source, monitors: Sequence = (), record: bool = True,
             keep_transcript: bool = True) -> tuple[MatchingState, GameLog]:
    """Play ``algorithm`` against ``source`` until the source is exhausted."""
    start = time.perf_counter()
    state = MatchingState(source.k, source.num_offline, mode=algorithm.mode, record=record)
    algorithm.start(source)
    transcript = Transcript(keep=keep_transcript)
    phase_values: dict = {}
    current_phase = None
    gen = source.play()
    try:
        event = next(gen)
        while True:
            if current_phase is not None and event.phase != current_phase:
                for mon in monitors:
                    mon.on_phase_end(state, current_phase)
            current_phase = event.phase
            alloc = algorithm.allocate(state, event)
            state.apply(event, alloc)
            alloc = state.last_allocation
            phi = event_priorities(state, event)
            for mon in monitors:
                mon.on_arrival(state, event, alloc, phi)
            transcript.record(state.num_arrivals - 1, event, alloc, phi)
            key = event.phase if event.phase is not None else 0
            phase_values[key] = phase_values.get(key, 0.0) + float(alloc.sum())
            event = gen.send(state)
    except StopIteration:
        pass
    reports = {getattr(mon, "name", type(mon).__name__): mon.finish(state) for mon in monitors}
    log = GameLog(
        value=state.value,
        arrivals=state.num_arrivals,
        phase_values=phase_values,
        monitor_reports=reports,
        transcript=transcript,
        runtime=time.perf_counter() - start,
    )
    return state, log


