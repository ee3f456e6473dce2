"""The m-component, T-phase adaptive adversary.

Offline nodes: component c has ranks 1..T on sides U and V. In phase t the
phase matchings of all components are joined, bucketed by their endpoint
loads at phase start, and each bucket is handed to one gadget. Buckets are
played in sorted key order; inside a bucket edges are in (component, U rank)
order. Only after all gadgets of the phase finish do the components advance.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from ..errors import ConfigError
from ..game import IdCounter
from ..model import OfflineNode
from .buckets import bucketize
from .gadget import GADGET_MODES, GadgetState, play_gadget
from .phases import PhaseState, cover_ranks, node_id

DEFAULT_SIZE_LIMIT = 50_000


@dataclass
class AdversaryConfig:
    m: int
    T: int
    epsilon: float = 0.0
    gadget_mode: str = "symmetric_pairs"
    size_limit: int = DEFAULT_SIZE_LIMIT

    def __post_init__(self):
        if self.m < 1 or self.T < 1:
            raise ConfigError("m and T must be positive")
        if self.epsilon < 0:
            raise ConfigError("epsilon must be non-negative")
        if self.gadget_mode not in GADGET_MODES:
            raise ConfigError(f"unknown gadget mode {self.gadget_mode!r}")
        if self.T * self.m > self.size_limit:
            raise ConfigError(f"T*m = {self.T * self.m} exceeds the size limit {self.size_limit}")

    def to_json(self) -> dict:
        d = asdict(self)
        d.pop("size_limit")
        return d

    @classmethod
    def from_json(cls, data: dict, size_limit: int = DEFAULT_SIZE_LIMIT) -> "AdversaryConfig":
        unknown = set(data) - {"m", "T", "epsilon", "gadget_mode"}
        if unknown:
            raise ConfigError(f"unknown adversary config keys {sorted(unknown)}")
        return cls(int(data["m"]), int(data["T"]), float(data.get("epsilon", 0.0)),
                   data.get("gadget_mode", "symmetric_pairs"), size_limit)

    @classmethod
    def load(cls, path) -> "AdversaryConfig":
        return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))


class FullAdversary:
    """Adaptive instance source; play it with :func:`hypermatch.game.run_game`."""

    k = 3

    def __init__(self, m: int, T: int, epsilon: float = 0.0, gadget_mode: str = "symmetric_pairs",
                 size_limit: int = DEFAULT_SIZE_LIMIT):
        self.cfg = AdversaryConfig(m, T, epsilon, gadget_mode, size_limit)
        self.m, self.T = m, T
        self.num_offline = 2 * T * m
        self.components: list[PhaseState] = []
        self.phase_values = np.zeros((T, m))
        self.partner: dict = {}  # (phase, component, a, b) -> hyperedge id
        self.bucket_sizes: list[dict] = []
        self.finished = False

    @classmethod
    def from_config(cls, cfg: AdversaryConfig) -> "FullAdversary":
        return cls(cfg.m, cfg.T, cfg.epsilon, cfg.gadget_mode, cfg.size_limit)

    def descriptor(self) -> dict:
        return {"kind": "adversary", **self.cfg.to_json()}

    def nodes(self) -> list[OfflineNode]:
        return [
            OfflineNode(node_id(c, s, r, self.T), c, "UV"[s], r)
            for c in range(self.m) for s in (0, 1) for r in range(1, self.T + 1)
        ]

    def symmetry_pairs(self) -> np.ndarray:
        return np.array([(node_id(c, 0, r, self.T), node_id(c, 1, r, self.T))
                         for c in range(self.m) for r in range(1, self.T + 1)], dtype=np.int64)

    def _phase_edges(self):
        comp, ea, eb = [], [], []
        for ps in self.components:
            for a, b in sorted(ps.matching):
                comp.append(ps.component)
                ea.append(a)
                eb.append(b)
        comp, ea, eb = (np.array(v, dtype=np.int64) for v in (comp, ea, eb))
        base = comp * 2 * self.T
        nodes = np.column_stack([base + ea - 1, base + self.T + eb - 1])
        return comp, ea, eb, nodes

    def play(self):
        self.components = [PhaseState(c, self.T) for c in range(self.m)]
        self.phase_values[:] = 0.0
        self.partner.clear()
        self.bucket_sizes = []
        self.finished = False
        ids = IdCounter()
        state = None
        symmetric = self.cfg.gadget_mode == "symmetric_pairs"
        for t in range(1, self.T + 1):
            comp, ea, eb, nodes = self._phase_edges()
            loads = state.offline_load if state is not None else np.zeros(self.num_offline)
            part = bucketize(loads[nodes[:, 0]], loads[nodes[:, 1]], unordered=symmetric)
            self.bucket_sizes.append({f"{i},{j}": int(len(v)) for (i, j), v in sorted(part.buckets.items())})
            for key in part.keys():
                pos = part.buckets[key]
                mirror = None
                if symmetric:
                    index = {(int(comp[p]), int(ea[p]), int(eb[p])): k for k, p in enumerate(pos)}
                    mirror = np.array([index.get((int(comp[p]), int(eb[p]), int(ea[p])), -1) for p in pos])
                gs = GadgetState(nodes[pos], self.cfg.gadget_mode, mirror)
                gen = play_gadget(gs, ids, phase=t)
                try:
                    ev = next(gen)
                    while True:
                        state = yield ev
                        ev = gen.send(state)
                except StopIteration:
                    pass
                np.add.at(self.phase_values[t - 1], comp[pos], gs.values)
                for k, p in enumerate(pos):
                    self.partner[(t, int(comp[p]), int(ea[p]), int(eb[p]))] = int(gs.partner[k])
            for ps in self.components:
                if t < self.T:
                    ps.advance_phase(state.offline_load)
                else:
                    ps.finish(state.offline_load)
        self.finished = True

    # ---- reporting -------------------------------------------------
    def _require_finished(self):
        if not self.finished:
            raise RuntimeError("the adversary has not been played to completion")

    def opt(self) -> int:
        return self.T * self.m

    def witness(self) -> list[int]:
        """Hyperedge ids of a perfect matching of size T*m."""
        self._require_finished()
        out = []
        for ps in self.components:
            for t, (a, b) in ps.witness_edges():
                out.append(self.partner[(t, ps.component, a, b)])
        return sorted(out)

    def phase_rows(self) -> list[dict]:
        """One row per (phase, component): r_t, q_t, phase value and cover residual."""
        self._require_finished()
        rows = []
        for ps in self.components:
            for rec in ps.history:
                if rec.t < self.T:
                    cover = cover_ranks(rec.active, rec.t)
                    load_of = dict(zip(rec.active, zip(rec.load_u, rec.load_v)))
                    resid = sum(2.0 - sum(load_of.get(a, (0.0, 0.0))) for a in cover)
                else:
                    resid = float("nan")
                rows.append({
                    "phase": rec.t,
                    "component": ps.component,
                    "r_t": rec.r,
                    "q_t": float(rec.q),
                    "phase_value": float(self.phase_values[rec.t - 1, ps.component]),
                    "residual_capacity": resid,
                })
        rows.sort(key=lambda r: (r["phase"], r["component"]))
        return rows

    def phase_report_csv(self, path=None) -> str:
        buf = io.StringIO()
        cols = ["phase", "component", "r_t", "q_t", "phase_value", "residual_capacity"]
        w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
        w.writeheader()
        for row in self.phase_rows():
            w.writerow({k: (f"{v:.17g}" if isinstance(v, float) else v) for k, v in row.items()})
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text, encoding="utf-8")
        return text

    def per_phase_totals(self) -> dict:
        return {t + 1: float(self.phase_values[t].sum()) for t in range(self.T)}


def expected_offline_nodes(m: int, T: int) -> int:
    return 2 * T * m


def last_phase_budget(T: int, epsilon: float = 0.0) -> float:
    """Per-component bound 2 a (2 + sqrt(T-1)/2) + 2 eps T^2 on the last-phase value."""
    from .psi import A_CONST

    return 2.0 * A_CONST * (2.0 + 0.5 * math.sqrt(max(T - 1, 0))) + 2.0 * epsilon * T * T
