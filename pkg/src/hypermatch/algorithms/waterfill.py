"""Water-filling for 3-uniform hypergraphs, with primal-dual bookkeeping.

Raising x on a hyperedge {u, v, w} by s multiplies its priority by e^s, since
f(l + s) = f(l) e^s. When the hyperedges of an arrival are offline-disjoint the
continuous process therefore has a closed form: every hyperedge below the
water level lambda is lifted to priority lambda, capped at 1, and lambda is
chosen so the online budget is spent or every hyperedge has reached 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..certificates import DualState
from ..errors import ConfigError, NotDisjoint, WrongUniformity
from ..model import RHO, ArrivalEvent, MatchingState, f

MODES = ("exact_disjoint", "discretized")


@dataclass
class WaterFillConfig:
    mode: str = "exact_disjoint"
    step: float = 1e-4
    # relative tolerance for priority ties in discretized mode
    level_tolerance: float = 1e-12

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown water-filling mode {self.mode!r}")
        if not self.step > 0:
            raise ConfigError("step must be positive")
        if not self.level_tolerance > 0:
            raise ConfigError("level_tolerance must be positive")


def water_level(base: np.ndarray, budget: float = 1.0) -> float:
    """Level lambda* for base priorities ``base`` and online budget ``budget``.

    With g(lam) = sum_j max(0, ln(min(lam, 1) / p_j)), returns 1 when
    g(1) <= budget and otherwise the unique lam in [min p, 1] with g(lam) = budget.
    """
    p = np.sort(np.asarray(base, dtype=np.float64))
    p = p[p < 1.0]
    if len(p) == 0:
        return 1.0
    logs = np.log(p)
    if -logs.sum() <= budget:
        return 1.0
    # with the s lowest priorities active: s * ln(lam) - sum ln p = budget
    s = np.arange(1, len(p) + 1)
    cand = (budget + np.cumsum(logs)) / s
    nxt = np.append(logs[1:], np.inf)
    first = int(np.argmax(cand <= nxt))
    return float(math.exp(cand[first]))


def _check_event(state: MatchingState, event: ArrivalEvent) -> None:
    if state.k != 3 or event.k != 3:
        raise WrongUniformity("water-filling is defined for 3-uniform hypergraphs")


def is_offline_disjoint(event: ArrivalEvent) -> bool:
    flat = event.offline.ravel()
    return len(np.unique(flat)) == len(flat)


def _exact(state: MatchingState, event: ArrivalEvent) -> np.ndarray:
    if not is_offline_disjoint(event):
        raise NotDisjoint("exact_disjoint mode needs offline-disjoint hyperedges in each arrival")
    loads = state.offline_load[event.offline]
    base = f(loads).sum(axis=1)
    budget = max(0.0, 1.0 - state.online_load_of(event.online_id))
    lam = water_level(base, budget)
    x = np.maximum(0.0, np.log(lam / base))
    # float guard only; exact arithmetic already keeps loads <= 1
    return np.minimum(x, np.maximum(0.0, 1.0 - loads.max(axis=1)))


def _discretized(state: MatchingState, event: ArrivalEvent, cfg: WaterFillConfig) -> np.ndarray:
    nodes, inv = np.unique(event.offline, return_inverse=True)
    inv = inv.reshape(event.offline.shape)
    loads = state.offline_load[nodes].copy()
    n = event.n
    x = np.zeros(n)
    budget = max(0.0, 1.0 - state.online_load_of(event.online_id))
    spent = 0.0
    top = 1.0 - 1e-12
    max_iter = int(20 / cfg.step) + 10_000
    for _ in range(max_iter):
        remaining = budget - spent
        if remaining <= 1e-15:
            break
        phi = f(loads[inv]).sum(axis=1)
        eligible = phi < top
        if not np.any(eligible):
            break
        low = phi[eligible].min()
        active = eligible & (phi <= low * (1.0 + cfg.level_tolerance))
        mult = np.bincount(inv[active].ravel(), minlength=len(nodes))
        cmax = int(mult.max())
        size = int(active.sum())
        # never lift an active hyperedge past priority 1
        s = min(cfg.step, math.log(1.0 / low) / cmax)
        if size * s >= remaining:
            s = remaining / size
        x[active] += s
        loads += mult * s
        spent += size * s
    return x


def waterfill_arrival(state: MatchingState, event: ArrivalEvent, cfg: WaterFillConfig | None = None) -> np.ndarray:
    """Allocation water-filling makes on ``event`` given the current loads."""
    cfg = cfg or WaterFillConfig()
    _check_event(state, event)
    if cfg.mode == "exact_disjoint":
        return _exact(state, event)
    return _discretized(state, event, cfg)


@dataclass
class DualIncrement:
    offline_nodes: np.ndarray  # distinct offline nodes touched
    offline: np.ndarray  # increment per entry of offline_nodes
    online: float
    per_hyperedge: np.ndarray | None  # (n, 3): dy_u, dy_v, dy_w; only for disjoint events


def waterfill_duals(state: MatchingState, event: ArrivalEvent, allocation) -> DualIncrement:
    """Dual increments for ``allocation`` on ``event``; ``state`` is the state before it is applied.

    Offline duals follow y_u = f(l_u) - f(0), so each node gains
    f(l_after) - f(l_before); the online node receives the remainder, which
    makes the increments sum to the allocation exactly.
    """
    _check_event(state, event)
    x = np.asarray(allocation, dtype=np.float64)
    nodes, inv = np.unique(event.offline, return_inverse=True)
    inc = np.bincount(inv.ravel(), weights=np.repeat(x, 2), minlength=len(nodes))
    before = state.offline_load[nodes]
    dy = f(before + inc) - f(before)
    dy_w = float(x.sum() - dy.sum())
    per_he = None
    if len(nodes) == 2 * event.n:
        loads = state.offline_load[event.offline]
        du = f(loads[:, 0] + x) - f(loads[:, 0])
        dv = f(loads[:, 1] + x) - f(loads[:, 1])
        per_he = np.column_stack([du, dv, x - du - dv])
    return DualIncrement(nodes, dy, dy_w, per_he)


class WaterFilling:
    """Online algorithm object; keeps the dual solution for certification."""

    mode = "fractional"
    name = "waterfill"

    def __init__(self, cfg: WaterFillConfig | None = None):
        self.cfg = cfg or WaterFillConfig()
        self.duals: DualState | None = None

    def start(self, source) -> None:
        if source.k != 3:
            raise WrongUniformity("water-filling is defined for 3-uniform hypergraphs")
        self.duals = DualState(source.num_offline, RHO)

    def allocate(self, state: MatchingState, event: ArrivalEvent) -> np.ndarray:
        x = waterfill_arrival(state, event, self.cfg)
        inc = waterfill_duals(state, event, x)
        self.duals.y_offline[inc.offline_nodes] += inc.offline
        self.duals.add_online(event.online_id, inc.online)
        return x
