"""Randomized k-uniform instance against integral algorithms.

Offline nodes form blocks C_1, ..., C_{k-1} with |C_i| = 2(k - i). Online
node w_i (i < k) sees two offline-disjoint hyperedges: each takes half of
C_i and one still-free node from every earlier block. A fair coin puts one of
them into the hidden matching H1. The last online node sees a single
hyperedge made of the remaining free node of every block, so |H1| = k.

A deterministic algorithm that takes the hyperedge outside H1 is blocked for
the rest of the game, which yields V_i = max(V_{i+1}, 1 + V_{i+1}/2).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

import numpy as np

from .errors import ConfigError
from .game import StaticInstance

MAX_ENUM_K = 4
MAX_EXPECTIMAX_K = 12


def block_offsets(k: int) -> list[int]:
    """First node id of each block C_1..C_{k-1}, plus the total count."""
    out, acc = [], 0
    for i in range(1, k):
        out.append(acc)
        acc += 2 * (k - i)
    out.append(acc)
    return out


@dataclass
class HardnessInstance:
    k: int
    coins: tuple  # coins[i-1] in {0, 1}: which hyperedge of w_i joins H1
    phases: list  # phases[i-1] = (hyperedge 0, hyperedge 1) as sorted tuples of offline ids
    final: tuple  # offline nodes of the last hyperedge
    h1: list  # the hidden matching, one hyperedge per online node

    @property
    def num_offline(self) -> int:
        return self.k * (self.k - 1)

    def blocks(self) -> list[range]:
        off = block_offsets(self.k)
        return [range(off[i], off[i + 1]) for i in range(self.k - 1)]

    def free_counts(self, after_phase: int) -> list[int]:
        """|C_j minus V(H1)| for j <= after_phase, with H1 restricted to phases <= after_phase."""
        used = set().union(*self.h1[:after_phase]) if after_phase else set()
        return [len(set(b) - used) for b in self.blocks()[:after_phase]]

    def to_static(self) -> StaticInstance:
        arrivals = [(i, [p[0], p[1]]) for i, p in enumerate(self.phases)]
        arrivals.append((self.k - 1, [self.final]))
        return StaticInstance(self.k, self.num_offline, arrivals)

    def h1_ids(self) -> list[int]:
        """Hyperedge ids (in the static instance) of H1."""
        return [2 * i + c for i, c in enumerate(self.coins)] + [2 * (self.k - 1)]

    def blocking_holds(self) -> bool:
        """Every hyperedge arriving after phase i meets the phase-i hyperedge left out of H1."""
        later_all = [set(h) for p in self.phases for h in p] + [set(self.final)]
        for i, (pair, c) in enumerate(zip(self.phases, self.coins)):
            other = set(pair[1 - c])
            later = later_all[2 * (i + 1):]
            if any(not (other & h) for h in later):
                return False
        return True


def build_hardness_instance(k: int, coins) -> HardnessInstance:
    """Realization for a fixed coin sequence (length k - 1); free nodes picked lowest id first."""
    if k < 2:
        raise ConfigError("k must be at least 2")
    coins = tuple(int(c) for c in coins)
    if len(coins) != k - 1 or any(c not in (0, 1) for c in coins):
        raise ConfigError(f"need {k - 1} coin outcomes in {{0, 1}}")
    off = block_offsets(k)
    free = [list(range(off[j], off[j + 1])) for j in range(k - 1)]
    phases, h1 = [], []
    for i in range(1, k):
        half = k - i
        block = list(range(off[i - 1], off[i]))
        picks = [[], []]
        for j in range(i - 1):
            picks[0].append(free[j][0])
            picks[1].append(free[j][1])
        hes = (tuple(sorted(block[:half] + picks[0])), tuple(sorted(block[half:] + picks[1])))
        chosen = hes[coins[i - 1]]
        phases.append(hes)
        h1.append(chosen)
        taken = set(chosen)
        for j in range(i):
            free[j] = [v for v in free[j] if v not in taken]
    final = tuple(sorted(v for fr in free for v in fr))
    h1.append(final)
    return HardnessInstance(k, coins, phases, final, h1)


def sample_hardness_instance(k: int, seed: int | np.random.Generator = 0) -> HardnessInstance:
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return build_hardness_instance(k, rng.integers(0, 2, size=k - 1).tolist())


def optimal_deterministic_value(k: int) -> Fraction:
    """V_1 from V_k = 1 and V_i = max(V_{i+1}, 1 + V_{i+1}/2)."""
    if k < 2:
        raise ConfigError("k must be at least 2")
    v = Fraction(1)
    for _ in range(k - 1):
        v = max(v, 1 + v / 2)
    return v


def closed_form_value(k: int) -> Fraction:
    return 2 - Fraction(1, 2 ** (k - 1))


def _play(inst: HardnessInstance, actions) -> tuple[int, bool]:
    """Value from the k-1 two-choice phases under ``actions`` (0, 1 or None) and final availability."""
    used: set = set()
    value = 0
    for pair, a in zip(inst.phases, actions):
        if a is None:
            continue
        h = pair[a]
        if used.isdisjoint(h):
            used.update(h)
            value += 1
    return value, used.isdisjoint(inst.final)


def enumerate_strategies_naive(k: int) -> Fraction:
    """Best expected value over every deterministic strategy, one strategy at a time.

    A strategy assigns an action (take first, take second, skip) to every
    history of coin outcomes visible at phase i, and take/skip to every
    history at the final arrival. Feasible for k <= 4.
    """
    if k > MAX_ENUM_K:
        raise ConfigError(f"naive enumeration is limited to k <= {MAX_ENUM_K}")
    coin_seqs = list(product((0, 1), repeat=k - 1))
    insts = [build_hardness_instance(k, c) for c in coin_seqs]
    infosets = [(i, pre) for i in range(k - 1) for pre in product((0, 1), repeat=i)]
    n_final = len(coin_seqs)
    # every take/skip assignment at the final arrival, one row per assignment
    final_choices = np.array(list(product((0, 1), repeat=n_final)), dtype=np.int64)
    best = -1
    for assign in product((0, 1, None), repeat=len(infosets)):
        table = dict(zip(infosets, assign))
        vals = np.empty(n_final, dtype=np.int64)
        avail = np.empty(n_final, dtype=np.int64)
        for s, (c, inst) in enumerate(zip(coin_seqs, insts)):
            acts = [table[(i, c[:i])] for i in range(k - 1)]
            vals[s], avail[s] = _play(inst, acts)
        totals = (vals[None, :] + final_choices * avail[None, :]).sum(axis=1)
        best = max(best, int(totals.max()))
    return Fraction(best, n_final)


def _mask(nodes) -> int:
    return sum(1 << v for v in nodes)


def enumerate_strategies(k: int, chunk: int = 1 << 20) -> Fraction:
    """Best expected value over every deterministic strategy, vectorized over strategies.

    All 3^(2^(k-1) - 1) assignments of actions to the phase histories are
    evaluated on every coin sequence with bitmask arithmetic. Each final
    history is its own decision point and the objective is a sum over coin
    sequences, so taking the final hyperedge whenever it is free is the
    exact maximum over all final assignments. Feasible for k <= 5.
    """
    if k > MAX_ENUM_K + 1:
        raise ConfigError(f"enumeration is limited to k <= {MAX_ENUM_K + 1}")
    coin_seqs = list(product((0, 1), repeat=k - 1))
    insts = [build_hardness_instance(k, c) for c in coin_seqs]
    infosets = {(i, pre): j for j, (i, pre) in
                enumerate((i, pre) for i in range(k - 1) for pre in product((0, 1), repeat=i))}
    total = 3 ** len(infosets)
    best = -1
    for start in range(0, total, chunk):
        strat = np.arange(start, min(total, start + chunk), dtype=np.int64)
        score = np.zeros(len(strat), dtype=np.int64)
        digits = [((strat // 3 ** j) % 3).astype(np.int8) for j in range(len(infosets))]
        for c, inst in zip(coin_seqs, insts):
            used = np.zeros(len(strat), dtype=np.int64)
            for i, pair in enumerate(inst.phases):
                act = digits[infosets[(i, c[:i])]]
                for a in (0, 1):
                    m = _mask(pair[a])
                    take = (act == a) & ((used & m) == 0)
                    used[take] |= m
                    score += take
            score += (used & _mask(inst.final)) == 0
        best = max(best, int(score.max()))
    return Fraction(best, len(coin_seqs))


def expectimax_value(k: int) -> Fraction:
    """Best expected value by backward induction over the game tree of histories."""
    if k > MAX_EXPECTIMAX_K:
        raise ConfigError(f"expectimax is limited to k <= {MAX_EXPECTIMAX_K}")

    @lru_cache(maxsize=None)
    def realization(prefix: tuple) -> HardnessInstance:
        # only the first len(prefix) phases are pinned; pad to build the structure
        return build_hardness_instance(k, prefix + (0,) * (k - 1 - len(prefix)))

    def value(i: int, prefix: tuple, used: frozenset) -> Fraction:
        if i == k - 1:
            return Fraction(int(used.isdisjoint(realization(prefix).final)))
        pair = realization(prefix).phases[i]
        options = [(0, used)]
        for a in (0, 1):
            if used.isdisjoint(pair[a]):
                options.append((1, used | frozenset(pair[a])))
        best = Fraction(-1)
        for gain, nxt in options:
            exp = sum((value(i + 1, prefix + (c,), nxt) for c in (0, 1)), Fraction(0)) / 2
            best = max(best, gain + exp)
        return best

    return value(0, (), frozenset())


def greedy_value(inst: HardnessInstance) -> int:
    """Integral greedy: take the lowest-id available hyperedge at every arrival."""
    used: set = set()
    value = 0
    for pair in inst.phases:
        for h in pair:
            if used.isdisjoint(h):
                used.update(h)
                value += 1
                break
    if used.isdisjoint(inst.final):
        value += 1
    return value


@dataclass
class HardnessSummary:
    k: int
    dp_value: Fraction
    trials: int
    empirical_mean: float
    stderr: float

    @property
    def closed_form(self) -> Fraction:
        return closed_form_value(self.k)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "dp_value": float(self.dp_value),
            "dp_value_exact": str(self.dp_value),
            "closed_form": float(self.closed_form),
            "empirical_mean": self.empirical_mean,
            "stderr": self.stderr,
            "ratio_bound": float(self.dp_value) / self.k,
        }


def simulate_greedy(k: int, trials: int, seed: int = 0) -> HardnessSummary:
    """Monte Carlo of the greedy strategy, which attains the DP optimum on this instance."""
    rng = np.random.default_rng(seed)
    coins = rng.integers(0, 2, size=(trials, k - 1))
    cache: dict = {}
    vals = np.empty(trials)
    for t in range(trials):
        key = tuple(coins[t].tolist())
        if key not in cache:
            cache[key] = greedy_value(build_hardness_instance(k, key))
        vals[t] = cache[key]
    stderr = float(vals.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return HardnessSummary(k, optimal_deterministic_value(k), trials, float(vals.mean()), stderr)
