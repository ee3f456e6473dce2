"""Offline optima: exhaustive search for small instances, closed forms for the constructions."""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import TooLarge, UnknownSource
from .game import StaticInstance
from .model import MatchingState

DEFAULT_GUARD = 30


@dataclass
class OptReport:
    opt_integral: int
    witness: list = field(default_factory=list)  # hyperedge ids
    source: str = "brute_force"

    def to_dict(self) -> dict:
        return {"opt": self.opt_integral, "opt_source": self.source, "witness": list(self.witness)}


def _hyperedges(instance) -> list[tuple[int, tuple]]:
    """(online id, offline tuple) per hyperedge, in id order."""
    if isinstance(instance, StaticInstance):
        return instance.hyperedge_sets()
    if isinstance(instance, MatchingState):
        return [(int(w), tuple(int(v) for v in row))
                for w, row in zip(instance.he_online, instance.he_offline)]
    return [(int(w), tuple(int(v) for v in h)) for w, h in instance]


def is_matching(hyperedges: list[tuple[int, tuple]], ids) -> bool:
    seen_on, seen_off = set(), set()
    for hid in ids:
        w, off = hyperedges[hid]
        if w in seen_on or seen_off.intersection(off):
            return False
        seen_on.add(w)
        seen_off.update(off)
    return True


def brute_force_opt(instance, guard: int = DEFAULT_GUARD) -> OptReport:
    """Maximum set of pairwise disjoint hyperedges by branch and bound.

    Hyperedges are branched on in ascending order of conflict degree. The
    bound adds to the current size the number of distinct online nodes
    still having a compatible hyperedge.
    """
    hes = _hyperedges(instance)
    if len(hes) > guard:
        raise TooLarge(f"{len(hes)} hyperedges exceed the brute-force guard of {guard}")
    if not hes:
        return OptReport(0, [], "brute_force")
    offline_ids = sorted({v for _, off in hes for v in off})
    pos = {v: i for i, v in enumerate(offline_ids)}
    online_ids = sorted({w for w, _ in hes})
    opos = {w: len(offline_ids) + i for i, w in enumerate(online_ids)}
    masks = [(1 << opos[w]) | sum(1 << pos[v] for v in off) for w, off in hes]
    n = len(hes)
    conflicts = [sum(1 for j in range(n) if j != i and masks[i] & masks[j]) for i in range(n)]
    order = sorted(range(n), key=lambda i: (conflicts[i], i))
    online_of = [hes[i][0] for i in range(n)]
    k1 = len(hes[0][1])
    ceiling = min(len(online_ids), len(offline_ids) // max(k1, 1))
    best: list = []

    def search(cands: list, used: int, chosen: list) -> bool:
        nonlocal best
        if len(chosen) > len(best):
            best = list(chosen)
            if len(best) == ceiling:
                return True
        if len(chosen) + len({online_of[i] for i in cands}) <= len(best):
            return False
        for idx, i in enumerate(cands):
            rest = cands[idx + 1:]
            if len(chosen) + 1 + len({online_of[j] for j in rest}) <= len(best):
                continue
            mi = masks[i]
            chosen.append(i)
            if search([j for j in rest if not masks[j] & mi], used | mi, chosen):
                return True
            chosen.pop()
        return False

    search(order, 0, [])
    return OptReport(len(best), sorted(best), "brute_force")


def analytic_opt(source) -> OptReport:
    """Closed-form OPT with an explicit witness for the generated constructions."""
    from .adversary.construction import FullAdversary
    from .adversary.gadget import GadgetSource
    from .hardness import HardnessInstance

    if isinstance(source, FullAdversary):
        return OptReport(source.opt(), source.witness(), "analytic")
    if isinstance(source, GadgetSource):
        return OptReport(source.n, source.witness(), "analytic")
    if isinstance(source, HardnessInstance):
        return OptReport(source.k, source.h1_ids(), "analytic")
    raise UnknownSource(f"no closed-form OPT for {type(source).__name__}")
