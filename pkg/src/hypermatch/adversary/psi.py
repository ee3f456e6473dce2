"""Half-mass-corrected binomial CDF and the load lower-bound process built on it.

psi(t, y) = P[X < t/2 + y] + P[X = t/2 + y] / 2 with X ~ Binomial(t, 1/2),
for y in Z/2. The lower half of each row comes from exact integer prefix
sums; the upper half follows from psi(t, -y) = 1 - psi(t, y).
``psi_exact`` gives the dyadic rationals themselves.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from itertools import accumulate

import numpy as np

E = math.e
LN_FRESH = math.log((E + 1.0) / 2.0)
#: a = 2 - 2 ln((e + 1) / 2)
A_CONST = 2.0 - 2.0 * LN_FRESH
#: b = 2 ln((e + 1) / 2) - 1
B_CONST = 2.0 * LN_FRESH - 1.0
EXACT_MAX_T = 64


def _half_index(y) -> int:
    """2y as an int; raises unless y is a half-integer."""
    twice = Fraction(y) * 2
    if twice.denominator != 1:
        raise ValueError(f"psi needs a half-integer second argument, got {y!r}")
    return int(twice)


@lru_cache(maxsize=8192)
def psi_row(t: int) -> np.ndarray:
    """psi(t, j/2) for j = -(t+1), ..., t+1 (length 2t + 3).

    Prefix sums of binomial coefficients are formed in exact integer
    arithmetic and divided once, so every entry is correctly rounded.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    comb = [1] * (t + 1)
    for x in range(1, t + 1):
        comb[x] = comb[x - 1] * (t - x + 1) // x
    below = [0, *accumulate(comb)]  # below[c] * 2^-t = P[X < c]
    denom = 1 << (t + 1)
    row_low = np.empty(t + 2)
    for idx, j in enumerate(range(-(t + 1), 1)):
        twice_c = t + j  # 2 * (t/2 + y)
        if twice_c < 0:
            num = 0
        elif twice_c % 2 == 0:
            c = twice_c // 2
            num = 2 * below[c] + comb[c]
        else:
            num = 2 * below[(twice_c + 1) // 2]
        row_low[idx] = num / denom
    row = np.concatenate([row_low, 1.0 - row_low[-2::-1]])
    row.setflags(write=False)
    return row


def psi(t: int, y) -> float:
    j = _half_index(y)
    if j <= -(t + 1):
        return 0.0
    if j >= t + 1:
        return 1.0
    return float(psi_row(t)[j + t + 1])


def psi_exact(t: int, y) -> Fraction:
    j = _half_index(y)
    twice_c = t + j
    total = 0
    for x in range(t + 1):
        if 2 * x < twice_c:
            total += 2 * math.comb(t, x)
        elif 2 * x == twice_c:
            total += math.comb(t, x)
    return Fraction(total, 2 ** (t + 1))


def xi(t: int, i, q_t, epsilon: float = 0.0) -> float:
    """a psi(t, q_t - i) + b - eps t."""
    return A_CONST * psi(t, Fraction(q_t) - Fraction(i)) + B_CONST - epsilon * t


def check_psi_properties(t_max: int, tol: float = 1e-12, exact_upto: int = EXACT_MAX_T) -> dict:
    """Evaluate the five structural properties of psi for t = 1..t_max.

    Returns ``{name: {"pass": bool, "worst": float, "worst_t": int}}``.
    """
    res = {
        "boundary": {"pass": True, "worst": 0.0, "worst_t": None},
        "monotone": {"pass": True, "worst": 0.0, "worst_t": None},
        "symmetry_point": {"pass": True, "worst": 0.0, "worst_t": None},
        "recurrence": {"pass": True, "worst": 0.0, "worst_t": None},
        "sqrt_sum": {"pass": True, "worst": -math.inf, "worst_t": None},
        "exact_agreement": {"pass": True, "worst": 0.0, "worst_t": None},
    }

    def note(name, value, t, ok):
        r = res[name]
        if value > r["worst"]:
            r["worst"], r["worst_t"] = value, t
        if not ok:
            r["pass"] = False

    for t in range(1, t_max + 1):
        row = psi_row(t)
        note("boundary", abs(1.0 - psi(t, Fraction(t + 1, 2))), t, psi(t, Fraction(t + 1, 2)) == 1.0)
        drops = -np.diff(row)
        note("monotone", float(max(drops.max(), 0.0)), t, bool(np.all(drops <= 0.0)))
        gap = abs(psi(t, 0) - 0.5)
        note("symmetry_point", gap, t, gap <= tol)
        if t < t_max:
            nxt = psi_row(t + 1)
            # psi(t+1, j/2) for j in [-(t+2), t+2]; neighbours at (j -/+ 1)/2 in row t, padded with 0/1
            padded = np.concatenate([[0.0], row, [1.0]])  # covers j/2 for j = -(t+2)..t+2
            rhs = 0.5 * padded[:-2] + 0.5 * padded[2:]
            err = float(np.max(np.abs(nxt[1:-1] - rhs)))
            note("recurrence", err, t, err <= tol)
        # sum over y = 0..t+1 of 1 - psi(t, y/2); later terms are exactly zero
        tail = float(np.sum(1.0 - row[t + 1 :]))
        margin = tail - (1.0 + 0.5 * math.sqrt(t))
        note("sqrt_sum", margin, t, margin <= 0.0)
        if t <= exact_upto:
            ex = max(abs(float(psi_exact(t, Fraction(j, 2))) - row[j + t + 1]) for j in range(-(t + 1), t + 2))
            note("exact_agreement", ex, t, ex <= tol)
    return res
