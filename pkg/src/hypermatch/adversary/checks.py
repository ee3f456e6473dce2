"""Run-time checks of the load lower bound and the last-phase budget."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .construction import FullAdversary, last_phase_budget
from .phases import cover_ranks
from .psi import xi

CHECK_TOL = 1e-7


@dataclass
class LoadBoundReport:
    """Outcome of the l(t, i) >= xi(t, i) check.

    ``violations`` covers every index i <= ceil(q_t). ``inner_violations``
    keeps only i <= q_t. The two differ exactly at i = q_t + 1/2, which
    exists when r_t is even; there the inequality can fail for algorithms
    that sit exactly at the threshold (see the tests for a worked case).
    """

    epsilon: float
    checked: int = 0
    violations: list = field(default_factory=list)  # (component, t, i, side, load, xi, i <= q_t)
    margins: list = field(default_factory=list)
    inner_checked: int = 0
    inner_margins: list = field(default_factory=list)

    @property
    def inner_violations(self) -> list:
        return [v for v in self.violations if v[6]]

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def inner_ok(self) -> bool:
        return not self.inner_violations

    def to_dict(self) -> dict:
        m = np.asarray(self.margins) if self.margins else np.zeros(1)
        inner = np.asarray(self.inner_margins) if self.inner_margins else np.zeros(1)
        return {
            "epsilon": self.epsilon,
            "checked": self.checked,
            "violations": len(self.violations),
            "inner_checked": self.inner_checked,
            "inner_violations": len(self.inner_violations),
            "inner_min_margin": float(inner.min()),
            "inner_pass": self.inner_ok,
            "min_margin": float(m.min()),
            "median_margin": float(np.median(m)),
            "max_margin": float(m.max()),
            "pass": self.ok,
        }


def check_load_lower_bounds(components, epsilon: float = 0.0, T: int | None = None,
                            tol: float = CHECK_TOL) -> LoadBoundReport:
    """Check l(t, i) >= xi(t, i) - tol for t <= T-1 and i <= ceil(q_t), on both sides.

    Each violation tuple ends with a flag telling whether i <= q_t.
    """
    rep = LoadBoundReport(epsilon)
    for ps in components:
        last = T if T is not None else ps.T
        for rec in ps.history:
            if rec.t > last - 1 or rec.r == 0:
                continue
            q = rec.q
            for i in range(1, math.ceil(q) + 1):
                bound = xi(rec.t, i, q, epsilon)
                inner = i <= q
                for side, load in (("U", rec.load_u[i - 1]), ("V", rec.load_v[i - 1])):
                    rep.checked += 1
                    margin = load - bound
                    rep.margins.append(margin)
                    if inner:
                        rep.inner_checked += 1
                        rep.inner_margins.append(margin)
                    if margin < -tol:
                        rep.violations.append((ps.component, rec.t, i, side, load, bound, inner))
    return rep


@dataclass
class LastPhaseReport:
    budget: float
    values: np.ndarray  # last-phase value per component
    residuals: np.ndarray  # cover residual at the end of phase T-1 per component
    tol: float = 1e-6

    @property
    def max_value(self) -> float:
        return float(self.values.max()) if len(self.values) else 0.0

    @property
    def max_residual(self) -> float:
        return float(self.residuals.max()) if len(self.residuals) else 0.0

    @property
    def ok(self) -> bool:
        return (self.max_value <= self.budget + self.tol
                and self.max_residual <= self.budget + self.tol
                and bool(np.all(self.values <= self.residuals + self.tol)))

    def to_dict(self) -> dict:
        return {"budget": self.budget, "max_value": self.max_value,
                "max_residual": self.max_residual, "pass": self.ok}


def cover_residual(rec) -> float:
    """Sum over the cover ranks of (1 - load) on both sides, from an end-of-phase record."""
    loads = dict(zip(rec.active, zip(rec.load_u, rec.load_v)))
    return sum(2.0 - sum(loads.get(a, (0.0, 0.0))) for a in cover_ranks(rec.active, rec.t))


def check_last_phase(adv: FullAdversary, tol: float = 1e-6) -> LastPhaseReport:
    """Last-phase value per component against 2a(2 + sqrt(T-1)/2) + 2 eps T^2."""
    T = adv.T
    values = adv.phase_values[T - 1].copy()
    if T >= 2:
        residuals = np.array([cover_residual(ps.history[T - 2]) for ps in adv.components])
    else:
        residuals = np.full(adv.m, 2.0)
    return LastPhaseReport(last_phase_budget(T, adv.cfg.epsilon), values, residuals, tol)
