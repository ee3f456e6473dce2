from fractions import Fraction

import numpy as np
import pytest

from hypermatch.adversary import (
    AdversaryConfig,
    FullAdversary,
    check_last_phase,
    check_load_lower_bounds,
    last_phase_budget,
    xi,
)
from hypermatch.algorithms import WaterFilling
from hypermatch.errors import ConfigError
from hypermatch.game import run_game
from hypermatch.model import f
from hypermatch.monitors import SymmetryMonitor, ThresholdMonitor
from hypermatch.oracles import is_matching


def play(m, T, **kw):
    adv = FullAdversary(m, T, **kw)
    mons = [ThresholdMonitor(0.0), SymmetryMonitor(adv.symmetry_pairs())]
    state, log = run_game(WaterFilling(), adv, mons)
    return adv, state, log


def test_config_validation(tmp_path):
    with pytest.raises(ConfigError):
        AdversaryConfig(0, 3)
    with pytest.raises(ConfigError):
        AdversaryConfig(100, 1000)
    with pytest.raises(ConfigError):
        AdversaryConfig.from_json({"m": 2, "T": 2, "colour": 1})
    p = tmp_path / "adv.json"
    p.write_text('{"m": 3, "T": 2, "epsilon": 0.1}')
    assert AdversaryConfig.load(p).to_json() == {"m": 3, "T": 2, "epsilon": 0.1, "gadget_mode": "symmetric_pairs"}


def test_single_edge_value():
    adv, state, _ = play(1, 1)
    assert state.value == pytest.approx(np.log((np.e + 1) / 2))
    assert adv.opt() == 1


@pytest.mark.parametrize("mode", ["symmetric_pairs", "plain"])
def test_witness_perfect_and_monitors(mode):
    adv, state, log = play(6, 5, gadget_mode=mode)
    hes = [(int(o), tuple(int(v) for v in row)) for o, row in zip(state.he_online, state.he_offline)]
    w = adv.witness()
    assert len(w) == adv.opt() == 30 and is_matching(hes, w)
    assert log.monitor_reports["threshold"].ok
    if mode == "symmetric_pairs":
        assert log.monitor_reports["symmetry"].max_asymmetry == 0.0


def test_phase_accounting():
    adv, state, _ = play(5, 4)
    assert sum(adv.per_phase_totals().values()) == pytest.approx(state.value, abs=1e-9)
    rows = adv.phase_rows()
    assert len(rows) == 20
    assert all(np.isnan(r["residual_capacity"]) for r in rows if r["phase"] == 4)
    assert adv.phase_report_csv().splitlines()[0] == "phase,component,r_t,q_t,phase_value,residual_capacity"


def test_inner_load_bounds_hold():
    adv, _, _ = play(7, 5)
    rep = check_load_lower_bounds(adv.components)
    assert rep.inner_ok and rep.inner_checked > 0


def test_outer_index_bound_is_infeasible():
    # At t = 2 with r = 2 the bounds at i = 1 and i = 2 = q + 1/2 cannot hold together:
    # both ranks are paired with each other and end at priority 1.
    adv, _, _ = play(1, 4)
    rec = adv.components[0].history[1]
    assert rec.t == 2 and rec.active == [1, 2] and rec.q == Fraction(3, 2)
    lo1, lo2 = xi(2, 1, rec.q), xi(2, 2, rec.q)
    assert f(lo1) + f(lo2) > 1.01
    rep = check_load_lower_bounds(adv.components)
    assert not rep.ok and rep.inner_ok
    assert {(v[1], v[2]) for v in rep.violations} == {(2, 2)}


def test_last_phase_bound():
    adv, _, _ = play(8, 6)
    rep = check_last_phase(adv)
    assert rep.ok and rep.budget == pytest.approx(last_phase_budget(6))
