import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hypermatch.algorithms import WaterFillConfig, WaterFilling, water_level, waterfill_arrival
from hypermatch.errors import ConfigError, NotDisjoint
from hypermatch.game import StaticInstance, run_game
from hypermatch.model import FRESH_LEVEL, RHO, ArrivalEvent, MatchingState
from hypermatch.monitors import ThresholdMonitor

from strategies import instances


def test_config_validation():
    with pytest.raises(ConfigError):
        WaterFillConfig(mode="nope")
    with pytest.raises(ConfigError):
        WaterFillConfig(step=0)


def test_single_fresh_edge():
    state, _ = run_game(WaterFilling(), StaticInstance(3, 2, [(0, [(0, 1)])]))
    assert state.value == pytest.approx(FRESH_LEVEL, abs=1e-12)


def test_two_fresh_edges_split_budget():
    inst = StaticInstance(3, 4, [(0, [(0, 1), (2, 3)])])
    state, _ = run_game(WaterFilling(), inst)
    assert state.x.tolist() == pytest.approx([0.5, 0.5])


def test_saturated_edge_gets_nothing():
    s = MatchingState(3, 3)
    s.apply(ArrivalEvent.from_lists(0, [(0, 1)], 0), [1.0])
    x = waterfill_arrival(s, ArrivalEvent.from_lists(1, [(0, 2)], 1))
    assert x.tolist() == [0.0]


def test_exact_mode_rejects_overlap():
    s = MatchingState(3, 3)
    with pytest.raises(NotDisjoint):
        waterfill_arrival(s, ArrivalEvent.from_lists(0, [(0, 1), (0, 2)], 0))


@given(st.lists(st.floats(0.05, 1.0), min_size=1, max_size=8), st.floats(0.0, 1.0))
def test_water_level_spends_budget(base, budget):
    base = np.array(base)
    lam = water_level(base, budget)
    spent = np.maximum(0.0, np.log(np.minimum(lam, 1.0) / base)).sum()
    assert lam <= 1.0 + 1e-15
    if lam < 1.0:
        assert spent == pytest.approx(budget, abs=1e-9)
    else:
        assert spent <= budget + 1e-9


@given(instances(max_arrivals=8))
def test_threshold_respecting_and_dual_equality(inst):
    alg = WaterFilling()
    mon = ThresholdMonitor(0.0)
    state, log = run_game(alg, inst, [mon])
    assert log.monitor_reports["threshold"].ok
    assert abs(state.value - alg.duals.total()) <= 1e-9 * (1 + state.value)
    if state.num_hyperedges:
        assert alg.duals.coverage(state.he_online, state.he_offline).min() >= RHO - 1e-9


def test_discretized_converges_to_exact():
    s = MatchingState(3, 8)
    s.apply(ArrivalEvent.from_lists(0, [(0, 1), (2, 3), (4, 5)], 0), [0.1234567, 0.0271828, 0.3141592])
    e = ArrivalEvent.from_lists(1, [(0, 1), (2, 3), (4, 5), (6, 7)], 3)
    exact = waterfill_arrival(s, e)
    devs = []
    for step in (1e-2, 1e-3, 1e-4):
        x = waterfill_arrival(s, e, WaterFillConfig("discretized", step))
        devs.append(np.abs(x - exact).max())
        assert devs[-1] <= 2 * step
    assert devs[0] > devs[1] > devs[2]


def test_discretized_threshold_within_two_steps():
    inst = StaticInstance(3, 4, [(0, [(0, 1), (0, 2)]), (1, [(1, 3), (2, 3)]), (2, [(0, 3)])])
    step = 1e-3
    state, log = run_game(WaterFilling(WaterFillConfig("discretized", step)), inst, [ThresholdMonitor(2 * step)])
    assert log.monitor_reports["threshold"].ok
