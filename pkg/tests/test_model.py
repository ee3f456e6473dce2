import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hypermatch.errors import CapacityViolation, UnknownHyperedge, WrongUniformity
from hypermatch.game import StaticInstance, run_game
from hypermatch.model import (
    FRESH_LEVEL,
    RHO,
    ArrivalEvent,
    MatchingState,
    f,
    induced_graph_matching,
    priority_of_loads,
)

from strategies import instances


def ev(w, hes, first):
    return ArrivalEvent.from_lists(w, hes, first)


def test_constants():
    assert RHO == pytest.approx(0.462117157, abs=1e-9)
    assert FRESH_LEVEL == pytest.approx(0.6201145, abs=1e-7)


@pytest.mark.parametrize("lu, lv, want", [
    (0.0, 0.0, 2 / (math.e + 1)),
    (1.0, 0.0, 1.0),
    (FRESH_LEVEL, FRESH_LEVEL, 1.0),
])
def test_priority_examples(lu, lv, want):
    assert priority_of_loads(lu, lv) == pytest.approx(want, abs=1e-15)


@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 1))
def test_f_shift_multiplies(x, y, s):
    # raising a hyperedge by s multiplies its priority by e^s
    assert f(x + s) + f(y + s) == pytest.approx(math.exp(s) * (f(x) + f(y)), rel=1e-12)


def test_zero_allocation_leaves_state():
    st_ = MatchingState(3, 4)
    st_.apply(ev(0, [(0, 1)], 0), None)
    assert st_.value == 0 and not st_.offline_load.any()


def test_single_edge_loads():
    s = MatchingState(3, 2)
    s.apply(ev(0, [(0, 1)], 0), [0.5])
    assert s.offline_load.tolist() == [0.5, 0.5] and s.online_load_of(0) == 0.5


def test_capacity_violation_reports_node():
    s = MatchingState(3, 3)
    with pytest.raises(CapacityViolation) as exc:
        s.apply(ev(0, [(0, 1), (0, 2)], 0), [0.6, 0.6])
    assert exc.value.node == 0 and exc.value.load == pytest.approx(1.2)


def test_unknown_hyperedge_and_uniformity():
    s = MatchingState(3, 3)
    with pytest.raises(UnknownHyperedge):
        s.apply(ev(0, [(0, 1)], 0), {5: 0.2})
    with pytest.raises(WrongUniformity):
        s.apply(ev(0, [(0, 1, 2)], 0), [0.1])


def test_integral_mode_rejects_fractions():
    s = MatchingState(3, 2, mode="integral")
    with pytest.raises(ValueError):
        s.apply(ev(0, [(0, 1)], 0), [0.5])


def test_induced_graph_matching_merges_pairs():
    s = MatchingState(3, 2)
    s.apply(ev(0, [(0, 1)], 0), [0.3])
    s.apply(ev(1, [(0, 1)], 1), [0.2])
    igm = induced_graph_matching(s)
    assert igm.edges == {(0, 1): pytest.approx(0.5)} and igm.total == pytest.approx(0.5)


@given(instances(), st.data())
def test_load_consistency(inst, data):
    s = MatchingState(3, inst.num_offline)
    for e in inst.events():
        room = 1.0 - max(s.offline_load[e.offline].max(), 0.0)
        x = np.array([data.draw(st.floats(0, 1)) for _ in range(e.n)])
        x *= min(room, 1.0) / max(x.sum(), 1.0) if x.sum() > 0 else 0.0
        s.apply(e, x)
        off, on = s.recomputed_loads()
        assert np.allclose(off, s.offline_load, atol=1e-9)
        assert np.allclose(on, s.online_load, atol=1e-9)
        assert s.offline_load.max(initial=0) <= 1 + 1e-9


@given(instances())
def test_instance_json_roundtrip(inst):
    assert StaticInstance.from_json(inst.to_json()).to_json() == inst.to_json()


def test_empty_source_game():
    from hypermatch.algorithms import WaterFilling
    state, log = run_game(WaterFilling(), StaticInstance(3, 4, []))
    assert state.value == 0 and log.arrivals == 0
