import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hypermatch.algorithms import RoundingState, rounding_arrival, rounding_guarantee, simulate_rounding
from hypermatch.errors import ConfigError
from hypermatch.model import ArrivalEvent


def test_zero_value_never_sampled():
    rs = RoundingState(0.25, 2, 4)
    e = ArrivalEvent.from_lists(0, [(0, 1), (2, 3)], 0)
    rng = np.random.default_rng(0)
    for _ in range(200):
        rounding_arrival(rs, e, [0.0, 0.0], rng)
    assert rs.sampled == []


def test_capacity_one_keeps_first_in_canonical_order():
    rs = RoundingState(0.01, 1, 3)
    e = ArrivalEvent.from_lists(0, [(0, 1), (0, 2)], 0)

    class Always:
        def random(self, n):
            return np.zeros(n)

    assert rounding_arrival(rs, e, [1.0, 1.0], Always()) == [0]
    assert rs.sampled == [0, 1]


def test_config_checks():
    with pytest.raises(ConfigError):
        RoundingState(0.5, 2, 1)
    with pytest.raises(ConfigError):
        RoundingState(0.1, 0, 1)


def test_guarantee_formula():
    assert rounding_guarantee(3, 12, 0.25) == pytest.approx(0.75 * (1 - 3 * np.exp(-0.25)))
    assert rounding_guarantee(3, 12, 0.25) < 0


@given(st.integers(1, 3), st.floats(0.01, 0.49), st.integers(0, 2**31))
def test_degree_never_exceeds_b(b, eps, seed):
    rng = np.random.default_rng(seed)
    events, allocs = [], []
    first = 0
    for w in range(8):
        hes = [tuple(sorted(rng.choice(6, 2, replace=False).tolist())) for _ in range(3)]
        events.append(ArrivalEvent.from_lists(w, hes, first))
        first += 3
        allocs.append(rng.random(3))
    summ = simulate_rounding(events, allocs, 6, 3, b, eps, trials=20, seed=seed)
    assert summ.max_degree <= b
