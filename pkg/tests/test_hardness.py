from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hypermatch.errors import ConfigError
from hypermatch.hardness import (
    build_hardness_instance,
    closed_form_value,
    enumerate_strategies,
    enumerate_strategies_naive,
    expectimax_value,
    optimal_deterministic_value,
    sample_hardness_instance,
    simulate_greedy,
)
from hypermatch.oracles import analytic_opt, brute_force_opt


@pytest.mark.parametrize("k", range(2, 11))
def test_dp_closed_form(k):
    assert optimal_deterministic_value(k) == closed_form_value(k) == 2 - Fraction(1, 2 ** (k - 1))


@given(st.integers(2, 9), st.data())
def test_structure(k, data):
    coins = data.draw(st.lists(st.integers(0, 1), min_size=k - 1, max_size=k - 1))
    inst = build_hardness_instance(k, coins)
    assert inst.blocking_holds()
    assert all(len(h) == k - 1 for pair in inst.phases for h in pair)
    assert len(inst.final) == k - 1
    assert all(set(a).isdisjoint(b) for pair in inst.phases for a, b in [pair])
    used = [v for h in inst.h1 for v in h]
    assert len(used) == len(set(used)) == inst.num_offline
    assert inst.free_counts(k - 1) == [1] * (k - 1)


def test_bad_coins():
    with pytest.raises(ConfigError):
        build_hardness_instance(3, [0])
    with pytest.raises(ConfigError):
        build_hardness_instance(1, [])


@pytest.mark.parametrize("k", [2, 3, 4])
def test_enumeration_methods_agree(k):
    v = optimal_deterministic_value(k)
    assert enumerate_strategies_naive(k) == v == enumerate_strategies(k) == expectimax_value(k)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_brute_force_opt_is_k(k):
    inst = sample_hardness_instance(k, 0)
    assert brute_force_opt(inst.to_static()).opt_integral == k == analytic_opt(inst).opt_integral


def test_greedy_monte_carlo():
    s = simulate_greedy(6, 4000, seed=1)
    assert abs(s.empirical_mean - float(s.dp_value)) <= 4 * s.stderr
    d = s.to_dict()
    assert d["closed_form"] == d["dp_value"] and d["ratio_bound"] == pytest.approx(float(s.dp_value) / 6)
