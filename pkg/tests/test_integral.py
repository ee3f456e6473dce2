from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hypermatch.algorithms import GreedyFractional, GreedyIntegral, RandomAlgConfig, RandomMatching
from hypermatch.certificates import estimate_random_certificate
from hypermatch.errors import ConfigError, DegreeBound
from hypermatch.game import StaticInstance, random_instance, run_game
from hypermatch.oracles import brute_force_opt

from strategies import instances


@given(st.integers(2, 8), st.integers(1, 10))
def test_random_dual_identity(k, d):
    cfg = RandomAlgConfig(k, d)
    assert (k - 1) * cfg.rho_exact + cfg.y_online_exact == 1
    assert cfg.rho_exact == min(Fraction(1, k - 1), Fraction(d, (d - 1) * k + 1))


def test_random_rho_examples():
    assert RandomAlgConfig(3, 2).rho_exact == Fraction(1, 2)
    assert RandomAlgConfig(3, 3).rho_exact == Fraction(3, 7)
    with pytest.raises(ConfigError):
        RandomAlgConfig(1, 2)


def test_degree_bound_enforced():
    inst = StaticInstance(3, 6, [(0, [(0, 1), (2, 3), (4, 5)])])
    with pytest.raises(DegreeBound):
        run_game(RandomMatching(RandomAlgConfig(3, 2)), inst)


@given(instances(disjoint=False, max_degree=3))
def test_integral_algorithms_give_matchings(inst):
    for alg in (GreedyIntegral(), RandomMatching(RandomAlgConfig(3, 3, seed=7))):
        state, _ = run_game(alg, inst)
        assert set(np.unique(state.x)) <= {0.0, 1.0}
        assert state.offline_load.max(initial=0) <= 1


@given(instances(disjoint=False, max_degree=3))
def test_greedy_is_maximal(inst):
    state, _ = run_game(GreedyIntegral(), inst)
    for j, (w, h) in enumerate(inst.hyperedge_sets()):
        if state.x[j] == 0:
            blocked = state.online_load_of(w) >= 1 or state.offline_load[list(h)].max() >= 1
            assert blocked


@given(instances(disjoint=False, max_degree=3))
def test_greedy_fractional_feasible(inst):
    state, _ = run_game(GreedyFractional(), inst)
    assert state.offline_load.max(initial=0) <= 1 + 1e-9
    assert state.online_load.max(initial=0) <= 1 + 1e-9


def test_random_is_reproducible():
    inst = random_instance(np.random.default_rng(2), 3, 10, 8, 2, disjoint=False)
    a = run_game(RandomMatching(RandomAlgConfig(3, 2, 11)), inst)[1].transcript.digest
    b = run_game(RandomMatching(RandomAlgConfig(3, 2, 11)), inst)[1].transcript.digest
    assert a == b


def test_random_certificate_single_option():
    # each online node has one hyperedge on fresh nodes: always taken, coverage exactly 1
    inst = StaticInstance(3, 4, [(0, [(0, 1)]), (1, [(2, 3)])])
    est = estimate_random_certificate(inst, RandomAlgConfig(3, 2), trials=100)
    assert est.mean.tolist() == [1.0, 1.0] and not len(est.flagged)


def test_random_certificate_needs_trials():
    with pytest.raises(ValueError):
        estimate_random_certificate(StaticInstance(3, 2, [(0, [(0, 1)])]), RandomAlgConfig(), trials=10)


def test_batch_estimator_matches_sequential_mean():
    inst = random_instance(np.random.default_rng(5), 3, 8, 6, 2, disjoint=False)
    cfg = RandomAlgConfig(3, 2, 0)
    seq = np.array([run_game(RandomMatching(RandomAlgConfig(3, 2, s)), inst)[0].value for s in range(2000)])
    est = estimate_random_certificate(inst, cfg, 2000)
    se = np.hypot(seq.std(), est.sizes.std()) / np.sqrt(2000)
    assert abs(seq.mean() - est.sizes.mean()) <= 4 * se + 1e-12
    assert est.sizes.max() <= brute_force_opt(inst).opt_integral
