import random
from fractions import Fraction as F
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gen import lemma_one_violations, random_state, representative, state_from_tables
from oracles import stable_2x2
from prefmatch.cases import ex1_game, ex1_types, table4_game
from prefmatch.equilibria import enumerate_nash, loser_best_set
from prefmatch.game_core import MaterialGame
from prefmatch.matching_complete import (
    CLASSES,
    PATTERNS,
    MatchingConfiguration,
    MatchingProfileC,
    PopulationState,
    StabilityError,
    StrategyProfileC,
    average_fitness,
    construct_stable,
    enumerate_stable,
    find_blocking,
    is_nash_stable,
    mu_range,
    typed_game,
    verify_blocking,
)
from prefmatch.preferences import build_adversary_type, build_type


@pytest.fixture
def ex1_state():
    g = ex1_game()
    theta, tau = ex1_types(g)
    return g, PopulationState(theta, tau, F(1, 4))


def assortative(state, theta_pair, tau_pair):
    return MatchingProfileC(state, MatchingConfiguration.from_cross(state.epsilon, 0),
                            StrategyProfileC({("theta", "theta"): theta_pair, ("tau", "tau"): tau_pair}))


def test_example_one_stable_profile(ex1_state):
    g, st_ = ex1_state
    assert is_nash_stable(assortative(st_, g.pair("A", "B"), g.pair("A", "A"))).stable


def test_example_one_tau_on_bb_is_internal_violation(ex1_state):
    g, st_ = ex1_state
    v = is_nash_stable(assortative(st_, g.pair("A", "B"), g.pair("B", "B")))
    assert not v.stable and v.reason == "internal"
    assert v.internal.cls == ("tau", "tau")


def test_example_one_mixed_profile_blocked(ex1_state):
    g, st_ = ex1_state
    w = find_blocking(assortative(st_, _mix(), g.pair("A", "A")))
    assert w is not None and sorted(w.utilities) == [2, 3]
    assert w.participants[0].utility() == F(6, 5)


def _mix():
    from prefmatch.game_core import MixedStrategy, StrategyPair
    m = MixedStrategy((F(2, 5), F(3, 5)))
    return StrategyPair(m, m)


def test_example_one_cross_profile_blocked_by_tau_pair(ex1_state):
    g, st_ = ex1_state
    mp = MatchingProfileC(st_, MatchingConfiguration.from_cross(F(1, 4), F(1, 3)),
                          StrategyProfileC({("theta", "theta"): g.pair("A", "B"), ("theta", "tau"): g.pair("B", "A")}))
    w = find_blocking(mp)
    assert (w.participants[0].label, w.participants[1].label) == ("tau", "tau")
    assert w.utilities == (4, 4) and verify_blocking(mp, w)


def test_configuration_errors_name_the_constraint(ex1_state):
    _, st_ = ex1_state
    bad = MatchingConfiguration({("theta", "theta"): F(1, 2), ("theta", "tau"): F(1, 4),
                                 ("tau", "theta"): F(3, 4), ("tau", "tau"): F(1, 4)})
    with pytest.raises(StabilityError, match="row-sum"):
        bad.check(st_.epsilon)
    cross = MatchingConfiguration({("theta", "theta"): F(1, 2), ("theta", "tau"): F(1, 2),
                                   ("tau", "theta"): F(1, 2), ("tau", "tau"): F(1, 2)})
    with pytest.raises(StabilityError, match="cross-mass"):
        cross.check(st_.epsilon)
    with pytest.raises(StabilityError):
        PopulationState(st_.theta, st_.tau, 1)


def test_profile_must_cover_active_classes(ex1_state):
    g, st_ = ex1_state
    with pytest.raises(StabilityError, match="positive-mass"):
        MatchingProfileC(st_, MatchingConfiguration.from_cross(F(1, 4), 0),
                         StrategyProfileC({("theta", "theta"): g.pair("A", "B")}))


def test_mu_ranges():
    q = F(1, 4)
    assert mu_range((("theta", "theta"), ("theta", "tau")), q).low == F(1, 3)
    assert mu_range((("theta", "tau"), ("tau", "tau")), q) is None
    full = mu_range(CLASSES, q)
    assert (full.low, full.high, full.low_attained, full.high_attained) == (0, F(1, 3), False, False)
    assert mu_range((("theta", "tau"),), F(1, 2)).low == 1


def test_example_one_unique_stable_class(ex1_state):
    g, st_ = ex1_state
    classes = enumerate_stable(st_, g)
    assert len(classes) == 1
    labels = [(c, p.label(g.strategy_labels)) for c, p in classes[0].profile.entries]
    assert labels == [(("theta", "theta"), "(A,B)"), (("tau", "tau"), "(A,A)")]


def test_example_three_cross_matching_is_blocked():
    g = table4_game()
    tau = build_adversary_type(g, "ex3_mutant")
    theta = build_type(g, "parochial_selfish")
    st_ = PopulationState(theta, tau, F(1, 4))
    classes = enumerate_stable(st_, g)
    assert all(c.mu.high == 0 for c in classes) and classes
    c = construct_stable(st_)
    assert c.case == 1 and is_nash_stable(c.profile).stable
    assert average_fitness(c.profile, g) == (3, 5)


def test_selfish_on_dominant_strategy_game_is_assortative():
    g = MaterialGame(("A", "B"), [[4, 2], [3, 1]])
    t = build_type(g, "selfish")
    c = construct_stable(PopulationState(t, t, F(1, 3)))
    assert is_nash_stable(c.profile).stable
    assert all(p.label(g.strategy_labels) == "(A,A)" for _, p in c.profile.profile.entries)


def test_construction_swaps_roles_above_one_half(ex1_state):
    g, st_ = ex1_state
    c = construct_stable(PopulationState(st_.theta, st_.tau, F(3, 4)))
    assert c.swapped and is_nash_stable(c.profile).stable


tables2 = st.lists(st.lists(st.integers(0, 3), min_size=2, max_size=2), min_size=2, max_size=2)


@given(st.tuples(tables2, tables2, tables2, tables2), st.sampled_from([F(1, 4), F(1, 2), F(2, 3)]))
@settings(max_examples=60, deadline=None)
def test_stability_matches_brute_force_oracle(tabs, eps):
    state = state_from_tables(2, tabs, eps)
    tables = {(a, b): state.ptype(a).table("same" if a == b else "cross") for a in ("theta", "tau") for b in ("theta", "tau")}
    for pattern in PATTERNS:
        config = representative(pattern, eps)
        if config is None:
            continue
        eqs = [enumerate_nash(typed_game(state, *c)).equilibria for c in pattern]
        for choice in product(*eqs):
            entries = dict(zip(pattern, choice))
            mp = MatchingProfileC(state, config, StrategyProfileC(entries))
            oracle_entries = {c: (p.first.weights, p.second.weights) for c, p in zip(pattern, choice)}
            got = is_nash_stable(mp).stable
            assert got == stable_2x2(tables, dict(config.mu), oracle_entries)


@given(st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_loser_best_lemma(seed):
    state, _ = random_state(random.Random(seed))
    bad, _ = lemma_one_violations(state)
    assert bad == []


@given(st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_construction_is_stable_and_balanced(seed):
    state, _ = random_state(random.Random(seed))
    c = construct_stable(state)
    c.profile.config.check(state.epsilon)
    assert is_nash_stable(c.profile).stable
    lb = loser_best_set(state.theta)
    if c.profile.config[("theta", "theta")] > 0:
        assert min(typed_game(state, "theta", "theta").row_value(c.profile.profile.get("theta", "theta")),
                   typed_game(state, "theta", "theta").col_value(c.profile.profile.get("theta", "theta"))) == lb.value


@given(st.integers(0, 10**6))
@settings(max_examples=30, deadline=None)
def test_every_witness_verifies(seed):
    state, game = random_state(random.Random(seed))
    for pattern in PATTERNS:
        config = representative(pattern, state.epsilon)
        if config is None:
            continue
        eqs = [enumerate_nash(typed_game(state, *c)).equilibria for c in pattern]
        for choice in product(*eqs):
            mp = MatchingProfileC(state, config, StrategyProfileC(dict(zip(pattern, choice))))
            w = find_blocking(mp)
            if w is not None:
                assert verify_blocking(mp, w)
        for cls in enumerate_stable(state, game):
            for m, attained, *_ in cls.fitness:
                MatchingConfiguration.from_cross(state.epsilon, m).check(state.epsilon)
