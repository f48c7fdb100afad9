from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import int_table
from oracles import ne_2x2
from prefmatch.cases import ex1_game, ex1_types, table3_game, table4_game
from prefmatch.equilibria import (
    TypedGame,
    best_responses,
    cross_game,
    dedupe_swaps,
    enumerate_nash,
    loser_best_set,
    ne_frontier,
    self_game,
)
from prefmatch.game_core import GameError, MaterialGame, MixedStrategy, efficient_pairs
from prefmatch.preferences import build_adversary_type, build_type


def labels(game, pairs):
    return [p.label(game.strategy_labels) for p in pairs]


def test_example_one_self_game_has_three_equilibria():
    g = ex1_game()
    theta, _ = ex1_types(g)
    eqs = enumerate_nash(self_game(theta))
    assert sorted(labels(g, eqs.equilibria)) == ["(2/5A+3/5B,2/5A+3/5B)", "(A,B)", "(B,A)"]
    assert not eqs.degenerate
    vals = dict(zip(labels(g, eqs.equilibria), eqs.values))
    assert vals["(2/5A+3/5B,2/5A+3/5B)"] == (F(6, 5), F(6, 5))
    assert vals["(A,B)"] == (F(2), F(3))


def test_loser_best_examples():
    g = ex1_game()
    theta, _ = ex1_types(g)
    lb = loser_best_set(theta)
    assert lb.value == 2 and labels(g, dedupe_swaps(lb.pairs)) == ["(A,B)"]
    g4 = table4_game()
    lb = loser_best_set(build_type(g4, "selfish"))
    assert lb.value == 3 and labels(g4, lb.pairs) == ["(B,B)"]


@pytest.mark.parametrize("game", [table3_game(), table4_game(), MaterialGame(("A", "B"), [[0, 1], [3, 0]], allow_nonpositive=True)])
def test_parochial_efficient_loser_best_is_efficient_set(game):
    best, eff = efficient_pairs(game)
    lb = loser_best_set(build_type(game, "parochial_efficient"))
    assert {p.key() for p in lb.pairs} == {p.key() for p in eff}
    assert lb.value == best


def test_frontier_examples():
    g = ex1_game()
    theta, tau = ex1_types(g)
    fr = ne_frontier(theta, tau)
    assert labels(g, fr.cross.equilibria) == ["(B,A)"] and labels(g, fr.ne_e) == ["(B,A)"]
    g3 = table3_game()
    th = build_type(g3, "homophilic_selfish", lam=1)
    mu = build_adversary_type(g3, "ex2_mutant")
    fr = ne_frontier(th, mu)
    assert "(A,B)" in labels(g3, fr.ne_e)
    assert fr.values[g3.pair("A", "B").key()][1] == max(v[1] for v in fr.values.values())


def test_frontier_dominant_strategy_game():
    g = MaterialGame(("A", "B"), [[4, 2], [3, 1]])
    t = build_type(g, "selfish")
    fr = ne_frontier(t, t)
    assert labels(g, fr.ne_e) == ["(A,A)"]


def test_support_cap():
    g = MaterialGame(("A", "B", "C"), [[1] * 3] * 3)
    with pytest.raises(GameError):
        enumerate_nash(self_game(build_type(g, "selfish")), support_cap=2)


def test_degenerate_flag_on_constant_game():
    g = MaterialGame(("A", "B"), [[1, 1], [1, 1]])
    eqs = enumerate_nash(self_game(build_type(g, "selfish")))
    assert eqs.degenerate and len(eqs.equilibria) == 4


def _oracle_set(row, col):
    return {(tuple(x), tuple(y)): v for (x, y), v in ne_2x2(row, col).items()}


@given(int_table(2, 0, 3), int_table(2, 0, 3))
@settings(max_examples=300, deadline=None)
def test_two_by_two_matches_closed_form(row, col):
    eqs = enumerate_nash(TypedGame(row, col))
    got = {p.key(): v for p, v in zip(eqs.equilibria, eqs.values)}
    assert got == _oracle_set(row, col)


@given(st.integers(2, 3).flatmap(lambda n: st.tuples(int_table(n), int_table(n))))
@settings(max_examples=80, deadline=None)
def test_equilibria_are_best_responses_and_lb_is_maximin(tables):
    row, col = tables
    tg = TypedGame(row, col)
    eqs = enumerate_nash(tg)
    assert eqs.equilibria
    for pair in eqs.equilibria:
        _, brs = best_responses(tg.row_utility, pair.second)
        assert set(pair.first.support) <= brs
        _, brs = best_responses(tg.col_utility, pair.first)
        assert set(pair.second.support) <= brs
    n = len(row)
    g = MaterialGame(tuple("ABC"[:n]), [[1] * n] * n)
    t = build_type(g, "custom", same=row, cross=row)
    lb = loser_best_set(t)
    self_eqs = enumerate_nash(self_game(t))
    assert all(lb.value >= min(v) for v in self_eqs.values)


@given(st.integers(2, 3).flatmap(lambda n: st.tuples(int_table(n), int_table(n), int_table(n))))
@settings(max_examples=60, deadline=None)
def test_frontier_has_no_dominated_member(tables):
    same, c1, c2 = tables
    n = len(same)
    g = MaterialGame(tuple("ABC"[:n]), [[1] * n] * n)
    th = build_type(g, "custom", same=same, cross=c1)
    ta = build_type(g, "custom", same=same, cross=c2)
    fr = ne_frontier(th, ta)
    vals = list(fr.values.values())
    for p in fr.ne_e:
        a, b = fr.values[p.key()]
        assert not any(a2 > a and b2 > b for a2, b2 in vals)
    for p in fr.ne_estar:
        assert fr.values[p.key()][0] >= fr.l_theta_theta
    if fr.ne_estar:
        assert fr.l_tau_theta == max(fr.values[p.key()][1] for p in fr.ne_estar)
    else:
        assert fr.l_tau_theta is None
