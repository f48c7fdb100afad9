from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import int_table, rational_simplex
from prefmatch.cases import table3_game
from prefmatch.game_core import (
    GameError,
    MaterialGame,
    MixedStrategy,
    StrategyPair,
    efficient_pairs,
    inefficiency_constants,
    is_strictly_efficient,
    material_payoff,
    pure_pair,
)


def labels(game, pairs):
    return {p.label(game.strategy_labels) for p in pairs}


def test_material_payoff_pure_and_uniform(bos):
    assert material_payoff(bos, bos.pure("A"), bos.pure("B")) == 1
    half = MixedStrategy((F(1, 2), F(1, 2)))
    # four outcomes, each with weight 1/4
    assert material_payoff(bos, half, half) == F(1, 4) * (0 + 1 + 3 + 0)


def test_material_payoff_dimension_mismatch(bos):
    with pytest.raises(GameError):
        material_payoff(bos, MixedStrategy((1, 0, 0)), bos.pure("A"))


def test_game_validation():
    with pytest.raises(GameError):
        MaterialGame(("A", "B"), [[0, 1], [3, 0]])
    with pytest.raises(GameError):
        MaterialGame(("A", "A"), [[1, 1], [1, 1]])
    with pytest.raises(GameError):
        MaterialGame(("A", "B"), [[1, 1, 1], [1, 1, 1]])


@pytest.mark.parametrize("weights", [(F(1, 2), F(1, 3)), (F(-1), F(2)), ()])
def test_mixed_strategy_validation(weights):
    with pytest.raises(GameError):
        MixedStrategy(weights)


def test_efficient_pairs_examples(bos):
    best, pairs = efficient_pairs(table3_game())
    assert best == 10 and labels(table3_game(), pairs) == {"(A,C)", "(C,A)"}
    best, pairs = efficient_pairs(bos)
    assert best == 4 and labels(bos, pairs) == {"(A,B)", "(B,A)"}
    const = MaterialGame(("A", "B"), [[2, 2], [2, 2]])
    best, pairs = efficient_pairs(const)
    assert best == 4 and len(pairs) == 4


def test_strict_efficiency(bos):
    assert is_strictly_efficient(bos, bos.pair("A", "B"))
    assert is_strictly_efficient(table3_game(), table3_game().pair("A", "C"))
    const = MaterialGame(("A", "B"), [[2, 2], [2, 2]])
    assert not is_strictly_efficient(const, const.pair("A", "B"))
    assert not is_strictly_efficient(bos, bos.pair("A", "A"))


def test_inefficiency_constants(bos):
    c = inefficiency_constants(bos, [], 1)
    assert (c.efficient_total, c.best_inefficient_total, c.best_inefficient_ne_total, c.delta_bar) == (4, 0, 0, F(4, 5))
    c = inefficiency_constants(table3_game(), [], 1)
    # the three candidates are 10/12, 10/11 and 0
    assert (c.efficient_total, c.best_inefficient_total, c.delta_bar) == (10, 8, F(10, 11))
    with pytest.raises(GameError):
        inefficiency_constants(MaterialGame(("A", "B"), [[2, 2], [2, 2]]), [], 1)
    with pytest.raises(GameError):
        inefficiency_constants(bos, [], 0)


games = st.integers(2, 3).flatmap(lambda n: int_table(n, 1, 9).map(lambda t: MaterialGame(tuple("ABC"[:n]), t)))


@given(games.flatmap(lambda g: st.tuples(st.just(g), rational_simplex(g.n), rational_simplex(g.n), rational_simplex(g.n),
                                          st.fractions(0, 1, max_denominator=20))))
@settings(max_examples=150, deadline=None)
def test_bilinearity_and_efficiency_bound(data):
    g, x, x2, y, alpha = data
    mixed = x.mix(x2, alpha)
    assert material_payoff(g, mixed, y) == alpha * material_payoff(g, x, y) + (1 - alpha) * material_payoff(g, x2, y)
    best, _ = efficient_pairs(g)
    assert material_payoff(g, x, y) + material_payoff(g, y, x) <= best


@given(games)
@settings(max_examples=100, deadline=None)
def test_efficient_pairs_closed_under_swap(g):
    _, pairs = efficient_pairs(g)
    assert {p.swapped().key() for p in pairs} == {p.key() for p in pairs}


def test_pair_helpers(bos):
    p = pure_pair(2, 0, 1)
    assert p == bos.pair("A", "B") and p.swapped() == bos.pair("B", "A")
    assert StrategyPair(MixedStrategy((F(2, 5), F(3, 5))), bos.pure("A")).label(bos.strategy_labels) == "(2/5A+3/5B,A)"
