from fractions import Fraction

import hypothesis.strategies as st
import pytest

from prefmatch.game_core import MaterialGame, MixedStrategy


def rational_simplex(n: int, denom: int = 12):
    """Random exact probability vectors of length n."""
    return st.lists(st.integers(0, denom), min_size=n, max_size=n).filter(sum).map(
        lambda ws: MixedStrategy(tuple(Fraction(w, sum(ws)) for w in ws))
    )


def int_table(n: int, lo: int = 0, hi: int = 4):
    return st.lists(st.lists(st.integers(lo, hi), min_size=n, max_size=n), min_size=n, max_size=n)


@pytest.fixture
def bos():
    return MaterialGame(("A", "B"), [[0, 1], [3, 0]], allow_nonpositive=True)
