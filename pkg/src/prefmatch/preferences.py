"""Preference types: named families, adversary recipes and custom tables."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from .exact import as_rational, bilinear
from .game_core import GameError, MaterialGame, MixedStrategy, Table, efficient_pairs, is_strictly_efficient, pure_pair, to_table

FAMILIES = (
    "selfish",
    "efficient",
    "homophilic_efficient",
    "parochial_efficient",
    "homophilic_selfish",
    "parochial_selfish",
    "adversary",
    "custom",
)

RECIPES = (
    "prop2_advantage_efficient",
    "prop5_anticoordinator",
    "prop6_advantage_only_efficient",
    "ex2_mutant",
    "ex3_mutant",
    "ex4_coordination_seeker",
    "b2_mixed_motive",
    "b4_antiparochial_efficient",
)

SAME = "same"
CROSS = "cross"


@dataclass(frozen=True)
class PreferenceType:
    """Utility tables against the own type (``u_same``) and the other type (``u_cross``).

    ``params`` records what the tables were built from (lambda, recipe, M,
    strategy labels used by a recipe) so a type can be rebuilt or printed.
    """

    name: str
    u_same: Table
    u_cross: Table
    family_tag: str = "custom"
    params: tuple[tuple[str, object], ...] = field(default=())

    def __post_init__(self):
        if self.family_tag not in FAMILIES:
            raise GameError(f"unknown family {self.family_tag!r}")
        same = to_table(self.u_same)
        cross = to_table(self.u_cross, len(same))
        object.__setattr__(self, "u_same", same)
        object.__setattr__(self, "u_cross", cross)
        object.__setattr__(self, "params", tuple(self.params))
        lam = self.param("lambda")
        if self.family_tag in ("parochial_efficient", "parochial_selfish"):
            if any(v for row in cross for v in row):
                raise GameError("parochial types must have an all-zero cross table")
        if self.family_tag in ("homophilic_efficient", "homophilic_selfish"):
            if lam is None or any(a - b != lam for ra, rb in zip(same, cross) for a, b in zip(ra, rb)):
                raise GameError("homophilic types need u_same - u_cross == lambda everywhere")

    @property
    def n(self) -> int:
        return len(self.u_same)

    def param(self, key: str, default=None):
        for k, v in self.params:
            if k == key:
                return v
        return default

    def table(self, opp: str) -> Table:
        if opp == SAME:
            return self.u_same
        if opp == CROSS:
            return self.u_cross
        raise GameError(f"opponent must be 'same' or 'cross', got {opp!r}")

    def renamed(self, name: str) -> "PreferenceType":
        return PreferenceType(name, self.u_same, self.u_cross, self.family_tag, self.params)

    def describe(self) -> str:
        if self.family_tag in ("homophilic_efficient", "homophilic_selfish"):
            return f"{self.family_tag}(lambda={self.param('lambda')})"
        if self.family_tag == "adversary":
            return f"adversary({self.param('recipe')})"
        return self.family_tag


@dataclass(frozen=True)
class BeliefQ:
    """Posterior over the hidden type of a label-u agent."""

    q_utheta: Fraction
    q_utau: Fraction

    def __post_init__(self):
        a, b = as_rational(self.q_utheta), as_rational(self.q_utau)
        object.__setattr__(self, "q_utheta", a)
        object.__setattr__(self, "q_utau", b)
        if not (0 <= a <= 1 and 0 <= b <= 1) or a + b != 1:
            raise GameError("belief weights must lie in [0,1] and sum to 1")

    @classmethod
    def from_theta(cls, q_utheta) -> "BeliefQ":
        q = as_rational(q_utheta)
        return cls(q, 1 - q)

    def weight(self, hidden: str) -> Fraction:
        if hidden == "theta":
            return self.q_utheta
        if hidden == "tau":
            return self.q_utau
        raise GameError(f"hidden type must be 'theta' or 'tau', got {hidden!r}")


def _table(n: int, cell: Callable[[int, int], Fraction]) -> Table:
    return tuple(tuple(Fraction(cell(i, j)) for j in range(n)) for i in range(n))


def build_type(
    game: MaterialGame,
    family: str,
    lam=None,
    same: Sequence[Sequence] | None = None,
    cross: Sequence[Sequence] | None = None,
    name: str | None = None,
) -> PreferenceType:
    """Build one of the named families over ``game`` (or a custom type)."""
    pi = game.payoff
    n = game.n
    name = name or family

    def material(i, j):
        return pi[i][j]

    def total(i, j):
        return pi[i][j] + pi[j][i]

    zero = _table(n, lambda i, j: 0)
    if family in ("homophilic_efficient", "homophilic_selfish"):
        if lam is None:
            raise GameError(f"{family} requires lambda")
        lam = as_rational(lam)
        if lam <= 0:
            raise GameError("lambda must be positive")
        base = total if family == "homophilic_efficient" else material
        return PreferenceType(
            name,
            _table(n, lambda i, j: base(i, j) + lam),
            _table(n, base),
            family,
            (("lambda", lam),),
        )
    if lam is not None and family != "custom":
        raise GameError(f"{family} takes no lambda")
    if family == "selfish":
        return PreferenceType(name, _table(n, material), _table(n, material), family)
    if family == "efficient":
        return PreferenceType(name, _table(n, total), _table(n, total), family)
    if family == "parochial_efficient":
        return PreferenceType(name, _table(n, total), zero, family)
    if family == "parochial_selfish":
        return PreferenceType(name, _table(n, material), zero, family)
    if family == "custom":
        if same is None or cross is None:
            raise GameError("custom types need both tables")
        return PreferenceType(name, to_table(same, n), to_table(cross, n), "custom")
    if family == "adversary":
        raise GameError("use build_adversary_type for adversary recipes")
    raise GameError(f"unknown family {family!r}")


def utility(ptype: PreferenceType, x: MixedStrategy, y: MixedStrategy, opp: str) -> Fraction:
    table = ptype.table(opp)
    if len(x) != ptype.n or len(y) != ptype.n:
        raise GameError("strategy dimension does not match the type's tables")
    return bilinear(x.weights, table, y.weights)


def utility_vs_u(ptype: PreferenceType, x: MixedStrategy, y: MixedStrategy, q: BeliefQ, role: str) -> Fraction:
    """Expected utility against a label-u opponent.

    ``role`` is the caller's own type ("theta" or "tau"); the hidden opponent
    is of the same type with probability ``q.weight(role)``.
    """
    if role not in ("theta", "tau"):
        raise GameError("role must be 'theta' or 'tau'")
    other = "tau" if role == "theta" else "theta"
    return q.weight(role) * utility(ptype, x, y, SAME) + q.weight(other) * utility(ptype, x, y, CROSS)


# ---------------------------------------------------------------------------
# adversary recipes

def default_anticoordinator_m(game: MaterialGame, lam) -> int:
    """Smallest integer M strictly above 6*delta_bar*|X|/(1-delta_bar)."""
    from .equilibria import TypedGame, enumerate_nash
    from .game_core import inefficiency_constants, pair_total

    theta = build_type(game, "homophilic_efficient", lam=lam)
    best, _ = efficient_pairs(game)
    eqs = enumerate_nash(TypedGame(theta.u_same, theta.u_same))
    totals = [pair_total(game, p) for p in eqs.equilibria]
    inefficient = [t for t in totals if t != best]
    consts = inefficiency_constants(game, inefficient, lam)
    bound = 6 * consts.delta_bar * game.n / (1 - consts.delta_bar)
    return math.floor(bound) + 1


def build_adversary_type(game: MaterialGame, recipe: str, params: Mapping[str, object] | None = None, name: str | None = None) -> PreferenceType:
    """Construct a proof or example mutant type over ``game``.

    Recipes that mention particular strategies (the 3x3 mutants) take
    them from ``params``, defaulting to the labels of the worked examples.
    """
    params = dict(params or {})
    pi = game.payoff
    n = game.n
    name = name or recipe
    best, eff = efficient_pairs(game)
    efficient = {(p.first.pure_index(), p.second.pure_index()) for p in eff}

    def total(i, j):
        return pi[i][j] + pi[j][i]

    recorded: list[tuple[str, object]] = [("recipe", recipe)]

    if recipe == "prop2_advantage_efficient":
        same = _table(n, total)
        cross = _table(n, lambda i, j: total(i, j) if pi[i][j] >= pi[j][i] else 0)
    elif recipe == "prop6_advantage_only_efficient":
        same = _table(n, total)
        cross = _table(n, lambda i, j: total(i, j) if pi[i][j] >= pi[j][i] and (i, j) in efficient else 0)
    elif recipe == "prop5_anticoordinator":
        if "lambda" not in params:
            raise GameError("prop5_anticoordinator requires lambda")
        lam = as_rational(params["lambda"])
        if not any(pi[i][j] != pi[j][i] and is_strictly_efficient(game, pure_pair(n, i, j)) for i, j in efficient):
            raise GameError("prop5_anticoordinator requires an asymmetric strictly efficient pair")
        m = params.get("M")
        m = as_rational(m) if m is not None else Fraction(default_anticoordinator_m(game, lam))
        size = 2 * n

        def same_cell(i, j):
            return 0 if (i, j) in efficient else -m

        def cross_cell(i, j):
            ahead = pi[i][j] > pi[j][i]
            if (i, j) in efficient:
                return 0 if ahead else -1
            return size if ahead else size - 1

        same = _table(n, same_cell)
        cross = _table(n, cross_cell)
        recorded += [("lambda", lam), ("M", m)]
    elif recipe == "ex2_mutant":
        a, c = _labels(game, params.get("target", ("A", "C")))
        lure = game.index(str(params.get("lure", "B")))
        same = _table(n, lambda i, j: 1 if {i, j} == {a, c} and i != j else 0)
        cross = _table(n, lambda i, j: 1 if i == lure else 0)
        recorded += [("target", (game.strategy_labels[a], game.strategy_labels[c])), ("lure", game.strategy_labels[lure])]
    elif recipe == "ex3_mutant":
        a, c = _labels(game, params.get("target", ("A", "C")))
        same = _table(n, lambda i, j: 1 if {i, j} == {a, c} and i != j else 0)
        cross = _table(n, lambda i, j: 0)
        recorded += [("target", (game.strategy_labels[a], game.strategy_labels[c]))]
    elif recipe == "ex4_coordination_seeker":
        same = _table(n, lambda i, j: 1 if i != j else 0)
        cross = _table(n, lambda i, j: 1 if i != j else 3)
    elif recipe == "b2_mixed_motive":
        if n != 2:
            raise GameError("b2_mixed_motive is defined for 2x2 games")
        same = to_table([[0, -6], [6, 1]], 2)
        cross = to_table([[2, 0], [0, 1]], 2)
    elif recipe == "b4_antiparochial_efficient":
        same = _table(n, total)
        cross = _table(n, lambda i, j: total(i, j) + 1)
    else:
        raise GameError(f"unknown adversary recipe {recipe!r}")
    return PreferenceType(name, same, cross, "adversary", tuple(recorded))


def _labels(game: MaterialGame, pair) -> tuple[int, int]:
    if isinstance(pair, str):
        pair = pair.split(",")
    first, second = pair
    return game.index(str(first).strip()), game.index(str(second).strip())
