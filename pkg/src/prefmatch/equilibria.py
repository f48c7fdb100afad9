"""Exact equilibrium enumeration.

Two-player games are the special case of a *bipartite agent-form game*: a
set of left agents and a set of right agents, where each agent's payoff is
a sum of bilinear terms against the agents on the other side only.  The
Bayesian games arising in the incomplete-information blocking cases have
exactly this shape, so one routine serves both.

For each side we enumerate the vertices of the best-response polytope

    { z : z_s in simplex for each own agent s,
          sum_s payoff_o(r, z_s) <= v_o for each opposing agent o, row r }

by solving every square subsystem selected by a support choice for the own
agents and a set of tight rows for the opposing agents.  A pair of vertices
is an (extreme) equilibrium when it is completely labelled.  Maximal
bicliques of the resulting bipartite graph are the maximal Nash subsets:
every convex combination inside one biclique is an equilibrium, and every
equilibrium lies in one of them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from itertools import combinations, product
from typing import Sequence

from .exact import bilinear, dot, solve_square
from .game_core import GameError, MixedStrategy, StrategyPair, Table, to_table
from .preferences import PreferenceType

DEFAULT_SUPPORT_CAP = 6

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class Vertex:
    strategies: tuple[tuple[Fraction, ...], ...]
    values: tuple[Fraction, ...]
    tight: frozenset
    degenerate: bool


@dataclass(frozen=True)
class Component:
    left: tuple[int, ...]
    right: tuple[int, ...]


@dataclass
class AgentFormSolution:
    n: int
    left_vertices: list[Vertex]
    right_vertices: list[Vertex]
    pairs: list[tuple[int, int]]
    components: list[Component]

    @property
    def degenerate(self) -> bool:
        return any(len(c.left) > 1 or len(c.right) > 1 for c in self.components)


@dataclass(frozen=True)
class AgentForm:
    """Bipartite game.  ``left_pay[(i, j)][r][c]`` is left agent i's payoff
    from row r against right agent j's column c; ``right_pay[(j, i)][c][r]``
    is right agent j's payoff.  Missing blocks count as zero."""

    n: int
    n_left: int
    n_right: int
    left_pay: dict
    right_pay: dict


def _nonempty_subsets(n: int) -> list[tuple[int, ...]]:
    out = []
    for k in range(1, n + 1):
        out.extend(combinations(range(n), k))
    return out


def _side_vertices(n: int, n_self: int, n_opp: int, opp_pay: dict) -> list[Vertex]:
    """Vertices of the best-response polytope over the own agents' strategies.

    ``opp_pay[(o, s)][r][c]`` is opposing agent o's payoff from row r when own
    agent s plays column c.
    """
    subsets = _nonempty_subsets(n)
    by_size: dict[int, list[tuple[tuple[int, ...], ...]]] = {}
    for tight in product(subsets, repeat=n_opp):
        by_size.setdefault(sum(len(t) for t in tight), []).append(tight)
    rows_of = {key: tbl for key, tbl in opp_pay.items()}
    dim = n_self * n + n_opp - n_self
    seen: dict[tuple, Vertex] = {}
    for supports in product(subsets, repeat=n_self):
        n_vars = sum(len(s) for s in supports) + n_opp
        need = n_vars - n_self
        columns: list[tuple[int, int]] = [(s, c) for s, sup in enumerate(supports) for c in sup]
        base_rows = []
        base_rhs = []
        for s, sup in enumerate(supports):
            row = [ZERO] * n_vars
            for k, (s2, c) in enumerate(columns):
                if s2 == s:
                    row[k] = ONE
            base_rows.append(row)
            base_rhs.append(ONE)
        payoff_rows: dict[tuple[int, int], list[Fraction]] = {}
        for o in range(n_opp):
            for r in range(n):
                row = [ZERO] * n_vars
                for k, (s, c) in enumerate(columns):
                    tbl = rows_of.get((o, s))
                    if tbl is not None:
                        row[k] = tbl[r][c]
                row[len(columns) + o] = -ONE
                payoff_rows[(o, r)] = row
        for tight in by_size.get(need, ()):
            matrix = list(base_rows)
            rhs = list(base_rhs)
            for o, ts in enumerate(tight):
                for r in ts:
                    matrix.append(payoff_rows[(o, r)])
                    rhs.append(ZERO)
            sol = solve_square(matrix, rhs)
            if sol is None:
                continue
            if any(v < 0 for v in sol[: len(columns)]):
                continue
            strategies = [[ZERO] * n for _ in range(n_self)]
            for k, (s, c) in enumerate(columns):
                strategies[s][c] = sol[k]
            key = tuple(tuple(z) for z in strategies)
            if key in seen:
                continue
            values = tuple(sol[len(columns):])
            ok = True
            tight_set = set()
            for o in range(n_opp):
                for r in range(n):
                    pay = ZERO
                    for s in range(n_self):
                        tbl = rows_of.get((o, s))
                        if tbl is not None:
                            pay += dot(tbl[r], strategies[s])
                    if pay > values[o]:
                        ok = False
                        break
                    if pay == values[o]:
                        tight_set.add((o, r))
                if not ok:
                    break
            if not ok:
                continue
            zeros = sum(1 for z in strategies for v in z if v == 0)
            seen[key] = Vertex(key, values, frozenset(tight_set), zeros + len(tight_set) > dim)
    return list(seen.values())


def _maximal_bicliques(n_left: int, edges: set[tuple[int, int]]) -> list[Component]:
    neighbours: dict[int, frozenset] = {}
    for l in range(n_left):
        nb = frozenset(r for (a, r) in edges if a == l)
        if nb:
            neighbours[l] = nb
    family: set[frozenset] = set(neighbours.values())
    frontier = list(family)
    while frontier:
        new = []
        for a in frontier:
            for b in list(family):
                c = a & b
                if c and c not in family:
                    family.add(c)
                    new.append(c)
        frontier = new
    comps = []
    for right_set in family:
        left_set = tuple(sorted(l for l, nb in neighbours.items() if right_set <= nb))
        comps.append(Component(left_set, tuple(sorted(right_set))))
    comps.sort(key=lambda c: (c.left, c.right))
    return comps


def solve_agent_form(game: AgentForm) -> AgentFormSolution:
    """Enumerate extreme equilibria and maximal Nash subsets of ``game``."""
    n = game.n
    # Left vertices: own = left agents, opponents = right agents (their payoff tables).
    left_vs = _side_vertices(n, game.n_left, game.n_right, {(j, i): t for (j, i), t in game.right_pay.items()})
    right_vs = _side_vertices(n, game.n_right, game.n_left, {(i, j): t for (i, j), t in game.left_pay.items()})
    pairs = []
    for li, lv in enumerate(left_vs):
        for ri, rv in enumerate(right_vs):
            if _complementary(lv, rv):
                pairs.append((li, ri))
    comps = _maximal_bicliques(len(left_vs), set(pairs))
    return AgentFormSolution(n, left_vs, right_vs, pairs, comps)


def _complementary(lv: Vertex, rv: Vertex) -> bool:
    for i, x in enumerate(lv.strategies):
        for r, w in enumerate(x):
            if w and (i, r) not in rv.tight:
                return False
    for j, y in enumerate(rv.strategies):
        for c, w in enumerate(y):
            if w and (j, c) not in lv.tight:
                return False
    return True


# ---------------------------------------------------------------------------
# two-player games

@dataclass(frozen=True)
class TypedGame:
    """``row_utility[x][y]``: row's utility; ``col_utility[y][x]``: column's."""

    row_utility: Table
    col_utility: Table

    def __post_init__(self):
        row = to_table(self.row_utility)
        col = to_table(self.col_utility, len(row))
        object.__setattr__(self, "row_utility", row)
        object.__setattr__(self, "col_utility", col)

    @property
    def n(self) -> int:
        return len(self.row_utility)

    def row_value(self, pair: StrategyPair) -> Fraction:
        return bilinear(pair.first.weights, self.row_utility, pair.second.weights)

    def col_value(self, pair: StrategyPair) -> Fraction:
        return bilinear(pair.second.weights, self.col_utility, pair.first.weights)

    def is_equilibrium(self, pair: StrategyPair) -> bool:
        v_row, br_row = best_responses(self.row_utility, pair.second)
        v_col, br_col = best_responses(self.col_utility, pair.first)
        return set(pair.first.support) <= br_row and set(pair.second.support) <= br_col


@dataclass(frozen=True)
class EquilibriumSet:
    equilibria: tuple[StrategyPair, ...]
    degenerate: bool
    values: tuple[tuple[Fraction, Fraction], ...] = field(default=(), compare=False)
    components: tuple[tuple[int, ...], ...] = field(default=(), compare=False)
    solution: AgentFormSolution | None = field(default=None, compare=False, repr=False)

    def __len__(self) -> int:
        return len(self.equilibria)

    def __iter__(self):
        return iter(self.equilibria)


def best_responses(table: Sequence[Sequence[Fraction]], opp: MixedStrategy) -> tuple[Fraction, frozenset[int]]:
    """Best value against ``opp`` and every pure strategy attaining it."""
    if len(table) != len(opp):
        raise GameError("strategy dimension does not match the table")
    payoffs = [dot(row, opp.weights) for row in table]
    best = max(payoffs)
    return best, frozenset(i for i, v in enumerate(payoffs) if v == best)


def pair_order_key(pair: StrategyPair) -> tuple:
    return (
        len(pair.first.support) + len(pair.second.support),
        tuple(-w for w in pair.first.weights),
        tuple(-w for w in pair.second.weights),
    )


def enumerate_nash(tg: TypedGame, support_cap: int = DEFAULT_SUPPORT_CAP) -> EquilibriumSet:
    """All extreme Nash equilibria of a two-player game, exactly.

    ``degenerate`` is set when some maximal Nash subset contains more than one
    extreme equilibrium, i.e. the equilibrium set has a continuum component.
    """
    if tg.n > support_cap:
        raise GameError(f"|X|={tg.n} exceeds the support enumeration cap {support_cap}")
    return _enumerate_cached(tg)


@lru_cache(maxsize=4096)
def _enumerate_cached(tg: TypedGame) -> EquilibriumSet:
    # Stability checks ask for the same few games over and over.
    n = tg.n
    form = AgentForm(n, 1, 1, {(0, 0): tg.row_utility}, {(0, 0): tg.col_utility})
    sol = solve_agent_form(form)
    indexed = []
    for li, ri in sol.pairs:
        x = MixedStrategy(sol.left_vertices[li].strategies[0])
        y = MixedStrategy(sol.right_vertices[ri].strategies[0])
        pair = StrategyPair(x, y)
        indexed.append((pair_order_key(pair), (li, ri), pair))
    indexed.sort(key=lambda t: t[0])
    position = {idx: k for k, (_, idx, _) in enumerate(indexed)}
    equilibria = tuple(p for _, _, p in indexed)
    values = tuple(
        (sol.right_vertices[ri].values[0], sol.left_vertices[li].values[0]) for _, (li, ri), _ in indexed
    )
    components = tuple(
        tuple(sorted(position[(l, r)] for l in comp.left for r in comp.right)) for comp in sol.components
    )
    return EquilibriumSet(equilibria, sol.degenerate, values, components, sol)


def self_game(ptype: PreferenceType) -> TypedGame:
    return TypedGame(ptype.u_same, ptype.u_same)


def cross_game(theta: PreferenceType, tau: PreferenceType) -> TypedGame:
    """Row is the theta agent, column the tau agent."""
    return TypedGame(theta.u_cross, tau.u_cross)


@dataclass(frozen=True)
class LoserBest:
    value: Fraction
    pairs: tuple[StrategyPair, ...]
    degenerate: bool


def loser_best_set(ptype: PreferenceType, against: str = "same", support_cap: int = DEFAULT_SUPPORT_CAP) -> LoserBest:
    """Equilibria of the self-game maximizing the smaller of the two utilities.

    The maximin value is exact even for degenerate games: inside a maximal
    Nash subset each player's utility depends only on the opponent's
    strategy, so the maximin is reached at extreme equilibria.
    """
    if against != "same":
        raise GameError("loser-best sets are defined for the self-game")
    eqs = enumerate_nash(self_game(ptype), support_cap)
    mins = [min(a, b) for a, b in eqs.values]
    best = max(mins)
    pairs = tuple(p for p, m in zip(eqs.equilibria, mins) if m == best)
    return LoserBest(best, pairs, eqs.degenerate)


def canonical_same_type(pair: StrategyPair) -> StrategyPair:
    """Representative of ``{(x,y), (y,x)}`` for same-type classes."""
    other = pair.swapped()
    return pair if pair_order_key(pair) <= pair_order_key(other) else other


def dedupe_swaps(pairs: Sequence[StrategyPair]) -> tuple[StrategyPair, ...]:
    out: list[StrategyPair] = []
    seen = set()
    for p in pairs:
        c = canonical_same_type(p)
        if c.key() not in seen:
            seen.add(c.key())
            out.append(c)
    return tuple(out)


@dataclass(frozen=True)
class Frontier:
    cross: EquilibriumSet
    ne_e: tuple[StrategyPair, ...]
    ne_estar: tuple[StrategyPair, ...]
    l_theta_theta: Fraction
    l_tau_theta: Fraction | None
    values: dict = field(default_factory=dict, compare=False)


def ne_frontier(theta: PreferenceType, tau: PreferenceType, support_cap: int = DEFAULT_SUPPORT_CAP) -> Frontier:
    """Weakly efficient frontier of the cross-type equilibrium payoffs.

    Strict Pareto dominance is invariant under the positive affine shift the
    existence construction uses to make payoffs non-negative, so utilities
    are compared as given.
    """
    cross = enumerate_nash(cross_game(theta, tau), support_cap)
    l_tt = loser_best_set(theta, support_cap=support_cap).value
    vals = list(cross.values)
    ne_e = []
    for k, (a, b) in enumerate(vals):
        if not any(a2 > a and b2 > b for a2, b2 in vals):
            ne_e.append(k)
    ne_estar = [k for k in ne_e if vals[k][0] >= l_tt]
    l_tau_theta = max((vals[k][1] for k in ne_estar), default=None)
    values = {cross.equilibria[k].key(): vals[k] for k in range(len(vals))}
    return Frontier(
        cross,
        tuple(cross.equilibria[k] for k in ne_e),
        tuple(cross.equilibria[k] for k in ne_estar),
        l_tt,
        l_tau_theta,
        values,
    )
