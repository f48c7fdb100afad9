"""Material game, mixed strategies and efficiency structure."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .exact import as_rational, bilinear, fmt_short

Table = tuple[tuple[Fraction, ...], ...]


class GameError(ValueError):
    """Raised when a game, strategy or table violates its invariants."""


def to_table(rows: Iterable[Iterable], n: int | None = None) -> Table:
    table = tuple(tuple(as_rational(v) for v in row) for row in rows)
    size = len(table) if n is None else n
    if len(table) != size or any(len(row) != size for row in table):
        raise GameError(f"expected a {size}x{size} table")
    return table


@dataclass(frozen=True)
class MixedStrategy:
    """Probability vector over the strategy set, stored exactly."""

    weights: tuple[Fraction, ...]

    def __post_init__(self):
        w = tuple(as_rational(v) for v in self.weights)
        object.__setattr__(self, "weights", w)
        if not w:
            raise GameError("empty strategy")
        if any(v < 0 or v > 1 for v in w):
            raise GameError("strategy weights must lie in [0,1]")
        if sum(w) != 1:
            raise GameError("strategy weights must sum to exactly 1")

    @classmethod
    def pure(cls, n: int, index: int) -> "MixedStrategy":
        return cls(tuple(Fraction(int(i == index)) for i in range(n)))

    def __len__(self) -> int:
        return len(self.weights)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.weights) if v)

    @property
    def is_pure(self) -> bool:
        return len(self.support) == 1

    def pure_index(self) -> int:
        if not self.is_pure:
            raise GameError("strategy is mixed")
        return self.support[0]

    def mix(self, other: "MixedStrategy", alpha: Fraction) -> "MixedStrategy":
        return MixedStrategy(tuple(alpha * a + (1 - alpha) * b for a, b in zip(self.weights, other.weights)))

    def label(self, labels: Sequence[str]) -> str:
        if self.is_pure:
            return labels[self.pure_index()]
        return "+".join(f"{fmt_short(v)}{labels[i]}" for i, v in enumerate(self.weights) if v)


@dataclass(frozen=True)
class StrategyPair:
    first: MixedStrategy
    second: MixedStrategy

    def __post_init__(self):
        if len(self.first) != len(self.second):
            raise GameError("strategy pair over different strategy sets")

    def swapped(self) -> "StrategyPair":
        return StrategyPair(self.second, self.first)

    @property
    def is_pure(self) -> bool:
        return self.first.is_pure and self.second.is_pure

    def key(self) -> tuple:
        return (self.first.weights, self.second.weights)

    def label(self, labels: Sequence[str]) -> str:
        return f"({self.first.label(labels)},{self.second.label(labels)})"


def pure_pair(n: int, i: int, j: int) -> StrategyPair:
    return StrategyPair(MixedStrategy.pure(n, i), MixedStrategy.pure(n, j))


@dataclass(frozen=True)
class MaterialGame:
    strategy_labels: tuple[str, ...]
    payoff: Table
    allow_nonpositive: bool = field(default=False, compare=True)

    def __post_init__(self):
        labels = tuple(self.strategy_labels)
        object.__setattr__(self, "strategy_labels", labels)
        if not labels:
            raise GameError("|X| must be at least 1")
        if len(set(labels)) != len(labels):
            raise GameError("strategy labels must be unique")
        table = to_table(self.payoff, len(labels))
        object.__setattr__(self, "payoff", table)
        if not self.allow_nonpositive and any(v <= 0 for row in table for v in row):
            raise GameError("material payoffs must be strictly positive (set allow_nonpositive to override)")

    @property
    def n(self) -> int:
        return len(self.strategy_labels)

    def index(self, label: str) -> int:
        try:
            return self.strategy_labels.index(label)
        except ValueError:
            raise GameError(f"unknown strategy label {label!r}") from None

    def pure(self, label: str) -> MixedStrategy:
        return MixedStrategy.pure(self.n, self.index(label))

    def pair(self, first: str, second: str) -> StrategyPair:
        return StrategyPair(self.pure(first), self.pure(second))

    def total(self, i: int, j: int) -> Fraction:
        return self.payoff[i][j] + self.payoff[j][i]


def _check_dim(game: MaterialGame, *strategies: MixedStrategy) -> None:
    for s in strategies:
        if len(s) != game.n:
            raise GameError(f"strategy has {len(s)} weights, game has {game.n} strategies")


def material_payoff(game: MaterialGame, x: MixedStrategy, y: MixedStrategy) -> Fraction:
    """Expected material payoff of a player using ``x`` against ``y``."""
    _check_dim(game, x, y)
    return bilinear(x.weights, game.payoff, y.weights)


def pair_total(game: MaterialGame, pair: StrategyPair) -> Fraction:
    return material_payoff(game, pair.first, pair.second) + material_payoff(game, pair.second, pair.first)


def efficient_pairs(game: MaterialGame) -> tuple[Fraction, frozenset[StrategyPair]]:
    """Maximal total payoff over pure pairs and every pure pair attaining it."""
    n = game.n
    best = max(game.total(i, j) for i in range(n) for j in range(n))
    pairs = frozenset(pure_pair(n, i, j) for i in range(n) for j in range(n) if game.total(i, j) == best)
    return best, pairs


def is_efficient(game: MaterialGame, pair: StrategyPair) -> bool:
    best, _ = efficient_pairs(game)
    return pair_total(game, pair) == best


def is_strictly_efficient(game: MaterialGame, pair: StrategyPair) -> bool:
    if not pair.is_pure:
        raise GameError("strict efficiency is defined for pure pairs")
    _check_dim(game, pair.first, pair.second)
    best, _ = efficient_pairs(game)
    i, j = pair.first.pure_index(), pair.second.pure_index()
    if game.total(i, j) != best:
        return False
    for k in range(game.n):
        if k != i and game.total(k, j) >= best:
            return False
        if k != j and game.total(i, k) >= best:
            return False
    return True


@dataclass(frozen=True)
class InefficiencyConstants:
    efficient_total: Fraction
    best_inefficient_total: Fraction
    best_inefficient_ne_total: Fraction
    delta_bar: Fraction


def inefficiency_constants(game: MaterialGame, ne_inefficient_totals: Sequence[Fraction], lam: Fraction) -> InefficiencyConstants:
    """Constants bounding how attractive inefficient play can be.

    ``delta_bar`` is the largest of the three ratios built from the efficient
    total, the best inefficient pure total and the best inefficient
    equilibrium total of the homophilic-efficient self-game.
    """
    lam = as_rational(lam)
    if lam <= 0:
        raise GameError("lambda must be positive")
    best, eff = efficient_pairs(game)
    n = game.n
    inefficient = [game.total(i, j) for i in range(n) for j in range(n) if game.total(i, j) != best]
    if not inefficient:
        raise GameError("every pure pair is efficient; the best inefficient total is undefined")
    s_hat = max(inefficient)
    totals = [as_rational(t) for t in ne_inefficient_totals]
    s_tilde = max(totals) if totals else Fraction(0)
    delta_bar = max(best / (2 * best - s_hat), best / (best + lam), s_tilde / best)
    return InefficiencyConstants(best, s_hat, s_tilde, delta_bar)
