"""Complete-information matching profiles: stability, enumeration, fitness, existence."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping

from .exact import as_rational, bilinear
from .equilibria import (
    DEFAULT_SUPPORT_CAP,
    EquilibriumSet,
    TypedGame,
    best_responses,
    canonical_same_type,
    dedupe_swaps,
    enumerate_nash,
    loser_best_set,
    ne_frontier,
    pair_order_key,
)
from .game_core import GameError, MaterialGame, MixedStrategy, StrategyPair, material_payoff
from .preferences import CROSS, SAME, PreferenceType

THETA = "theta"
TAU = "tau"
TYPES = (THETA, TAU)
CLASSES = ((THETA, THETA), (THETA, TAU), (TAU, TAU))


class StabilityError(GameError):
    """Invariant violation in a matching configuration or profile."""


@dataclass(frozen=True)
class PopulationState:
    theta: PreferenceType
    tau: PreferenceType
    epsilon: Fraction

    def __post_init__(self):
        eps = as_rational(self.epsilon)
        object.__setattr__(self, "epsilon", eps)
        if not 0 < eps < 1:
            raise StabilityError("epsilon must lie strictly between 0 and 1")
        if self.theta.n != self.tau.n:
            raise StabilityError("types are defined over different strategy sets")

    def ptype(self, t: str) -> PreferenceType:
        if t == THETA:
            return self.theta
        if t == TAU:
            return self.tau
        raise StabilityError(f"unknown type {t!r}")

    def mass(self, t: str) -> Fraction:
        return 1 - self.epsilon if t == THETA else self.epsilon

    def swapped(self) -> "PopulationState":
        return PopulationState(self.tau, self.theta, 1 - self.epsilon)


def typed_game(state: PopulationState, a: str, b: str) -> TypedGame:
    """Game between a type-a row agent and a type-b column agent."""
    rel = SAME if a == b else CROSS
    return TypedGame(state.ptype(a).table(rel), state.ptype(b).table(rel))


@dataclass(frozen=True)
class MatchingConfiguration:
    """Proportions ``mu[(a, b)]`` of type-a agents matched with type-b agents."""

    mu: tuple[tuple[tuple[str, str], Fraction], ...]

    def __init__(self, mu: Mapping[tuple[str, str], object] | tuple):
        items = dict(mu) if not isinstance(mu, dict) else mu
        clean = {}
        for (a, b), v in items.items():
            if a not in TYPES or b not in TYPES:
                raise StabilityError(f"unknown class ({a},{b})")
            clean[(a, b)] = as_rational(v)
        for a in TYPES:
            for b in TYPES:
                clean.setdefault((a, b), Fraction(0))
        object.__setattr__(self, "mu", tuple(sorted(clean.items())))

    @classmethod
    def from_cross(cls, epsilon, mu_theta_tau) -> "MatchingConfiguration":
        eps, m = as_rational(epsilon), as_rational(mu_theta_tau)
        mt = (1 - eps) * m / eps
        return cls({(THETA, THETA): 1 - m, (THETA, TAU): m, (TAU, THETA): mt, (TAU, TAU): 1 - mt})

    def __getitem__(self, key: tuple[str, str]) -> Fraction:
        return dict(self.mu)[key]

    def check(self, epsilon: Fraction) -> None:
        mu = dict(self.mu)
        for key, v in mu.items():
            if not 0 <= v <= 1:
                raise StabilityError(f"mu{key} must lie in [0,1]")
        if mu[(THETA, THETA)] + mu[(THETA, TAU)] != 1:
            raise StabilityError("mass balance row-sum violated: mu_theta,theta + mu_theta,tau = 1")
        if mu[(TAU, THETA)] + mu[(TAU, TAU)] != 1:
            raise StabilityError("mass balance row-sum violated: mu_tau,theta + mu_tau,tau = 1")
        if (1 - epsilon) * mu[(THETA, TAU)] != epsilon * mu[(TAU, THETA)]:
            raise StabilityError("cross-mass balance violated: (1-eps) mu_theta,tau = eps mu_tau,theta")

    def active(self) -> tuple[tuple[str, str], ...]:
        mu = dict(self.mu)
        return tuple(c for c in CLASSES if mu[c] > 0)


def canonical_entry(a: str, b: str, pair: StrategyPair) -> tuple[tuple[str, str], StrategyPair]:
    order = {THETA: 0, TAU: 1, "u": 2}
    if order[a] > order[b]:
        a, b, pair = b, a, pair.swapped()
    if a == b:
        pair = canonical_same_type(pair)
    return (a, b), pair


@dataclass(frozen=True)
class StrategyProfileC:
    entries: tuple[tuple[tuple[str, str], StrategyPair], ...]

    def __init__(self, entries: Mapping[tuple[str, str], StrategyPair] | tuple):
        items = dict(entries) if not isinstance(entries, dict) else entries
        clean: dict = {}
        for (a, b), pair in items.items():
            key, p = canonical_entry(a, b, pair)
            if key in clean:
                raise StabilityError(f"duplicate entry for class {key}")
            clean[key] = p
        order = {c: k for k, c in enumerate(CLASSES)}
        object.__setattr__(self, "entries", tuple(sorted(clean.items(), key=lambda kv: order.get(kv[0], 9))))

    def get(self, a: str, b: str) -> StrategyPair:
        """Pair played with the type-a agent first."""
        d = dict(self.entries)
        if (a, b) in d:
            return d[(a, b)]
        if (b, a) in d:
            return d[(b, a)].swapped()
        raise KeyError((a, b))

    def classes(self) -> tuple[tuple[str, str], ...]:
        return tuple(k for k, _ in self.entries)


@dataclass(frozen=True)
class MatchingProfileC:
    state: PopulationState
    config: MatchingConfiguration
    profile: StrategyProfileC

    def __post_init__(self):
        self.config.check(self.state.epsilon)
        active = set(self.config.active())
        have = set(self.profile.classes())
        if active != have:
            raise StabilityError(f"profile entries {sorted(have)} do not match positive-mass classes {sorted(active)}")
        n = self.state.theta.n
        for _, pair in self.profile.entries:
            if len(pair.first) != n:
                raise StabilityError("strategy dimension does not match the types")


@dataclass(frozen=True)
class InternalViolation:
    cls: tuple[str, str]
    side: int
    better_response: int
    current: Fraction
    improved: Fraction


def check_internal(mp: MatchingProfileC) -> InternalViolation | None:
    """First class (canonical order) whose pair is not a Nash equilibrium."""
    for (a, b), pair in mp.profile.entries:
        tg = typed_game(mp.state, a, b)
        for side, (table, own, opp) in enumerate(
            ((tg.row_utility, pair.first, pair.second), (tg.col_utility, pair.second, pair.first))
        ):
            value, brs = best_responses(table, opp)
            if not set(own.support) <= brs:
                current = bilinear(own.weights, table, opp.weights)
                return InternalViolation((a, b), side, min(brs), current, value)
    return None


@dataclass(frozen=True)
class Participant:
    label: str
    origin: tuple[str, str]
    side: int
    status_quo: tuple[tuple[str, Fraction], ...]

    def utility(self, t: str | None = None) -> Fraction:
        d = dict(self.status_quo)
        if t is None:
            (v,) = d.values()
            return v
        return d[t]


@dataclass(frozen=True)
class DeviationPlan:
    """Participation set of hidden types and the strategy each would play."""

    members: tuple[str, ...]
    plan: tuple[tuple[str, MixedStrategy], ...]

    def __init__(self, members, plan):
        members = tuple(t for t in TYPES if t in set(members))
        if not members:
            raise StabilityError("a deviation plan needs a nonempty participation set")
        plan = dict(plan)
        if set(plan) != set(members):
            raise StabilityError("plan must be defined exactly on the participation set")
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "plan", tuple((t, plan[t]) for t in members))

    def strategy(self, t: str) -> MixedStrategy:
        return dict(self.plan)[t]


@dataclass(frozen=True)
class BlockingWitness:
    case_tag: str
    participants: tuple[Participant, Participant]
    agreed_pair: StrategyPair | None
    utilities: tuple[Fraction, Fraction]
    plans: tuple[DeviationPlan, ...] | None = None
    hidden: tuple[str, str] | None = None
    count: int = field(default=1, compare=False)


@dataclass(frozen=True)
class Position:
    """A positive-mass slot: an agent of ``label`` playing ``own`` against ``opp``."""

    label: str
    partner: str
    side: int
    own: MixedStrategy
    opp: MixedStrategy


def positions(mp: MatchingProfileC) -> list[Position]:
    out = []
    for (a, b), pair in mp.profile.entries:
        out.append(Position(a, b, 0, pair.first, pair.second))
        if a != b or pair.first != pair.second:
            out.append(Position(b, a, 1, pair.second, pair.first))
    return out


def status_quo(state: PopulationState, pos: Position) -> Fraction:
    ptype = state.ptype(pos.label)
    rel = SAME if pos.label == pos.partner else CROSS
    return bilinear(pos.own.weights, ptype.table(rel), pos.opp.weights)


def _participant(state: PopulationState, pos: Position) -> Participant:
    return Participant(pos.label, (pos.label, pos.partner), pos.side, ((pos.label, status_quo(state, pos)),))


def iter_blocking(mp: MatchingProfileC, support_cap: int = DEFAULT_SUPPORT_CAP) -> Iterator[BlockingWitness]:
    """All blocking opportunities in canonical order (one per equilibrium and
    type pair, attached to the first eligible positions)."""
    state = mp.state
    pos = positions(mp)
    for a, b in CLASSES:
        pa = [p for p in pos if p.label == a]
        pb = [p for p in pos if p.label == b]
        if not pa or not pb:
            continue
        eqs = enumerate_nash(typed_game(state, a, b), support_cap)
        sq_a = [(status_quo(state, p), p) for p in pa]
        sq_b = [(status_quo(state, p), p) for p in pb]
        for pair, (va, vb) in zip(eqs.equilibria, eqs.values):
            first = next((p for s, p in sq_a if va > s), None)
            second = next((p for s, p in sq_b if vb > s), None)
            if first is None or second is None:
                continue
            yield BlockingWitness(
                "complete",
                (_participant(state, first), _participant(state, second)),
                pair,
                (va, vb),
            )


def find_blocking(mp: MatchingProfileC, support_cap: int = DEFAULT_SUPPORT_CAP) -> BlockingWitness | None:
    """Lexicographically first blocking pair, with ``count`` of all opportunities."""
    found = list(iter_blocking(mp, support_cap))
    if not found:
        return None
    w = found[0]
    return BlockingWitness(w.case_tag, w.participants, w.agreed_pair, w.utilities, w.plans, w.hidden, len(found))


def verify_blocking(mp: MatchingProfileC, w: BlockingWitness) -> bool:
    """Independent re-check of the blocking conditions for a witness."""
    state = mp.state
    p1, p2 = w.participants
    a, b = p1.label, p2.label
    if not any(_participant(state, p) == p1 for p in positions(mp)):
        return False
    if not any(_participant(state, p) == p2 for p in positions(mp)):
        return False
    tg = typed_game(state, a, b)
    if not tg.is_equilibrium(w.agreed_pair):
        return False
    return tg.row_value(w.agreed_pair) > p1.utility() and tg.col_value(w.agreed_pair) > p2.utility()


@dataclass(frozen=True)
class Verdict:
    stable: bool
    internal: InternalViolation | None = None
    witness: BlockingWitness | None = None

    @property
    def reason(self) -> str:
        if self.stable:
            return "stable"
        return "internal" if self.internal is not None else "blocking"


def is_nash_stable(mp: MatchingProfileC, support_cap: int = DEFAULT_SUPPORT_CAP) -> Verdict:
    internal = check_internal(mp)
    if internal is not None:
        return Verdict(False, internal=internal)
    w = find_blocking(mp, support_cap)
    if w is not None:
        return Verdict(False, witness=w)
    return Verdict(True)


def class_average(game: MaterialGame, pair: StrategyPair) -> Fraction:
    return (material_payoff(game, pair.first, pair.second) + material_payoff(game, pair.second, pair.first)) / 2


def fitness_from(game: MaterialGame, mu: Mapping[tuple[str, str], Fraction], profile: StrategyProfileC) -> tuple[Fraction, Fraction]:
    out = []
    for a in TYPES:
        b = TAU if a == THETA else THETA
        g = Fraction(0)
        if mu[(a, a)] > 0:
            g += mu[(a, a)] * class_average(game, profile.get(a, a))
        if mu[(a, b)] > 0:
            pair = profile.get(a, b)
            g += mu[(a, b)] * material_payoff(game, pair.first, pair.second)
        out.append(g)
    return out[0], out[1]


def average_fitness(mp: MatchingProfileC, game: MaterialGame) -> tuple[Fraction, Fraction]:
    """Average material payoff of type-theta and type-tau agents."""
    return fitness_from(game, dict(mp.config.mu), mp.profile)


# ---------------------------------------------------------------------------
# enumeration

@dataclass(frozen=True)
class MuRange:
    """Feasible values of mu_theta,tau for a class pattern.

    ``low``/``high`` are the closure endpoints; ``low_attained`` and
    ``high_attained`` say whether the endpoint itself belongs to the pattern.
    """

    low: Fraction
    high: Fraction
    low_attained: bool
    high_attained: bool

    def endpoints(self) -> list[tuple[Fraction, bool]]:
        if self.low == self.high:
            return [(self.low, True)]
        return [(self.low, self.low_attained), (self.high, self.high_attained)]

    def interior(self) -> Fraction:
        return (self.low + self.high) / 2


PATTERNS = (
    ((THETA, THETA), (TAU, TAU)),
    ((THETA, THETA), (THETA, TAU)),
    ((THETA, TAU), (TAU, TAU)),
    ((THETA, THETA), (THETA, TAU), (TAU, TAU)),
    ((THETA, TAU),),
)


def mu_range(pattern: tuple[tuple[str, str], ...], epsilon: Fraction) -> MuRange | None:
    eps = epsilon
    cap = eps / (1 - eps)
    s = set(pattern)
    if s == {(THETA, THETA), (TAU, TAU)}:
        return MuRange(Fraction(0), Fraction(0), True, True)
    if s == {(THETA, THETA), (THETA, TAU)}:
        return MuRange(cap, cap, True, True) if eps < Fraction(1, 2) else None
    if s == {(THETA, TAU), (TAU, TAU)}:
        return MuRange(Fraction(1), Fraction(1), True, True) if eps > Fraction(1, 2) else None
    if s == {(THETA, TAU)}:
        return MuRange(Fraction(1), Fraction(1), True, True) if eps == Fraction(1, 2) else None
    if s == set(CLASSES):
        return MuRange(Fraction(0), min(Fraction(1), cap), False, False)
    raise StabilityError(f"not a class pattern: {pattern}")


@dataclass(frozen=True)
class StableClass:
    pattern: tuple[tuple[str, str], ...]
    profile: StrategyProfileC
    mu: MuRange
    fitness: tuple[tuple[Fraction, bool, Fraction, Fraction], ...]
    degenerate: bool = False

    def config_at(self, epsilon: Fraction, mu_theta_tau: Fraction) -> MatchingConfiguration:
        return MatchingConfiguration.from_cross(epsilon, mu_theta_tau)


def _candidates(state: PopulationState, cls: tuple[str, str], support_cap: int) -> tuple[tuple[StrategyPair, ...], bool]:
    a, b = cls
    if a == b:
        lb = loser_best_set(state.ptype(a), support_cap=support_cap)
        return dedupe_swaps(lb.pairs), lb.degenerate
    eqs = enumerate_nash(typed_game(state, a, b), support_cap)
    return eqs.equilibria, eqs.degenerate


def enumerate_stable(state: PopulationState, game: MaterialGame, support_cap: int = DEFAULT_SUPPORT_CAP) -> list[StableClass]:
    """Stable profile classes, one per (class pattern, strategy assignment).

    Same-type entries range over loser-best equilibria, cross entries over
    all extreme cross equilibria.  Stability depends on mu only through which
    classes carry positive mass, so each pattern is checked at one
    representative mu and reported with its feasible mu-interval.
    """
    eps = state.epsilon
    cand = {}
    flags = {}
    for cls in CLASSES:
        cand[cls], flags[cls] = _candidates(state, cls, support_cap)
    out = []
    for pattern in PATTERNS:
        rng = mu_range(pattern, eps)
        if rng is None:
            continue
        rep = rng.interior() if not (rng.low_attained or rng.high_attained) else rng.low
        config = MatchingConfiguration.from_cross(eps, rep)
        for choice in _product([cand[c] for c in pattern]):
            profile = StrategyProfileC(dict(zip(pattern, choice)))
            mp = MatchingProfileC(state, config, profile)
            if not is_nash_stable(mp, support_cap).stable:
                continue
            fit = []
            for m, attained in rng.endpoints():
                conf = MatchingConfiguration.from_cross(eps, m)
                g_theta, g_tau = fitness_from(game, dict(conf.mu), profile)
                fit.append((m, attained, g_theta, g_tau))
            out.append(StableClass(pattern, profile, rng, tuple(fit), any(flags[c] for c in pattern)))
    return out


def _product(lists):
    if not lists:
        yield ()
        return
    for head in lists[0]:
        for tail in _product(lists[1:]):
            yield (head,) + tail


# ---------------------------------------------------------------------------
# existence construction

@dataclass(frozen=True)
class Construction:
    profile: MatchingProfileC
    case: int
    l_theta_theta: Fraction
    l_tau_tau: Fraction
    l_tau_theta: Fraction | None
    swapped: bool
    degenerate: bool


def construct_stable(state: PopulationState, support_cap: int = DEFAULT_SUPPORT_CAP) -> Construction:
    """Build a Nash stable profile following the two-case existence argument.

    When epsilon > 1/2 the roles of the two types are exchanged, the
    construction is run, and the result is mapped back.
    """
    swapped = state.epsilon > Fraction(1, 2)
    work = state.swapped() if swapped else state
    lb_theta = loser_best_set(work.theta, support_cap=support_cap)
    lb_tau = loser_best_set(work.tau, support_cap=support_cap)
    front = ne_frontier(work.theta, work.tau, support_cap)
    degenerate = lb_theta.degenerate or lb_tau.degenerate or front.cross.degenerate
    eps = work.epsilon
    theta_pair = lb_theta.pairs[0]
    if front.l_tau_theta is None or front.l_tau_theta < lb_tau.value:
        case = 1
        mu_cross = Fraction(0)
        entries = {(THETA, THETA): theta_pair, (TAU, TAU): lb_tau.pairs[0]}
    else:
        case = 2
        mu_cross = eps / (1 - eps)
        cross_pair = next(
            p for p in front.ne_estar if front.values[p.key()][1] == front.l_tau_theta
        )
        entries = {(THETA, TAU): cross_pair}
        if mu_cross < 1:
            entries[(THETA, THETA)] = theta_pair
    config = MatchingConfiguration.from_cross(eps, mu_cross)
    if swapped:
        entries = {(TAU if a == THETA else THETA, TAU if b == THETA else THETA): p for (a, b), p in entries.items()}
        config = MatchingConfiguration.from_cross(state.epsilon, config[(TAU, THETA)])
    mp = MatchingProfileC(state, config, StrategyProfileC(entries))
    return Construction(mp, case, lb_theta.value, lb_tau.value, front.l_tau_theta, swapped, degenerate)
