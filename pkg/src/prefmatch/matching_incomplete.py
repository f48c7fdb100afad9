"""Matching profiles with partially observable types.

Agents carry one of three labels: ``theta`` and ``tau`` for agents whose type
is public, and ``u`` for the pooled unobservable rest.  A label-u agent is
type theta with probability ``q.q_utheta``.

Blocking is searched in four cases.  Cases II and III involve deviation
plans whose participation sets must equal the set of hidden types that
strictly gain; they are solved on the agent form of the induced Bayesian
game.  Inside a maximal Nash subset every agent's equilibrium value is
linear in the opposing side's convex weights, so the participation
conditions become two small linear feasibility problems per subset, which
makes the search exact even for degenerate games.  Case III* quantifies
over all plans of the other hidden type; utilities are affine in that
type's strategy, so checking its pure strategies suffices.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement, product
from typing import Iterator, Mapping, Sequence

from .equilibria import DEFAULT_SUPPORT_CAP, AgentForm, best_responses, enumerate_nash, solve_agent_form
from .exact import as_rational, bilinear, dot, interior_point
from .game_core import MaterialGame, MixedStrategy, StrategyPair, Table, material_payoff
from .matching_complete import (
    TAU,
    THETA,
    TYPES,
    BlockingWitness,
    DeviationPlan,
    InternalViolation,
    Participant,
    PopulationState,
    Position,
    StabilityError,
    Verdict,
    canonical_entry,
    class_average,
    typed_game,
)
from .preferences import CROSS, SAME, BeliefQ

U = "u"
LABELS = (THETA, TAU, U)
LABEL_CLASSES = ((THETA, THETA), (THETA, TAU), (THETA, U), (TAU, TAU), (TAU, U), (U, U))
CASES = ("I", "II", "III", "IIIstar")


def other(t: str) -> str:
    return TAU if t == THETA else THETA


@dataclass(frozen=True)
class InfoStructure:
    """Masses of agents with public type (``p_theta``, ``p_tau``) and hidden type (``p_u``)."""

    p_theta: Fraction
    p_tau: Fraction
    p_u: Fraction
    epsilon: Fraction

    def __post_init__(self):
        for name in ("p_theta", "p_tau", "p_u", "epsilon"):
            object.__setattr__(self, name, as_rational(getattr(self, name)))
        eps = self.epsilon
        if not 0 < eps < 1:
            raise StabilityError("epsilon must lie strictly between 0 and 1")
        if self.p_theta + self.p_tau + self.p_u != 1:
            raise StabilityError("observability masses must satisfy p_theta + p_tau + p_u = 1")
        if not 0 <= self.p_theta <= 1 - eps:
            raise StabilityError("need 0 <= p_theta <= 1 - epsilon")
        if not 0 <= self.p_tau <= eps:
            raise StabilityError("need 0 <= p_tau <= epsilon")
        if self.p_u < 0:
            raise StabilityError("need p_u >= 0")
        if self.p_u > 0 and (self.p_theta == 1 - eps or self.p_tau == eps):
            raise StabilityError("with p_u > 0 both hidden types need positive mass (q_utheta, q_utau > 0)")

    @classmethod
    def from_q(cls, epsilon, p_u, q_utheta) -> "InfoStructure":
        eps, pu, q = as_rational(epsilon), as_rational(p_u), as_rational(q_utheta)
        return cls(1 - eps - q * pu, eps - (1 - q) * pu, pu, eps)

    def mass(self, label: str) -> Fraction:
        return {THETA: self.p_theta, TAU: self.p_tau, U: self.p_u}[label]

    @property
    def q(self) -> BeliefQ | None:
        if self.p_u == 0:
            return None
        return BeliefQ((1 - self.epsilon - self.p_theta) / self.p_u, (self.epsilon - self.p_tau) / self.p_u)

    def labels(self) -> tuple[str, ...]:
        return tuple(a for a in LABELS if self.mass(a) > 0)


@dataclass(frozen=True)
class MatchingConfigurationI:
    """``mu[(a, b)]``: share of label-a agents matched with label-b agents."""

    mu: tuple[tuple[tuple[str, str], Fraction], ...]

    def __init__(self, mu: Mapping[tuple[str, str], object] | tuple):
        items = dict(mu)
        clean = {}
        for (a, b), v in items.items():
            if a not in LABELS or b not in LABELS:
                raise StabilityError(f"unknown label pair ({a},{b})")
            clean[(a, b)] = as_rational(v)
        for a in LABELS:
            for b in LABELS:
                clean.setdefault((a, b), Fraction(0))
        object.__setattr__(self, "mu", tuple(sorted(clean.items())))

    def __getitem__(self, key: tuple[str, str]) -> Fraction:
        return dict(self.mu)[key]

    def check(self, info: InfoStructure) -> None:
        mu = dict(self.mu)
        for key, v in mu.items():
            if not 0 <= v <= 1:
                raise StabilityError(f"mu{key} must lie in [0,1]")
        for a in LABELS:
            row = sum(mu[(a, b)] for b in LABELS)
            if info.mass(a) > 0 and row != 1:
                raise StabilityError(f"mass balance row-sum violated: mu_{a},theta + mu_{a},tau + mu_{a},u = 1")
            if info.mass(a) == 0 and row != 0:
                raise StabilityError(f"label {a} has zero mass, so its mu entries must be absent")
        for a, b in LABEL_CLASSES:
            if a != b and info.mass(a) * mu[(a, b)] != info.mass(b) * mu[(b, a)]:
                raise StabilityError(f"cross-mass balance violated: p_{a} mu_{a},{b} = p_{b} mu_{b},{a}")

    def active(self, info: InfoStructure) -> tuple[tuple[str, str], ...]:
        mu = dict(self.mu)
        return tuple(c for c in LABEL_CLASSES if info.mass(c[0]) * mu[c] > 0)


@dataclass(frozen=True)
class StrategyProfileI:
    entries: tuple[tuple[tuple[str, str], StrategyPair], ...]

    def __init__(self, entries: Mapping[tuple[str, str], StrategyPair] | tuple):
        clean: dict = {}
        for (a, b), pair in dict(entries).items():
            if a not in LABELS or b not in LABELS:
                raise StabilityError(f"unknown label pair ({a},{b})")
            key, p = canonical_entry(a, b, pair)
            if key in clean:
                raise StabilityError(f"duplicate entry for class {key}")
            clean[key] = p
        order = {c: k for k, c in enumerate(LABEL_CLASSES)}
        object.__setattr__(self, "entries", tuple(sorted(clean.items(), key=lambda kv: order[kv[0]])))

    def get(self, a: str, b: str) -> StrategyPair:
        d = dict(self.entries)
        if (a, b) in d:
            return d[(a, b)]
        if (b, a) in d:
            return d[(b, a)].swapped()
        raise KeyError((a, b))

    def classes(self) -> tuple[tuple[str, str], ...]:
        return tuple(k for k, _ in self.entries)


@dataclass(frozen=True)
class MatchingProfileI:
    state: PopulationState
    info: InfoStructure
    config: MatchingConfigurationI
    profile: StrategyProfileI

    def __post_init__(self):
        if self.info.epsilon != self.state.epsilon:
            raise StabilityError("information structure and population state disagree on epsilon")
        self.config.check(self.info)
        active = set(self.config.active(self.info))
        have = set(self.profile.classes())
        if active != have:
            raise StabilityError(f"profile entries {sorted(have)} do not match positive-mass classes {sorted(active)}")
        n = self.state.theta.n
        for _, pair in self.profile.entries:
            if len(pair.first) != n:
                raise StabilityError("strategy dimension does not match the types")


# ---------------------------------------------------------------------------
# utilities against labels

def type_table(state: PopulationState, t: str, opp: str) -> Table:
    """Utility table of a type-t agent facing an opponent of type ``opp``."""
    return state.ptype(t).table(SAME if t == opp else CROSS)


def label_table(state: PopulationState, q: BeliefQ | None, t: str, opp_label: str) -> Table:
    """Type t's utility table against a label, averaging over hidden types for ``u``."""
    if opp_label in TYPES:
        return type_table(state, t, opp_label)
    if q is None:
        raise StabilityError("label u has zero mass")
    a, b = type_table(state, t, THETA), type_table(state, t, TAU)
    return tuple(
        tuple(q.q_utheta * x + q.q_utau * y for x, y in zip(ra, rb)) for ra, rb in zip(a, b)
    )


def _hidden_types(label: str) -> tuple[str, ...]:
    return TYPES if label == U else (label,)


def check_bayes_nash(mp: MatchingProfileI) -> InternalViolation | None:
    """First class whose pair is not a best response for every type that may hold that side."""
    state, q = mp.state, mp.info.q
    for (a, b), pair in mp.profile.entries:
        for side, (own_label, opp_label, own, opp) in enumerate(
            ((a, b, pair.first, pair.second), (b, a, pair.second, pair.first))
        ):
            for t in _hidden_types(own_label):
                table = label_table(state, q, t, opp_label)
                value, brs = best_responses(table, opp)
                if not set(own.support) <= brs:
                    current = bilinear(own.weights, table, opp.weights)
                    return InternalViolation((a, b), side, min(brs), current, value)
    return None


def positions_i(mp: MatchingProfileI) -> list[Position]:
    out = []
    for (a, b), pair in mp.profile.entries:
        out.append(Position(a, b, 0, pair.first, pair.second))
        if a != b or pair.first != pair.second:
            out.append(Position(b, a, 1, pair.second, pair.first))
    return out


def status_quo_i(mp: MatchingProfileI, pos: Position) -> dict[str, Fraction]:
    """Current utility of each type that may occupy ``pos``."""
    return {
        t: bilinear(pos.own.weights, label_table(mp.state, mp.info.q, t, pos.partner), pos.opp.weights)
        for t in _hidden_types(pos.label)
    }


def _participant(mp: MatchingProfileI, pos: Position) -> Participant:
    sq = status_quo_i(mp, pos)
    return Participant(pos.label, (pos.label, pos.partner), pos.side, tuple((t, sq[t]) for t in TYPES if t in sq))


# ---------------------------------------------------------------------------
# case I

def _iter_case_i(mp: MatchingProfileI, support_cap: int) -> Iterator[BlockingWitness]:
    state = mp.state
    pos = [p for p in positions_i(mp) if p.label in TYPES]
    for a, b in ((THETA, THETA), (THETA, TAU), (TAU, TAU)):
        pa = [(status_quo_i(mp, p)[a], p) for p in pos if p.label == a]
        pb = [(status_quo_i(mp, p)[b], p) for p in pos if p.label == b]
        if not pa or not pb:
            continue
        eqs = enumerate_nash(typed_game(state, a, b), support_cap)
        for pair, (va, vb) in zip(eqs.equilibria, eqs.values):
            first = next((p for s, p in pa if va > s), None)
            second = next((p for s, p in pb if vb > s), None)
            if first is None or second is None:
                continue
            yield BlockingWitness("I", (_participant(mp, first), _participant(mp, second)), pair, (va, vb))


# ---------------------------------------------------------------------------
# cases II and III: agent-form search

def _conditional(q: BeliefQ, members: Sequence[str]) -> list[Fraction]:
    total = sum(q.weight(t) for t in members)
    return [q.weight(t) / total for t in members]


def _bayes_form(state: PopulationState, n: int, left: Sequence[str], left_w, right: Sequence[str], right_w) -> AgentForm:
    """Agent form where each left agent meets the right agents with weights
    ``right_w`` and vice versa."""
    left_pay = {}
    right_pay = {}
    for i, t in enumerate(left):
        for j, s in enumerate(right):
            lt = type_table(state, t, s)
            rt = type_table(state, s, t)
            left_pay[(i, j)] = tuple(tuple(right_w[j] * v for v in row) for row in lt)
            right_pay[(j, i)] = tuple(tuple(left_w[i] * v for v in row) for row in rt)
    return AgentForm(n, len(left), len(right), left_pay, right_pay)


def _participation_lp(
    state: PopulationState,
    n: int,
    vertices,
    opp_values_index: Sequence[int],
    own_types: Sequence[str],
    own_w: Sequence[Fraction],
    universe: Sequence[str],
    members: Sequence[str],
    sq: Mapping[str, Fraction],
) -> list[Fraction] | None:
    """Convex weights over ``vertices`` (own side) under which exactly the
    ``members`` of ``universe`` on the opposing side strictly gain.

    ``vertices[k].values[j]`` is opposing member j's best value against
    vertex k; non-members must weakly lose at every pure reply.
    """
    strict = []
    weak = []
    for j, t in enumerate(members):
        strict.append(([v.values[opp_values_index[j]] for v in vertices], sq[t]))
    for t in universe:
        if t in members:
            continue
        for y in range(n):
            coeffs = []
            for v in vertices:
                acc = Fraction(0)
                for i, s in enumerate(own_types):
                    acc += own_w[i] * dot(type_table(state, t, s)[y], v.strategies[i])
                coeffs.append(acc)
            weak.append((coeffs, sq[t]))
    return interior_point(len(vertices), strict, weak)


def _mix_vertices(vertices, weights: Sequence[Fraction], agent: int) -> MixedStrategy:
    n = len(vertices[0].strategies[agent])
    out = [Fraction(0)] * n
    for v, w in zip(vertices, weights):
        if w:
            for c in range(n):
                out[c] += w * v.strategies[agent][c]
    return MixedStrategy(tuple(out))


def _search_form(
    mp: MatchingProfileI,
    left: Sequence[str],
    left_w: Sequence[Fraction],
    left_universe: Sequence[str],
    sq_left: Mapping[str, Fraction],
    right: Sequence[str],
    right_w: Sequence[Fraction],
    right_universe: Sequence[str],
    sq_right: Mapping[str, Fraction],
    cache: dict,
):
    """First maximal Nash subset meeting both participation conditions."""
    state = mp.state
    n = state.theta.n
    key = (tuple(left), tuple(left_w), tuple(right), tuple(right_w))
    if key not in cache:
        cache[key] = solve_agent_form(_bayes_form(state, n, left, left_w, right, right_w))
    sol = cache[key]
    for comp in sol.components:
        lv = [sol.left_vertices[k] for k in comp.left]
        rv = [sol.right_vertices[k] for k in comp.right]
        # left weights decide whether the right side participates as planned
        alpha = _participation_lp(state, n, lv, range(len(right)), left, left_w, right_universe, right, sq_right)
        if alpha is None:
            continue
        beta = _participation_lp(state, n, rv, range(len(left)), right, right_w, left_universe, left, sq_left)
        if beta is None:
            continue
        xs = {t: _mix_vertices(lv, alpha, i) for i, t in enumerate(left)}
        ys = {t: _mix_vertices(rv, beta, j) for j, t in enumerate(right)}
        left_vals = tuple(
            (t, sum((b * v.values[i] for b, v in zip(beta, rv)), Fraction(0))) for i, t in enumerate(left)
        )
        right_vals = tuple(
            (t, sum((a * v.values[j] for a, v in zip(alpha, lv)), Fraction(0))) for j, t in enumerate(right)
        )
        return xs, ys, left_vals, right_vals
    return None


def _nonempty_type_sets() -> list[tuple[str, ...]]:
    return [(THETA,), (TAU,), (THETA, TAU)]


def _iter_case_ii(mp: MatchingProfileI, cache: dict) -> Iterator[BlockingWitness]:
    q = mp.info.q
    if q is None:
        return
    pos = positions_i(mp)
    observed = [p for p in pos if p.label in TYPES]
    hidden = [p for p in pos if p.label == U]
    for po in observed:
        a = po.label
        sq_a = status_quo_i(mp, po)
        for pu in hidden:
            sq_u = status_quo_i(mp, pu)
            for d in _nonempty_type_sets():
                found = _search_form(mp, (a,), (Fraction(1),), (a,), sq_a, d, _conditional(q, d), TYPES, sq_u, cache)
                if found is None:
                    continue
                xs, ys, lv, rv = found
                yield BlockingWitness(
                    "II",
                    (_participant(mp, po), _participant(mp, pu)),
                    None,
                    (lv[0][1], rv),
                    (DeviationPlan((a,), xs), DeviationPlan(d, ys)),
                )


def _hidden_pairs(mp: MatchingProfileI) -> list[tuple[Position, Position]]:
    hidden = [p for p in positions_i(mp) if p.label == U]
    return list(combinations_with_replacement(hidden, 2))


def _iter_case_iii(mp: MatchingProfileI, cache: dict) -> Iterator[BlockingWitness]:
    q = mp.info.q
    if q is None:
        return
    for p1, p2 in _hidden_pairs(mp):
        sq1, sq2 = status_quo_i(mp, p1), status_quo_i(mp, p2)
        for d1 in _nonempty_type_sets():
            for d2 in _nonempty_type_sets():
                found = _search_form(
                    mp, d1, _conditional(q, d1), TYPES, sq1, d2, _conditional(q, d2), TYPES, sq2, cache
                )
                if found is None:
                    continue
                xs, ys, lv, rv = found
                yield BlockingWitness(
                    "III",
                    (_participant(mp, p1), _participant(mp, p2)),
                    None,
                    (lv, rv),
                    (DeviationPlan(d1, xs), DeviationPlan(d2, ys)),
                )


# ---------------------------------------------------------------------------
# case III*

def _supports(n: int) -> list[tuple[int, ...]]:
    out = []
    for mask in range(1, 1 << n):
        out.append(tuple(i for i in range(n) if mask >> i & 1))
    out.sort(key=lambda s: (len(s), s))
    return out


def _robust_lp(
    mp: MatchingProfileI, a: str, own_support: Sequence[int], b: str, opp_support: Sequence[int], sq: Fraction
) -> list[Fraction] | None:
    """Weights on ``opp_support`` for the partner's strategy such that every
    strategy in ``own_support`` is a best response of type a, strictly above
    ``sq``, whether or not the other hidden type joins and whatever it plays."""
    state, q = mp.state, mp.info.q
    n = state.theta.n
    o = other(b)
    ta, to = type_table(state, a, b), type_table(state, a, o)
    wb, wo = q.weight(b), q.weight(o)
    i0 = own_support[0]
    m = len(opp_support)
    strict = []
    weak = []
    # scenarios: partner's type alone, or both types with the other playing pure z
    scenarios: list[tuple[Fraction, Fraction, int | None]] = [(Fraction(1), Fraction(0), None)]
    scenarios += [(wb, wo, z) for z in range(n)]
    for cb, co, z in scenarios:
        def row(i):
            coeffs = [cb * ta[i][j] for j in opp_support]
            const = co * to[i][z] if z is not None else Fraction(0)
            return coeffs, const

        c0, k0 = row(i0)
        strict.append((c0, sq - k0))
        for i in own_support:
            ci, ki = row(i)
            for k in range(n):
                if k == i:
                    continue
                ck, kk = row(k)
                # payoff(k) - payoff(i) <= 0
                weak.append(([x - y for x, y in zip(ck, ci)], ki - kk))
    return interior_point(m, strict, weak)


def _spread(n: int, support: Sequence[int], weights: Sequence[Fraction]) -> MixedStrategy:
    out = [Fraction(0)] * n
    for i, w in zip(support, weights):
        out[i] = w
    return MixedStrategy(tuple(out))


def _iter_case_iii_star(mp: MatchingProfileI) -> Iterator[BlockingWitness]:
    q = mp.info.q
    if q is None:
        return
    n = mp.state.theta.n
    supports = _supports(n)
    memo: dict = {}
    for p1, p2 in _hidden_pairs(mp):
        sq1, sq2 = status_quo_i(mp, p1), status_quo_i(mp, p2)
        for a, b in product(TYPES, TYPES):
            for sx in supports:
                for sy in supports:
                    k1 = (a, sx, b, sy, sq1[a])
                    if k1 not in memo:
                        memo[k1] = _robust_lp(mp, a, sx, b, sy, sq1[a])
                    y_w = memo[k1]
                    if y_w is None:
                        continue
                    k2 = (b, sy, a, sx, sq2[b])
                    if k2 not in memo:
                        memo[k2] = _robust_lp(mp, b, sy, a, sx, sq2[b])
                    x_w = memo[k2]
                    if x_w is None:
                        continue
                    x_hat, y_hat = _spread(n, sx, x_w), _spread(n, sy, y_w)
                    pair = StrategyPair(x_hat, y_hat)
                    st = mp.state
                    va = bilinear(x_hat.weights, type_table(st, a, b), y_hat.weights)
                    vb = bilinear(y_hat.weights, type_table(st, b, a), x_hat.weights)
                    yield BlockingWitness(
                        "IIIstar",
                        (_participant(mp, p1), _participant(mp, p2)),
                        pair,
                        (va, vb),
                        None,
                        (a, b),
                    )


def iter_blocking_ii(
    mp: MatchingProfileI, cases: Sequence[str] = CASES, support_cap: int = DEFAULT_SUPPORT_CAP
) -> Iterator[BlockingWitness]:
    """Blocking opportunities in case order, then canonical position order."""
    for c in cases:
        if c not in CASES:
            raise StabilityError(f"unknown blocking case {c!r}")
    if mp.state.theta.n > support_cap:
        raise StabilityError(f"|X| exceeds the support enumeration cap {support_cap}")
    cache: dict = {}
    for c in cases:
        if c == "I":
            yield from _iter_case_i(mp, support_cap)
        elif c == "II":
            yield from _iter_case_ii(mp, cache)
        elif c == "III":
            yield from _iter_case_iii(mp, cache)
        else:
            yield from _iter_case_iii_star(mp)


def find_blocking_ii(
    mp: MatchingProfileI,
    cases: Sequence[str] = CASES,
    support_cap: int = DEFAULT_SUPPORT_CAP,
    count: bool = False,
) -> BlockingWitness | None:
    """First incomplete-information blocking pair.  With ``count`` every
    opportunity is enumerated and the total stored on the witness."""
    it = iter_blocking_ii(mp, cases, support_cap)
    first = next(it, None)
    if first is None or not count:
        return first
    total = 1 + sum(1 for _ in it)
    return BlockingWitness(first.case_tag, first.participants, first.agreed_pair, first.utilities, first.plans, first.hidden, total)


def is_bayes_nash_stable(
    mp: MatchingProfileI, cases: Sequence[str] = CASES, support_cap: int = DEFAULT_SUPPORT_CAP
) -> Verdict:
    internal = check_bayes_nash(mp)
    if internal is not None:
        return Verdict(False, internal=internal)
    w = find_blocking_ii(mp, cases, support_cap)
    if w is not None:
        return Verdict(False, witness=w)
    return Verdict(True)


# ---------------------------------------------------------------------------
# witness re-verification (direct from the definitions, no agent forms)

def _expected_table(state: PopulationState, q: BeliefQ, t: str, members: Sequence[str]) -> list:
    """Rows: type t's own strategy; one table per opposing member, weighted."""
    w = _conditional(q, members)
    return [(wi, type_table(state, t, s)) for wi, s in zip(w, members)]


def _value_vs_plan(state, q, t, x: MixedStrategy, plan: DeviationPlan) -> Fraction:
    return sum(
        (wi * bilinear(x.weights, tbl, plan.strategy(s).weights) for (wi, tbl), s in zip(_expected_table(state, q, t, plan.members), plan.members)),
        Fraction(0),
    )


def _best_vs_plan(state, q, t, plan: DeviationPlan) -> tuple[Fraction, frozenset]:
    n = state.theta.n
    vals = [_value_vs_plan(state, q, t, MixedStrategy.pure(n, i), plan) for i in range(n)]
    best = max(vals)
    return best, frozenset(i for i, v in enumerate(vals) if v == best)


def _matches_position(mp: MatchingProfileI, p: Participant) -> bool:
    return any(_participant(mp, pos) == p for pos in positions_i(mp))


def _plan_side_ok(mp, responders: DeviationPlan, against: DeviationPlan, sq: Mapping[str, Fraction], universe) -> bool:
    state, q = mp.state, mp.info.q
    for t in universe:
        best, brs = _best_vs_plan(state, q, t, against)
        if t in responders.members:
            if not set(responders.strategy(t).support) <= brs or not best > sq[t]:
                return False
        elif best > sq[t]:
            return False
    return True


def verify_blocking_ii(mp: MatchingProfileI, w: BlockingWitness) -> bool:
    """Re-check a witness against the case's conditions with exact arithmetic."""
    state, q = mp.state, mp.info.q
    p1, p2 = w.participants
    if not (_matches_position(mp, p1) and _matches_position(mp, p2)):
        return False
    sq1, sq2 = dict(p1.status_quo), dict(p2.status_quo)
    if w.case_tag in ("I", "complete"):
        tg = typed_game(state, p1.label, p2.label)
        return (
            tg.is_equilibrium(w.agreed_pair)
            and tg.row_value(w.agreed_pair) > sq1[p1.label]
            and tg.col_value(w.agreed_pair) > sq2[p2.label]
        )
    if w.case_tag == "II":
        plan_a, plan_u = w.plans
        (a,) = plan_a.members
        if not (p1.label == a and p2.label == U):
            return False
        x_hat = plan_a.strategy(a)
        best, brs = _best_vs_plan(state, q, a, plan_u)
        if not set(x_hat.support) <= brs or not best > sq1[a]:
            return False
        return _ii_hidden_ok(mp, a, x_hat, plan_u, sq2)
    if w.case_tag == "III":
        plan1, plan2 = w.plans
        return _plan_side_ok(mp, plan1, plan2, sq1, TYPES) and _plan_side_ok(mp, plan2, plan1, sq2, TYPES)
    if w.case_tag == "IIIstar":
        return verify_iii_star(mp, w)
    return False


def _ii_hidden_ok(mp, a: str, x_hat: MixedStrategy, plan: DeviationPlan, sq: Mapping[str, Fraction]) -> bool:
    state = mp.state
    for t in TYPES:
        best, brs = best_responses(type_table(state, t, a), x_hat)
        if t in plan.members:
            if not set(plan.strategy(t).support) <= brs or not best > sq[t]:
                return False
        elif best > sq[t]:
            return False
    return True


def _robust_at(mp, a, x_hat: MixedStrategy, b, y_hat: MixedStrategy, sq: Fraction, z: MixedStrategy | None) -> bool:
    """Best-response and strict-gain test for type a against partner b playing
    ``y_hat``, with the other hidden type absent (``z`` None) or playing ``z``."""
    state, q = mp.state, mp.info.q
    members = (b,) if z is None else TYPES
    plan = DeviationPlan(members, {b: y_hat} if z is None else {b: y_hat, other(b): z})
    best, brs = _best_vs_plan(state, q, a, plan)
    return set(x_hat.support) <= brs and _value_vs_plan(state, q, a, x_hat, plan) > sq


def verify_iii_star(mp: MatchingProfileI, w: BlockingWitness, extra: Sequence[MixedStrategy] = ()) -> bool:
    """Check robustness at every pure strategy of the non-partner type, with
    that type absent, and at any ``extra`` mixed strategies supplied."""
    n = mp.state.theta.n
    a, b = w.hidden
    p1, p2 = w.participants
    sq1, sq2 = dict(p1.status_quo), dict(p2.status_quo)
    x_hat, y_hat = w.agreed_pair.first, w.agreed_pair.second
    probes: list[MixedStrategy | None] = [None] + [MixedStrategy.pure(n, z) for z in range(n)] + list(extra)
    for z in probes:
        if not _robust_at(mp, a, x_hat, b, y_hat, sq1[a], z):
            return False
        if not _robust_at(mp, b, y_hat, a, x_hat, sq2[b], z):
            return False
    return True


# ---------------------------------------------------------------------------
# fitness

def average_fitness_ii(mp: MatchingProfileI, game: MaterialGame) -> tuple[Fraction, Fraction]:
    """Average material payoff of type theta and type tau."""
    info, mu, prof = mp.info, mp.config, mp.profile
    eps = info.epsilon

    def group(label: str) -> Fraction:
        g = Fraction(0)
        if info.mass(label) == 0:
            return g
        for partner in LABELS:
            m = mu[(label, partner)]
            if m == 0:
                continue
            pair = prof.get(label, partner)
            if partner == label:
                g += m * class_average(game, pair)
            else:
                g += m * material_payoff(game, pair.first, pair.second)
        return g

    hidden = group(U)
    share_theta = info.p_theta / (1 - eps)
    share_tau = info.p_tau / eps
    g_theta = share_theta * group(THETA) + (1 - share_theta) * hidden
    g_tau = share_tau * group(TAU) + (1 - share_tau) * hidden
    return g_theta, g_tau


def from_complete(mp_config: Mapping[tuple[str, str], Fraction], entries: Mapping[tuple[str, str], StrategyPair], state: PopulationState) -> MatchingProfileI:
    """Embed a complete-information profile (p_u = 0)."""
    eps = state.epsilon
    info = InfoStructure(1 - eps, eps, 0, eps)
    return MatchingProfileI(state, info, MatchingConfigurationI(dict(mp_config)), StrategyProfileI(dict(entries)))
