"""Worked instances, candidate families and one-shot replication runs.

Each replication case rebuilds an instance from scratch, runs the relevant
checkers and compares every computed quantity with a pinned expected value.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Sequence

from .equilibria import enumerate_nash, self_game
from .evolution import DEFAULT_GRID, StabilityReport, compare_over_stable, evo_verdict, same_type_inefficiency
from .game_core import GameError, MaterialGame, MixedStrategy, StrategyPair, efficient_pairs, inefficiency_constants, pair_total
from .matching_complete import (
    MatchingConfiguration,
    MatchingProfileC,
    PopulationState,
    StabilityError,
    StrategyProfileC,
    construct_stable,
    enumerate_stable,
    find_blocking,
    is_nash_stable,
)
from .matching_incomplete import (
    InfoStructure,
    MatchingConfigurationI,
    MatchingProfileI,
    StrategyProfileI,
    average_fitness_ii,
    check_bayes_nash,
    find_blocking_ii,
    is_bayes_nash_stable,
    verify_blocking_ii,
)
from .preferences import PreferenceType, build_adversary_type, build_type, default_anticoordinator_m

F = Fraction

# ---------------------------------------------------------------------------
# material games

def ex1_game() -> MaterialGame:
    # This instance is stated in utilities only; fitness plays no role there.
    return MaterialGame(("A", "B"), [[1, 1], [1, 1]])


def table3_game() -> MaterialGame:
    return MaterialGame(("A", "B", "C"), [[0, 3, 2], [5, 0, 0], [8, 0, 0]], allow_nonpositive=True)


def table4_game() -> MaterialGame:
    return MaterialGame(("A", "B", "C"), [[0, 0, 2], [0, 3, 0], [8, 0, 0]], allow_nonpositive=True)


def bos_game() -> MaterialGame:
    return MaterialGame(("A", "B"), [[0, 1], [3, 0]], allow_nonpositive=True)


def table6_game() -> MaterialGame:
    return MaterialGame(("A", "B"), [[3, 0], [0, 0]], allow_nonpositive=True)


def table8_game() -> MaterialGame:
    return MaterialGame(("A", "B", "C"), [[0, 8, 7], [10, 0, 0], [10, 0, 0]], allow_nonpositive=True)


def pd_game(a=3, b=1, c=4, d=2) -> MaterialGame:
    return MaterialGame(("C", "D"), [[a, b], [c, d]])


GAMES: dict[str, Callable[[], MaterialGame]] = {
    "ex1": ex1_game,
    "table3": table3_game,
    "table4": table4_game,
    "bos": bos_game,
    "table6": table6_game,
    "table8": table8_game,
    "pd": pd_game,
}


def ex1_types(game: MaterialGame) -> tuple[PreferenceType, PreferenceType]:
    theta_table = [[0, 2], [3, 0]]
    tau_table = [[4, 2], [3, 0]]
    theta = build_type(game, "custom", same=theta_table, cross=theta_table, name="theta")
    tau = build_type(game, "custom", same=tau_table, cross=tau_table, name="tau")
    return theta, tau


# ---------------------------------------------------------------------------
# incomplete-information profiles and candidate families

def ex4_profile(delta, epsilon=F(1, 4), lam=1, game: MaterialGame | None = None, theta=None, tau=None,
                theta_pair=("A", "B"), hidden_pair=("A", "B")) -> MatchingProfileI:
    """Observable theta pairs with theta; every other agent is in a (u, tau) match.

    With p_u = p_tau = epsilon/(2 - delta) the belief q_utheta equals delta.
    """
    game = game or bos_game()
    theta = theta or build_type(game, "homophilic_efficient", lam=lam)
    tau = tau or build_adversary_type(game, "ex4_coordination_seeker")
    eps = F(epsilon)
    p = eps / (2 - F(delta))
    info = InfoStructure(1 - eps - F(delta) * p, p, p, eps)
    cfg = MatchingConfigurationI({("theta", "theta"): 1, ("u", "tau"): 1, ("tau", "u"): 1})
    prof = StrategyProfileI({("theta", "theta"): game.pair(*theta_pair), ("u", "tau"): game.pair(*hidden_pair)})
    return MatchingProfileI(PopulationState(theta, tau, eps), info, cfg, prof)


def b2_profile() -> MatchingProfileI:
    game = table6_game()
    theta = build_type(game, "parochial_efficient")
    tau = build_adversary_type(game, "b2_mixed_motive")
    state = PopulationState(theta, tau, F(1, 2))
    info = InfoStructure(0, 0, 1, F(1, 2))
    return MatchingProfileI(state, info, MatchingConfigurationI({("u", "u"): 1}), StrategyProfileI({("u", "u"): game.pair("B", "B")}))


def b4_profile(theta_family: str = "parochial_selfish") -> MatchingProfileI:
    game = table8_game()
    theta = build_type(game, theta_family)
    tau = build_adversary_type(game, "b4_antiparochial_efficient")
    state = PopulationState(theta, tau, F(1, 2))
    info = InfoStructure(F(5, 18), F(4, 9), F(5, 18), F(1, 2))
    cfg = MatchingConfigurationI({("theta", "u"): 1, ("u", "theta"): 1, ("tau", "tau"): 1})
    prof = StrategyProfileI({("theta", "u"): game.pair("C", "A"), ("tau", "tau"): game.pair("B", "A")})
    return MatchingProfileI(state, info, cfg, prof)


def prop5_profile(epsilon, q_utheta, lam=1) -> MatchingProfileI:
    game = bos_game()
    theta = build_type(game, "homophilic_efficient", lam=lam)
    tau = build_adversary_type(game, "prop5_anticoordinator", {"lambda": lam})
    eps, q = F(epsilon), F(q_utheta)
    info = InfoStructure.from_q(eps, eps / (2 - q), q)
    cfg = MatchingConfigurationI({("theta", "theta"): 1, ("u", "tau"): 1, ("tau", "u"): 1})
    prof = StrategyProfileI({("theta", "theta"): game.pair("B", "A"), ("u", "tau"): game.pair("A", "B")})
    return MatchingProfileI(PopulationState(theta, tau, eps), info, cfg, prof)


def b3_profile(epsilon, q_utheta) -> MatchingProfileI:
    """Selfish incumbents; the advantaged side of (B, A) goes to the tau partner of a u agent."""
    game = bos_game()
    theta = build_type(game, "selfish")
    tau = build_adversary_type(game, "prop6_advantage_only_efficient")
    eps, q = F(epsilon), F(q_utheta)
    info = InfoStructure.from_q(eps, eps / (2 - q), q)
    cfg = MatchingConfigurationI({("theta", "theta"): 1, ("u", "tau"): 1, ("tau", "u"): 1})
    prof = StrategyProfileI({("theta", "theta"): game.pair("A", "B"), ("u", "tau"): game.pair("A", "B")})
    return MatchingProfileI(PopulationState(theta, tau, eps), info, cfg, prof)


@dataclass(frozen=True)
class Template:
    """A matching configuration over labels, with the info structure it needs.

    ``masses(epsilon, q)`` returns (p_theta, p_tau, p_u) or None when the
    template is infeasible at that point.
    """

    name: str
    mu: tuple[tuple[tuple[str, str], int], ...]
    masses: Callable[[Fraction, Fraction], tuple[Fraction, Fraction, Fraction] | None]

    def classes(self) -> list[tuple[str, str]]:
        seen = []
        for (a, b), _ in self.mu:
            if (b, a) not in seen and (a, b) not in seen:
                seen.append((a, b))
        return seen


def _cross_hidden(eps, q):
    p = eps / (2 - q)
    return 1 - eps - q * p, p, p


def _hidden_theta(eps, q):
    p = (1 - eps) / (1 + q)
    p_tau = eps - (1 - q) * p
    if p_tau <= 0:
        return None
    return p, p_tau, p


def _pooled(eps, q):
    return (F(0), F(0), F(1)) if q == 1 - eps else None


TEMPLATES = (
    Template("theta-assortative, u with tau", ((("theta", "theta"), 1), (("u", "tau"), 1), (("tau", "u"), 1)), _cross_hidden),
    Template("u with theta, tau-assortative", ((("theta", "u"), 1), (("u", "theta"), 1), (("tau", "tau"), 1)), _hidden_theta),
    Template("everyone hidden", ((("u", "u"), 1),), _pooled),
)


def candidate_family(
    theta: PreferenceType,
    tau: PreferenceType,
    game: MaterialGame,
    epsilons: Sequence = (F(1, 4), F(1, 2)),
    qs: Sequence = (F(1, 10), F(1, 2)),
    templates: Sequence[Template] = TEMPLATES,
) -> list[MatchingProfileI]:
    """Every pure-strategy assignment on each template that is a Bayes-Nash profile.

    The pooled template only exists at q_utheta = 1 - epsilon, so that
    value is added for it.  Same-label classes keep one orientation.
    """
    out = []
    n = game.n
    pure = [StrategyPair(MixedStrategy.pure(n, i), MixedStrategy.pure(n, j)) for i in range(n) for j in range(n)]
    half = [p for p in pure if p.first.pure_index() <= p.second.pure_index()]
    for tpl in templates:
        for eps in epsilons:
            eps = F(eps)
            q_values = [F(q) for q in qs]
            if tpl.masses is _pooled:
                q_values = [1 - eps]
            for q in q_values:
                masses = tpl.masses(eps, q)
                if masses is None:
                    continue
                try:
                    info = InfoStructure(*masses, eps)
                except StabilityError:
                    continue
                state = PopulationState(theta, tau, eps)
                cfg = MatchingConfigurationI(dict(tpl.mu))
                classes = tpl.classes()
                options = [half if a == b else pure for a, b in classes]
                for choice in product(*options):
                    mp = MatchingProfileI(state, info, cfg, StrategyProfileI(dict(zip(classes, choice))))
                    if check_bayes_nash(mp) is None:
                        out.append(mp)
    return out


# ---------------------------------------------------------------------------
# replication

@dataclass(frozen=True)
class Check:
    name: str
    expected: object
    computed: object

    @property
    def ok(self) -> bool:
        return self.expected == self.computed


@dataclass
class Replication:
    case_id: str
    checks: list[Check] = field(default_factory=list)
    report: StabilityReport | None = None
    elapsed: float = 0.0

    def expect(self, name: str, expected, computed) -> None:
        self.checks.append(Check(name, expected, computed))

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    def mismatches(self) -> list[Check]:
        return [c for c in self.checks if not c.ok]


def _labels(game: MaterialGame, profile) -> list[tuple[tuple[str, str], str]]:
    return [(cls, pair.label(game.strategy_labels)) for cls, pair in profile.entries]


def _ex1(r: Replication) -> None:
    game = ex1_game()
    theta, tau = ex1_types(game)
    st = PopulationState(theta, tau, F(1, 4))
    r.expect("equilibria of the theta-theta game", 3, len(enumerate_nash(self_game(theta)).equilibria))
    unique = True
    for eps in DEFAULT_GRID:
        classes = enumerate_stable(PopulationState(theta, tau, eps), game)
        got = [_labels(game, c.profile) for c in classes]
        unique &= got == [[(("theta", "theta"), "(A,B)"), (("tau", "tau"), "(A,A)")]]
    r.expect("unique stable class {(A,B) theta-theta, (A,A) tau-tau} on the epsilon grid", True, unique)
    mix = MixedStrategy((F(2, 5), F(3, 5)))
    mixed = MatchingProfileC(st, MatchingConfiguration.from_cross(F(1, 4), 0),
                             StrategyProfileC({("theta", "theta"): StrategyPair(mix, mix), ("tau", "tau"): game.pair("A", "A")}))
    w = find_blocking(mixed)
    r.expect("mixed profile: blocking agents' status quo", F(6, 5), w.participants[0].utility() if w else None)
    r.expect("mixed profile: blocking utilities", (F(2), F(3)), tuple(sorted(w.utilities)) if w else None)
    cross = MatchingProfileC(st, MatchingConfiguration.from_cross(F(1, 4), F(1, 3)),
                             StrategyProfileC({("theta", "theta"): game.pair("A", "B"), ("theta", "tau"): game.pair("B", "A")}))
    w = find_blocking(cross)
    r.expect("cross profile: blocked by two tau agents on (A,A)", (("tau", "tau"), "(A,A)", (F(4), F(4))),
             ((w.participants[0].label, w.participants[1].label), w.agreed_pair.label(game.strategy_labels), w.utilities) if w else None)
    c = construct_stable(st)
    r.expect("construction output is stable", True, is_nash_stable(c.profile).stable)


def _ex2(r: Replication) -> None:
    game = table3_game()
    tau = build_adversary_type(game, "ex2_mutant")
    theta = build_type(game, "homophilic_selfish", lam=1)
    cross_ok = True
    seen = 0
    for eps in DEFAULT_GRID:
        for c in enumerate_stable(PopulationState(theta, tau, eps), game):
            if (("theta", "tau"), "(A,B)") not in _labels(game, c.profile):
                continue
            for m, attained, g_theta, g_tau in c.fitness:
                if m > 0:
                    seen += 1
                    cross_ok &= g_tau == 5 and g_theta < 5
    r.expect("cross classes with (A,B) theta-tau exist on the grid", True, seen > 0)
    r.expect("G_tau = 5 > G_theta at every vertex with mu_theta_tau > 0", True, cross_ok)
    st = PopulationState(theta, tau, F(1, 2))
    mp = MatchingProfileC(st, MatchingConfiguration.from_cross(F(1, 2), 1), StrategyProfileC({("theta", "tau"): game.pair("A", "B")}))
    r.expect("cross profile at epsilon 1/2 is Nash stable (lambda 1)", True, is_nash_stable(mp).stable)
    r.report = evo_verdict(theta, tau, game, "complete", DEFAULT_GRID)
    r.expect("verdict (lambda 1)", "tau_ES_against_theta", r.report.aggregate)
    theta9 = build_type(game, "homophilic_selfish", lam=9)
    mp9 = MatchingProfileC(PopulationState(theta9, tau, F(1, 2)), mp.config, mp.profile)
    w = find_blocking(mp9)
    r.expect("lambda 9: cross profile blocked by two theta agents", ("theta", "theta"),
             (w.participants[0].label, w.participants[1].label) if w else None)
    r.expect("lambda 9: blocking utilities vs status quo 3", ((F(11), F(17)), F(3)),
             (tuple(sorted(w.utilities)), w.participants[0].utility()) if w else None)
    classes9 = enumerate_stable(PopulationState(theta9, tau, F(1, 2)), game)
    r.expect("lambda 9: only the assortative class survives", [[(("theta", "theta"), "(A,C)"), (("tau", "tau"), "(A,C)")]],
             [_labels(game, c.profile) for c in classes9])
    r.expect("lambda 9 verdict", "neutral_tie", compare_over_stable(theta9, tau, game, "complete", DEFAULT_GRID).aggregate)


def _ex3(r: Replication) -> None:
    game = table4_game()
    tau = build_adversary_type(game, "ex3_mutant")
    r.expect("selfish type shows same-type inefficiency", True, same_type_inefficiency(build_type(game, "selfish"), game))
    for theta in (build_type(game, "homophilic_selfish", lam=1), build_type(game, "parochial_selfish")):
        tag = theta.family_tag
        ok = True
        for eps in DEFAULT_GRID:
            classes = enumerate_stable(PopulationState(theta, tau, eps), game)
            ok &= [_labels(game, c.profile) for c in classes] == [[(("theta", "theta"), "(B,B)"), (("tau", "tau"), "(A,C)")]]
            ok &= all((g1, g2) == (3, 5) for c in classes for _, _, g1, g2 in c.fitness)
        r.expect(f"{tag}: unique class {{(B,B), (A,C)}} with G = (3, 5) on the grid", True, ok)
        rep = compare_over_stable(theta, tau, game, "complete", (F(1, 4), F(1, 2), F(3, 4)))
        r.expect(f"{tag}: verdict", "tau_ES_against_theta", rep.aggregate)
        r.report = rep


def _ex4(r: Replication) -> None:
    game = bos_game()
    mp = ex4_profile(F(1, 100))
    r.expect("q_utheta", F(1, 100), mp.info.q.q_utheta)
    r.expect("Bayes-Nash stable at delta 1/100", True, is_bayes_nash_stable(mp).stable)
    r.expect("fitness (G_theta, G_tau)", (F(1193, 597), F(399, 199)), average_fitness_ii(mp, game))
    v = check_bayes_nash(ex4_profile(F(1, 2)))
    r.expect("delta 1/2: internal violation (class, side)", (("tau", "u"), 0), (v.cls, v.side) if v else None)
    family = [ex4_profile(F(1, 100), eps) for eps in DEFAULT_GRID]
    theta, tau = family[0].state.theta, family[0].state.tau
    r.report = evo_verdict(theta, tau, game, "incomplete", DEFAULT_GRID, family)
    r.expect("verdict over the epsilon grid", "tau_ES_against_theta", r.report.aggregate)
    r.expect("all grid points stable", len(family), len(r.report.records))


def _b2(r: Replication) -> None:
    game = table6_game()
    mp = b2_profile()
    r.expect("profile is Bayes-Nash", True, check_bayes_nash(mp) is None)
    w = find_blocking_ii(mp)
    r.expect("first witness case", "IIIstar", w.case_tag if w else None)
    r.expect("witness pair and hidden types", ("(A,A)", ("theta", "theta")),
             (w.agreed_pair.label(game.strategy_labels), w.hidden) if w else None)
    r.expect("witness verifies", True, verify_blocking_ii(mp, w) if w else None)
    r.expect("cases I-III find nothing", None, find_blocking_ii(mp, cases=("I", "II", "III")))


def _b4(r: Replication) -> None:
    game = table8_game()
    mp = b4_profile()
    r.expect("q_utheta", F(4, 5), mp.info.q.q_utheta)
    r.expect("Bayes-Nash stable", True, is_bayes_nash_stable(mp).stable)
    r.expect("fitness (G_theta, G_tau)", (F(78, 9), F(79, 9)), average_fitness_ii(mp, game))


def _pd(r: Replication) -> None:
    game = pd_game()
    selfish = build_type(game, "selfish")
    r.expect("selfish shows same-type inefficiency", True, same_type_inefficiency(selfish, game))
    r.expect("parochial efficient shows none", False, same_type_inefficiency(build_type(game, "parochial_efficient"), game))
    r.expect("material equilibria", ["(D,D)"], [p.label(game.strategy_labels) for p in enumerate_nash(self_game(selfish)).equilibria])
    rep = evo_verdict(build_type(game, "parochial_efficient"), selfish, game, "complete", DEFAULT_GRID)
    r.report = rep
    r.expect("parochial efficient vs selfish", "theta_ES_against_tau", rep.aggregate)
    r.expect("fitness values seen", {(F(3), F(2))}, {(x.g_theta, x.g_tau) for x in rep.records})


def _prop2(r: Replication) -> None:
    game = bos_game()
    theta = build_type(game, "selfish")
    tau = build_adversary_type(game, "prop2_advantage_efficient")
    rep = evo_verdict(theta, tau, game, "complete", DEFAULT_GRID)
    r.report = rep
    r.expect("verdict", "tau_ES_against_theta", rep.aggregate)
    r.expect("reverse verdict", "theta_ES_against_tau", rep.reverse_aggregate)


def _prop5(r: Replication) -> None:
    game = bos_game()
    best, _ = efficient_pairs(game)
    theta = build_type(game, "homophilic_efficient", lam=1)
    ne_totals = [pair_total(game, p) for p in enumerate_nash(self_game(theta)).equilibria]
    consts = inefficiency_constants(game, [t for t in ne_totals if t != best], F(1))
    r.expect("efficient total, best inefficient total, best inefficient equilibrium total",
             (F(4), F(0), F(2)), (consts.efficient_total, consts.best_inefficient_total, consts.best_inefficient_ne_total))
    r.expect("delta bar", F(4, 5), consts.delta_bar)
    r.expect("default M", 49, default_anticoordinator_m(game, 1))
    pinned = {(F(1, 4), F(1, 10)): (F(113, 57), F(39, 19)), (F(1, 2), F(1, 10)): (F(37, 19), F(39, 19))}
    family = []
    for (eps, q), fit in pinned.items():
        mp = prop5_profile(eps, q)
        family.append(mp)
        r.expect(f"epsilon {eps}, q {q}: stable", True, is_bayes_nash_stable(mp).stable)
        r.expect(f"epsilon {eps}, q {q}: fitness", fit, average_fitness_ii(mp, game))
    r.report = evo_verdict(family[0].state.theta, family[0].state.tau, game, "incomplete", [], family)
    r.expect("verdict over the constructed profiles", "tau_ES_against_theta", r.report.aggregate)


def _b3(r: Replication) -> None:
    game = bos_game()
    pinned = {(F(1, 4), F(1, 10)): (F(113, 57), F(39, 19)), (F(1, 2), F(1, 2)): (F(5, 3), F(7, 3))}
    family = []
    for (eps, q), fit in pinned.items():
        mp = b3_profile(eps, q)
        family.append(mp)
        r.expect(f"epsilon {eps}, q {q}: stable", True, is_bayes_nash_stable(mp).stable)
        r.expect(f"epsilon {eps}, q {q}: fitness", fit, average_fitness_ii(mp, game))
    r.report = evo_verdict(family[0].state.theta, family[0].state.tau, game, "incomplete", [], family)
    r.expect("verdict over the constructed profiles", "tau_ES_against_theta", r.report.aggregate)


def _b1(r: Replication) -> None:
    states = []
    g1 = ex1_game()
    states.append(("ex1", ex1_types(g1)))
    g3 = table3_game()
    states.append(("ex2", (build_type(g3, "homophilic_selfish", lam=1), build_adversary_type(g3, "ex2_mutant"))))
    g4 = table4_game()
    states.append(("ex3", (build_type(g4, "parochial_selfish"), build_adversary_type(g4, "ex3_mutant"))))
    for tag, (theta, tau) in states:
        ok = True
        for eps in DEFAULT_GRID:
            c = construct_stable(PopulationState(theta, tau, eps))
            ok &= is_nash_stable(c.profile).stable
        r.expect(f"{tag}: construction stable on the epsilon grid", True, ok)


CASES: dict[str, Callable[[Replication], None]] = {
    "ex1": _ex1,
    "ex2": _ex2,
    "ex3": _ex3,
    "ex4": _ex4,
    "b2": _b2,
    "b4": _b4,
    "pd_table2": _pd,
    "prop2_demo": _prop2,
    "prop5_demo": _prop5,
    "b3_demo": _b3,
    "b1_construct": _b1,
}


def replicate(case_id: str) -> Replication:
    if case_id not in CASES:
        raise GameError(f"unknown case {case_id!r}; choose from {', '.join(CASES)}")
    r = Replication(case_id)
    t0 = time.perf_counter()
    CASES[case_id](r)
    r.elapsed = time.perf_counter() - t0
    return r
