"""The ten acceptance criteria, one test each; every test prints a PASS/FAIL line."""

import random
import time
from fractions import Fraction as F

import pytest

from gen import lemma_one_violations, random_state
from oracles import ne_2x2
from prefmatch.cases import (
    GAMES,
    b2_profile,
    b4_profile,
    bos_game,
    candidate_family,
    ex4_profile,
    pd_game,
    replicate,
    table3_game,
    table4_game,
    table6_game,
    table8_game,
)
from prefmatch.equilibria import TypedGame, enumerate_nash
from prefmatch.evolution import DEFAULT_GRID, compare_over_stable, evo_verdict
from prefmatch.game_core import GameError, MixedStrategy, StrategyPair
from prefmatch.matching_complete import (
    MatchingConfiguration,
    MatchingProfileC,
    PopulationState,
    StrategyProfileC,
    construct_stable,
    enumerate_stable,
    find_blocking,
    is_nash_stable,
)
from prefmatch.matching_incomplete import (
    average_fitness_ii,
    check_bayes_nash,
    find_blocking_ii,
    is_bayes_nash_stable,
)
from prefmatch.preferences import RECIPES, build_adversary_type, build_type


def report(number, ok, elapsed, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} ({elapsed:.2f}s) {detail}"
    print("\n" + line)
    return line


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def labels_of(game, profile):
    return [(c, p.label(game.strategy_labels)) for c, p in profile.entries]


def test_criterion_01_example_one(capsys):
    def body():
        game = GAMES["ex1"]()
        theta, tau = __import__("prefmatch.cases", fromlist=["ex1_types"]).ex1_types(game)
        unique = all(
            [labels_of(game, c.profile) for c in enumerate_stable(PopulationState(theta, tau, eps), game)]
            == [[(("theta", "theta"), "(A,B)"), (("tau", "tau"), "(A,A)")]]
            for eps in DEFAULT_GRID
        )
        mix = MixedStrategy((F(2, 5), F(3, 5)))
        st = PopulationState(theta, tau, F(1, 4))
        mp = MatchingProfileC(st, MatchingConfiguration.from_cross(F(1, 4), 0),
                              StrategyProfileC({("theta", "theta"): StrategyPair(mix, mix), ("tau", "tau"): game.pair("A", "A")}))
        w = find_blocking(mp)
        rejected = w is not None and max(w.utilities) >= 2 and min(w.utilities) == 2 and w.participants[0].utility() == F(6, 5)
        return unique and rejected and replicate("ex1").passed

    ok, dt = timed(body)
    with capsys.disabled():
        report(1, ok and dt < 1, dt, "unique assortative class on the grid; mixed profile blocked at 2 > 6/5")
    assert ok and dt < 1


def test_criterion_02_example_three(capsys):
    def body():
        game = table4_game()
        tau = build_adversary_type(game, "ex3_mutant")
        ok = True
        for theta in (build_type(game, "homophilic_selfish", lam=1), build_type(game, "parochial_selfish")):
            for eps in DEFAULT_GRID:
                classes = enumerate_stable(PopulationState(theta, tau, eps), game)
                ok &= [labels_of(game, c.profile) for c in classes] == [[(("theta", "theta"), "(B,B)"), (("tau", "tau"), "(A,C)")]]
                ok &= all((g1, g2) == (3, 5) for c in classes for _, _, g1, g2 in c.fitness)
        return ok and replicate("ex3").passed

    ok, dt = timed(body)
    with capsys.disabled():
        report(2, ok and dt < 1, dt, "unique class {(B,B), (A,C)}, G = (3, 5) for both incumbents")
    assert ok and dt < 1


def test_criterion_03_example_two(capsys):
    def body():
        game = table3_game()
        tau = build_adversary_type(game, "ex2_mutant")
        theta = build_type(game, "homophilic_selfish", lam=1)
        mp = MatchingProfileC(PopulationState(theta, tau, F(1, 2)), MatchingConfiguration.from_cross(F(1, 2), 1),
                              StrategyProfileC({("theta", "tau"): game.pair("A", "B")}))
        stable = is_nash_stable(mp).stable
        vertices = [(g1, g2) for eps in DEFAULT_GRID for c in enumerate_stable(PopulationState(theta, tau, eps), game)
                    if (("theta", "tau"), "(A,B)") in labels_of(game, c.profile)
                    for m, _, g1, g2 in c.fitness if m > 0]
        cross = bool(vertices) and all(g2 == 5 and g1 < 5 for g1, g2 in vertices)
        theta9 = build_type(game, "homophilic_selfish", lam=9)
        w = find_blocking(MatchingProfileC(PopulationState(theta9, tau, F(1, 2)), mp.config, mp.profile))
        blocked = w is not None and min(w.utilities) == 11 and w.participants[0].utility() == 3
        return stable and cross and blocked and replicate("ex2").passed

    ok, dt = timed(body)
    with capsys.disabled():
        report(3, ok and dt < 1, dt, "cross (A,B) stable with G_tau = 5 > G_theta; lambda 9 blocked at 2+9 > 3")
    assert ok and dt < 1


def test_criterion_04_example_four(capsys):
    def body():
        mp = ex4_profile(F(1, 100))
        stable = is_bayes_nash_stable(mp).stable
        g_theta, g_tau = average_fitness_ii(mp, bos_game())
        exact = isinstance(g_theta, F) and isinstance(g_tau, F) and g_theta < 2 < g_tau
        fails = check_bayes_nash(ex4_profile(F(1, 2))) is not None
        return stable and exact and fails and replicate("ex4").passed, (g_theta, g_tau)

    (ok, g), dt = timed(body)
    with capsys.disabled():
        report(4, ok and dt < 5, dt, f"G = ({g[0]}, {g[1]}); delta 1/2 breaks Bayes-Nash")
    assert ok and dt < 5


def test_criterion_05_b2(capsys):
    def body():
        mp = b2_profile()
        w = find_blocking_ii(mp)
        ok = w is not None and w.case_tag == "IIIstar" and w.hidden == ("theta", "theta")
        ok &= w.agreed_pair.label(table6_game().strategy_labels) == "(A,A)"
        ok &= find_blocking_ii(mp, cases=("I", "II", "III")) is None
        return ok and replicate("b2").passed

    ok, dt = timed(body)
    with capsys.disabled():
        report(5, ok and dt < 5, dt, "case III* witness on (A,A); cases I-III find none")
    assert ok and dt < 5


def test_criterion_06_b4(capsys):
    def body():
        mp = b4_profile()
        info_ok = (mp.info.p_theta, mp.info.p_tau, mp.info.p_u, mp.info.q.q_utheta) == (F(5, 18), F(4, 9), F(5, 18), F(4, 5))
        return info_ok and is_bayes_nash_stable(mp).stable and average_fitness_ii(mp, table8_game()) == (F(78, 9), F(79, 9))

    ok, dt = timed(body)
    with capsys.disabled():
        report(6, ok and dt < 10, dt, "stable, G = (78/9, 79/9)")
    assert ok and dt < 10


def test_criterion_07_oracle_equivalence(capsys):
    def body():
        rng = random.Random(7)
        bad = 0
        for _ in range(1000):
            row = [[rng.randint(0, 4) for _ in range(2)] for _ in range(2)]
            col = [[rng.randint(0, 4) for _ in range(2)] for _ in range(2)]
            eqs = enumerate_nash(TypedGame(row, col))
            got = {p.key(): v for p, v in zip(eqs.equilibria, eqs.values)}
            want = {(tuple(x), tuple(y)): v for (x, y), v in ne_2x2(row, col).items()}
            bad += got != want
        return bad

    bad, dt = timed(body)
    ok = bad == 0 and dt < 30
    with capsys.disabled():
        report(7, ok, dt, f"1000 random 2x2 games, {bad} mismatches")
    assert ok


def test_criterion_08_loser_best_lemma(capsys):
    def body():
        rng = random.Random(8)
        violations, stable_seen = [], 0
        for _ in range(200):
            state, _ = random_state(rng)
            bad, seen = lemma_one_violations(state)
            violations += bad
            stable_seen += seen
        return violations, stable_seen

    (violations, seen), dt = timed(body)
    ok = not violations
    with capsys.disabled():
        report(8, ok, dt, f"200 scenarios, {seen} stable profiles checked, {len(violations)} violations")
    assert ok, violations[:3]


def test_criterion_09_construction(capsys):
    # Wide utility range: ties (and so continuum components) are rare but not absent.
    def body():
        rng = random.Random(9)
        flagged, failures, flagged_failures = 0, [], []
        for k in range(200):
            state, _ = random_state(rng, hi=100)
            c = construct_stable(state)
            stable = is_nash_stable(c.profile).stable
            if c.degenerate:
                flagged += 1
                if not stable:
                    flagged_failures.append(k)
            elif not stable:
                failures.append(k)
        return flagged, failures, flagged_failures

    (flagged, failures, flagged_failures), dt = timed(body)
    ok = not failures and flagged < 40
    with capsys.disabled():
        report(9, ok, dt, f"200 scenarios, {flagged} degenerate-flagged excluded ({len(flagged_failures)} of those unstable), "
                          f"{len(failures)} violations")
    assert ok, failures


def _prop7_records():
    """Incomplete-information records for parochial efficient incumbents against every mutant we can build."""
    lt, stable, families = [], 0, 0
    for gname, make in sorted(GAMES.items()):
        game = make()
        theta = build_type(game, "parochial_efficient")
        mutants = []
        for recipe in RECIPES:
            params = {"lambda": 1} if recipe == "prop5_anticoordinator" else None
            try:
                mutants.append(build_adversary_type(game, recipe, params))
            except GameError:
                continue
        mutants += [build_type(game, "selfish"), build_type(game, "parochial_selfish")]
        for tau in mutants:
            family = candidate_family(theta, tau, game)
            if not family:
                continue
            families += 1
            rep = compare_over_stable(theta, tau, game, "incomplete", (), family)
            stable += len(rep.records)
            lt += [(gname, tau.name, r.profile_id) for r in rep.records if r.comparison == "lt"]
    for mp, game in ((b2_profile(), table6_game()), (b4_profile("parochial_efficient"), table8_game())):
        rep = compare_over_stable(mp.state.theta, mp.state.tau, game, "incomplete", (), [mp])
        families += 1
        stable += len(rep.records)
        lt += [("shipped", mp.state.tau.name, r.profile_id) for r in rep.records if r.comparison == "lt"]
    return lt, stable, families


def test_criterion_10_propositions(capsys):
    t0 = time.perf_counter()
    lines = []
    game4 = table4_game()
    prop1 = compare_over_stable(build_type(game4, "parochial_efficient"), build_adversary_type(game4, "ex3_mutant"),
                                game4, "complete", DEFAULT_GRID).aggregate
    ok1 = prop1 == "theta_ES_against_tau"
    lines.append(f"  Prop 1 (parochial efficient vs ex3_mutant): {prop1} -> {'PASS' if ok1 else 'FAIL'}")
    pd = pd_game()
    selfish = build_type(pd, "selfish")
    ok4 = True
    for theta in (build_type(pd, "homophilic_selfish", lam=1), build_type(pd, "parochial_selfish")):
        agg = evo_verdict(theta, selfish, pd, "complete", DEFAULT_GRID).aggregate
        ok4 &= agg == "theta_ES_against_tau"
        lines.append(f"  Prop 4 ({theta.family_tag} vs selfish, PD): {agg} -> {'PASS' if agg == 'theta_ES_against_tau' else 'FAIL'}")
    lt, stable, families = _prop7_records()
    ok7 = not lt
    lines.append(f"  Prop 7 (parochial efficient, {families} candidate families, {stable} stable profiles): "
                 f"{len(lt)} dominated -> {'PASS' if ok7 else 'FAIL'}")
    ok = ok1 and ok4 and ok7
    with capsys.disabled():
        report(10, ok, time.perf_counter() - t0, "proposition spot-suite")
        print("\n".join(lines))
    assert ok7, lt[:5]
    assert ok1 and ok4, "\n".join(lines)
