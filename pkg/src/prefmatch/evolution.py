"""Fitness comparisons across stable profiles and evolutionary verdicts."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .equilibria import DEFAULT_SUPPORT_CAP, loser_best_set
from .exact import as_rational
from .game_core import GameError, MaterialGame, efficient_pairs, pair_total
from .matching_complete import PopulationState, StableClass, enumerate_stable
from .matching_incomplete import MatchingProfileI, average_fitness_ii, is_bayes_nash_stable
from .preferences import PreferenceType

AGGREGATES = ("theta_ES_against_tau", "tau_ES_against_theta", "neutral_tie", "mixed", "inconclusive")
DEFAULT_GRID = tuple(Fraction(k, 10) for k in range(1, 10))


def compare(g_theta: Fraction, g_tau: Fraction) -> str:
    if g_theta > g_tau:
        return "gt"
    if g_theta < g_tau:
        return "lt"
    return "eq"


@dataclass(frozen=True)
class VerdictRecord:
    """Fitness of both types in one stable profile.

    ``attained`` is false for the closure endpoint of an open mu-interval:
    the profile class exists arbitrarily close to that point but not at it.
    """

    mode: str
    epsilon: Fraction
    profile_id: str
    g_theta: Fraction
    g_tau: Fraction
    comparison: str
    mu_theta_tau: Fraction | None = None
    attained: bool = True

    def __post_init__(self):
        if self.comparison != compare(self.g_theta, self.g_tau):
            raise GameError("comparison does not match the fitness values")


def realized_signs(records: Sequence[VerdictRecord]) -> set[str]:
    """Comparisons realized by one profile class.

    Attained points count as they are.  For an open interval, fitness is
    affine in mu, so the interior takes every nonzero sign of its closure
    endpoints (and passes through equality when those signs differ); with
    both endpoints equal it is equal throughout.
    """
    attained = [r for r in records if r.attained]
    if attained:
        return {r.comparison for r in attained}
    signs = {r.comparison for r in records if r.comparison != "eq"}
    if not signs:
        return {"eq"}
    if signs == {"gt", "lt"}:
        signs.add("eq")
    return signs


def aggregate(records: Iterable[VerdictRecord]) -> str:
    groups: dict[tuple, list[VerdictRecord]] = {}
    for r in records:
        groups.setdefault((r.mode, r.epsilon, r.profile_id), []).append(r)
    if not groups:
        return "inconclusive"
    signs: set[str] = set()
    for recs in groups.values():
        signs |= realized_signs(recs)
    if signs == {"eq"}:
        return "neutral_tie"
    if "lt" not in signs:
        return "theta_ES_against_tau"
    if "gt" not in signs:
        return "tau_ES_against_theta"
    return "mixed"


@dataclass(frozen=True)
class StabilityReport:
    mode: str
    records: tuple[VerdictRecord, ...]
    aggregate: str
    warnings: tuple[str, ...] = ()
    coverage: str = ""
    reverse_aggregate: str | None = None

    @property
    def direction(self) -> str | None:
        """Which type (if either) is evolutionarily stable against the other."""
        if self.aggregate == "theta_ES_against_tau":
            return "theta"
        if self.aggregate == "tau_ES_against_theta":
            return "tau"
        return None


def same_type_inefficiency(ptype: PreferenceType, game: MaterialGame, support_cap: int = DEFAULT_SUPPORT_CAP) -> bool:
    """True when some loser-best equilibrium of the self-game loses total payoff."""
    best, _ = efficient_pairs(game)
    lb = loser_best_set(ptype, support_cap=support_cap)
    return any(pair_total(game, p) < best for p in lb.pairs)


def class_id(cls: StableClass, labels: Sequence[str]) -> str:
    parts = []
    for (a, b), pair in cls.profile.entries:
        parts.append(f"{a[:2]}{b[:2]}{pair.label(labels)}")
    return " ".join(parts)


def _complete_records(state_theta, state_tau, game, epsilons, support_cap):
    records = []
    warnings = []
    for eps in epsilons:
        state = PopulationState(state_theta, state_tau, eps)
        classes = enumerate_stable(state, game, support_cap)
        if not classes:
            warnings.append(f"no stable class found at epsilon={eps}")
        for cls in classes:
            if cls.degenerate:
                warnings.append(f"degenerate equilibrium component in class {class_id(cls, game.strategy_labels)} at epsilon={eps}")
            pid = class_id(cls, game.strategy_labels)
            for m, attained, g_theta, g_tau in cls.fitness:
                records.append(VerdictRecord("complete", eps, pid, g_theta, g_tau, compare(g_theta, g_tau), m, attained))
    return records, warnings


def compare_over_stable(
    theta: PreferenceType,
    tau: PreferenceType,
    game: MaterialGame,
    mode: str = "complete",
    epsilons: Sequence = DEFAULT_GRID,
    candidates: Sequence[MatchingProfileI] | None = None,
    support_cap: int = DEFAULT_SUPPORT_CAP,
) -> StabilityReport:
    """Fitness records over every stable profile examined, with the verdict.

    Complete mode enumerates stable classes at each epsilon.  Incomplete mode
    checks the supplied candidate profiles and keeps the Bayes-Nash stable
    ones.
    """
    eps_list = [as_rational(e) for e in epsilons]
    if mode == "complete":
        records, warnings = _complete_records(theta, tau, game, eps_list, support_cap)
        coverage = "exact over stable classes at epsilon in {" + ", ".join(str(e) for e in eps_list) + "}"
        return StabilityReport("complete", tuple(records), aggregate(records), tuple(warnings), coverage)
    if mode != "incomplete":
        raise GameError(f"mode must be 'complete' or 'incomplete', got {mode!r}")
    if not candidates:
        raise GameError("incomplete mode needs a nonempty candidate family")
    records = []
    rejected = 0
    for k, mp in enumerate(candidates):
        if mp.state.theta != theta or mp.state.tau != tau:
            raise GameError(f"candidate {k} belongs to a different pair of types")
        if not is_bayes_nash_stable(mp, support_cap=support_cap).stable:
            rejected += 1
            continue
        g_theta, g_tau = average_fitness_ii(mp, game)
        records.append(VerdictRecord("incomplete", mp.state.epsilon, f"candidate {k}", g_theta, g_tau, compare(g_theta, g_tau)))
    warnings = []
    if rejected:
        warnings.append(f"{rejected} of {len(candidates)} candidates are not Bayes-Nash stable")
    coverage = f"over supplied candidates ({len(records)} stable of {len(candidates)})"
    return StabilityReport("incomplete", tuple(records), aggregate(records), tuple(warnings), coverage)


MIRROR = {
    "theta_ES_against_tau": "tau_ES_against_theta",
    "tau_ES_against_theta": "theta_ES_against_tau",
    "neutral_tie": "neutral_tie",
    "mixed": "mixed",
    "inconclusive": "inconclusive",
}


def evo_verdict(
    theta: PreferenceType,
    tau: PreferenceType,
    game: MaterialGame,
    mode: str = "complete",
    epsilons: Sequence = DEFAULT_GRID,
    candidates: Sequence[MatchingProfileI] | None = None,
    support_cap: int = DEFAULT_SUPPORT_CAP,
) -> StabilityReport:
    """Verdict for theta against tau, plus the independently computed reverse.

    In complete mode the reverse comparison re-enumerates with the roles of
    the two types exchanged (epsilon mirrored), so ``reverse_aggregate``
    should equal the mirror of ``aggregate``; a disagreement is reported as a
    warning.  In incomplete mode the reverse is the mirror of the records.
    """
    report = compare_over_stable(theta, tau, game, mode, epsilons, candidates, support_cap)
    warnings = list(report.warnings)
    if mode == "complete":
        mirrored = [1 - as_rational(e) for e in epsilons]
        rev = compare_over_stable(tau, theta, game, mode, mirrored, None, support_cap)
        reverse = rev.aggregate
        if MIRROR[reverse] != report.aggregate:
            warnings.append(f"reverse comparison gave {reverse}, expected the mirror of {report.aggregate}")
    else:
        reverse = MIRROR[report.aggregate]
    return StabilityReport(report.mode, report.records, report.aggregate, tuple(warnings), report.coverage, reverse)
