"""Scenario files, JSON reports and the command-line interface.

Scenario grammar (line oriented, ``#`` starts a comment)::

    [game]
    labels A B
    payoff 0 1 ; 3 0          # rows separated by ';'
    allow_nonpositive yes

    [type theta]
    family homophilic_efficient
    lambda 1

    [type tau]
    family adversary
    recipe ex4_coordination_seeker

    [state]                   # repeatable; referenced by position from 0
    epsilon 1/4
    theta theta               # names of the incumbent and mutant types
    tau tau
    info 149/199 25/199 25/199   # optional: p_theta p_tau p_u

    [profile main]
    state 0
    mu theta theta 1
    play theta theta A B      # pure strategies by label
    play u tau [1 0] [0 1]    # or weight vectors
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Sequence

from .equilibria import DEFAULT_SUPPORT_CAP, enumerate_nash
from .evolution import DEFAULT_GRID, StabilityReport, evo_verdict
from .exact import fmt, fmt_short, parse_rational
from .game_core import GameError, MaterialGame, MixedStrategy, StrategyPair
from .matching_complete import (
    CLASSES,
    BlockingWitness,
    MatchingConfiguration,
    MatchingProfileC,
    PopulationState,
    StrategyProfileC,
    average_fitness,
    construct_stable,
    enumerate_stable,
    is_nash_stable,
    typed_game,
)
from .matching_incomplete import (
    CASES,
    LABELS,
    InfoStructure,
    MatchingConfigurationI,
    MatchingProfileI,
    StrategyProfileI,
    average_fitness_ii,
    is_bayes_nash_stable,
)
from .preferences import FAMILIES, PreferenceType, build_adversary_type, build_type

SCHEMA_VERSION = "1"
COMMANDS = ("solve-ne", "stable-check", "stable-enum", "bn-check", "fitness", "verdict", "construct", "replicate")


class ScenarioError(GameError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message, self.line, self.column = message, line, column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(where + message)


# ---------------------------------------------------------------------------
# scenario model

@dataclass(frozen=True)
class TypeSpec:
    name: str
    family: str
    lam: Fraction | None = None
    recipe: str | None = None
    params: tuple[tuple[str, str], ...] = ()
    same: tuple[tuple[Fraction, ...], ...] | None = None
    cross: tuple[tuple[Fraction, ...], ...] | None = None

    def build(self, game: MaterialGame) -> PreferenceType:
        if self.family == "adversary":
            if self.recipe is None:
                raise GameError("adversary types need a recipe")
            params = {k: _param_value(v) for k, v in self.params}
            return build_adversary_type(game, self.recipe, params, name=self.name)
        return build_type(game, self.family, lam=self.lam, same=self.same, cross=self.cross, name=self.name)


def _param_value(text: str):
    try:
        return parse_rational(text)
    except ValueError:
        return text


@dataclass(frozen=True)
class StateSpec:
    epsilon: Fraction
    theta: str
    tau: str
    info: tuple[Fraction, Fraction, Fraction] | None = None


@dataclass(frozen=True)
class ProfileSpec:
    name: str
    state: int
    mu: tuple[tuple[tuple[str, str], Fraction], ...]
    plays: tuple[tuple[tuple[str, str], tuple[tuple[Fraction, ...], tuple[Fraction, ...]]], ...]


@dataclass(frozen=True)
class Scenario:
    game: MaterialGame
    types: tuple[TypeSpec, ...]
    states: tuple[StateSpec, ...]
    profiles: tuple[ProfileSpec, ...] = ()

    def ptype(self, name: str) -> PreferenceType:
        for t in self.types:
            if t.name == name:
                return t.build(self.game)
        raise GameError(f"unknown type {name!r}")

    def population(self, index: int = 0) -> PopulationState:
        s = self.states[index]
        return PopulationState(self.ptype(s.theta), self.ptype(s.tau), s.epsilon)

    def info(self, index: int = 0) -> InfoStructure | None:
        s = self.states[index]
        return None if s.info is None else InfoStructure(*s.info, s.epsilon)

    def profile(self, name: str) -> MatchingProfileC | MatchingProfileI:
        spec = next((p for p in self.profiles if p.name == name), None)
        if spec is None:
            raise GameError(f"unknown profile {name!r}")
        state = self.population(spec.state)
        info = self.info(spec.state)
        plays = {cls: StrategyPair(MixedStrategy(x), MixedStrategy(y)) for cls, (x, y) in spec.plays}
        if info is None:
            return MatchingProfileC(state, MatchingConfiguration(dict(spec.mu)), StrategyProfileC(plays))
        return MatchingProfileI(state, info, MatchingConfigurationI(dict(spec.mu)), StrategyProfileI(plays))


# ---------------------------------------------------------------------------
# parsing

@dataclass
class _Line:
    number: int
    words: list[tuple[str, int]]

    @property
    def key(self) -> str:
        return self.words[0][0]

    def values(self) -> list[str]:
        return [w for w, _ in self.words[1:]]

    def error(self, message: str, word: int = 0) -> ScenarioError:
        col = self.words[word][1] if word < len(self.words) else self.words[-1][1]
        return ScenarioError(message, self.number, col)


def _tokenize(raw: str, number: int) -> _Line | None:
    text = raw.split("#", 1)[0]
    words = []
    col = 0
    for part in text.replace("\t", " ").split(" "):
        if part:
            words.append((part, col + 1))
        col += len(part) + 1
    return _Line(number, words) if words else None


def _rational(line: _Line, word: int) -> Fraction:
    try:
        return parse_rational(line.words[word][0])
    except (ValueError, IndexError):
        raise line.error("expected a rational (integer or a/b)", word) from None


def _matrix(line: _Line) -> tuple[tuple[Fraction, ...], ...]:
    rows: list[list[Fraction]] = [[]]
    for k in range(1, len(line.words)):
        if line.words[k][0] == ";":
            rows.append([])
        else:
            rows[-1].append(_rational(line, k))
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise line.error(f"expected a square matrix, got rows of lengths {[len(r) for r in rows]}")
    return tuple(tuple(r) for r in rows)


def _sections(text: str):
    current = None
    for number, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ScenarioError("unterminated section header", number, raw.index("[") + 1)
            head = stripped[1:-1].split()
            if not head:
                raise ScenarioError("empty section header", number, 1)
            current = (head[0], head[1:], number, [])
            yield current
            continue
        line = _tokenize(raw, number)
        if line is None:
            continue
        if current is None:
            raise ScenarioError("content before the first section", number, line.words[0][1])
        current[3].append(line)


def _yes(line: _Line) -> bool:
    vals = line.values()
    if vals not in (["yes"], ["no"], ["true"], ["false"]):
        raise line.error("expected yes or no", 1)
    return vals[0] in ("yes", "true")


def _parse_game(lines: list[_Line], header: int, allow_override: bool) -> MaterialGame:
    labels = payoff = None
    allow = False
    pay_line = None
    for line in lines:
        if line.key == "labels":
            labels = tuple(line.values())
        elif line.key == "payoff":
            payoff, pay_line = _matrix(line), line
        elif line.key == "allow_nonpositive":
            allow = _yes(line)
        else:
            raise line.error(f"unknown key {line.key!r} in [game]")
    if labels is None or payoff is None:
        raise ScenarioError("[game] needs labels and payoff", header, 1)
    if len(payoff) != len(labels):
        raise pay_line.error(f"payoff is {len(payoff)}x{len(payoff)} but there are {len(labels)} labels")
    try:
        return MaterialGame(labels, payoff, allow or allow_override)
    except GameError as e:
        raise pay_line.error(str(e)) from None


def _parse_type(name: str, lines: list[_Line], header: int, game: MaterialGame) -> TypeSpec:
    family = recipe = None
    lam = same = cross = None
    params = []
    for line in lines:
        if line.key == "family":
            family = line.values()[0] if line.values() else None
            if family not in FAMILIES:
                raise line.error(f"unknown family {family!r}", 1)
        elif line.key == "lambda":
            lam = _rational(line, 1)
        elif line.key == "recipe":
            recipe = line.values()[0]
        elif line.key == "param":
            vals = line.values()
            if len(vals) != 2:
                raise line.error("param takes a name and a value")
            params.append((vals[0], vals[1]))
        elif line.key in ("same", "cross"):
            m = _matrix(line)
            if len(m) != game.n:
                raise line.error(f"utility table must be {game.n}x{game.n}")
            if line.key == "same":
                same = m
            else:
                cross = m
        else:
            raise line.error(f"unknown key {line.key!r} in [type]")
    if family is None:
        raise ScenarioError(f"type {name!r} needs a family", header, 1)
    spec = TypeSpec(name, family, lam, recipe, tuple(params), same, cross)
    try:
        spec.build(game)
    except GameError as e:
        raise ScenarioError(str(e), header, 1) from None
    return spec


def _parse_state(lines: list[_Line], header: int, names: set[str]) -> StateSpec:
    eps = None
    roles = {}
    info = None
    for line in lines:
        if line.key == "epsilon":
            eps = _rational(line, 1)
        elif line.key in ("theta", "tau"):
            vals = line.values()
            if len(vals) != 1 or vals[0] not in names:
                raise line.error(f"unknown type name {' '.join(vals)!r}", 1)
            roles[line.key] = vals[0]
        elif line.key == "info":
            if len(line.words) != 4:
                raise line.error("info takes p_theta p_tau p_u")
            info = tuple(_rational(line, k) for k in (1, 2, 3))
        else:
            raise line.error(f"unknown key {line.key!r} in [state]")
    if eps is None or set(roles) != {"theta", "tau"}:
        raise ScenarioError("[state] needs epsilon, theta and tau", header, 1)
    spec = StateSpec(eps, roles["theta"], roles["tau"], info)
    try:
        if info is not None:
            InfoStructure(*info, eps)
        elif not 0 < eps < 1:
            raise GameError("epsilon must lie strictly between 0 and 1")
    except GameError as e:
        raise ScenarioError(str(e), header, 1) from None
    return spec


def _strategy(line: _Line, pos: int, game: MaterialGame) -> tuple[tuple[Fraction, ...], int]:
    word = line.words[pos][0]
    if not word.startswith("["):
        try:
            return MixedStrategy.pure(game.n, game.index(word)).weights, pos + 1
        except GameError:
            raise line.error(f"unknown strategy label {word!r}", pos) from None
    tokens = []
    k = pos
    while True:
        if k >= len(line.words):
            raise line.error("unterminated weight vector", pos)
        tokens.append(line.words[k][0])
        if line.words[k][0].endswith("]"):
            break
        k += 1
    body = " ".join(tokens)[1:-1].split()
    try:
        weights = MixedStrategy(tuple(parse_rational(t) for t in body))
    except (ValueError, GameError) as e:
        raise line.error(f"bad weight vector: {e}", pos) from None
    if len(weights) != game.n:
        raise line.error(f"weight vector needs {game.n} entries", pos)
    return weights.weights, k + 1


def _parse_profile(name: str, lines: list[_Line], header: int, game: MaterialGame, n_states: int) -> ProfileSpec:
    state = 0
    mu: dict = {}
    plays: dict = {}
    for line in lines:
        if line.key == "state":
            state = int(_rational(line, 1))
            if not 0 <= state < n_states:
                raise line.error(f"no state number {state}", 1)
        elif line.key in ("mu", "play"):
            if len(line.words) < 4:
                raise line.error(f"{line.key} needs two labels and a value")
            a, b = line.words[1][0], line.words[2][0]
            for k, lab in ((1, a), (2, b)):
                if lab not in LABELS:
                    raise line.error(f"label must be theta, tau or u, got {lab!r}", k)
            if line.key == "mu":
                mu[(a, b)] = _rational(line, 3)
            else:
                x, nxt = _strategy(line, 3, game)
                if nxt >= len(line.words):
                    raise line.error("play needs two strategies", nxt - 1)
                y, end = _strategy(line, nxt, game)
                if end != len(line.words):
                    raise line.error("unexpected text after the strategies", end)
                plays[(a, b)] = (x, y)
        else:
            raise line.error(f"unknown key {line.key!r} in [profile]")
    return ProfileSpec(name, state, tuple(sorted(mu.items())), tuple(sorted(plays.items())))


def parse_scenario(text: str, allow_nonpositive: bool = False) -> Scenario:
    sections = list(_sections(text))
    games = [s for s in sections if s[0] == "game"]
    if len(games) != 1:
        raise ScenarioError("exactly one [game] section is required", games[1][2] if len(games) > 1 else 1, 1)
    for kind, args, number, _ in sections:
        if kind not in ("game", "type", "state", "profile"):
            raise ScenarioError(f"unknown section [{kind}]", number, 2)
        if kind in ("type", "profile") and len(args) != 1:
            raise ScenarioError(f"[{kind}] needs exactly one name", number, 2)
    _, _, gnum, glines = games[0]
    game = _parse_game(glines, gnum, allow_nonpositive)
    types = []
    for kind, args, number, lines in sections:
        if kind == "type":
            if any(t.name == args[0] for t in types):
                raise ScenarioError(f"duplicate type {args[0]!r}", number, 2)
            types.append(_parse_type(args[0], lines, number, game))
    names = {t.name for t in types}
    states = [_parse_state(lines, number, names) for kind, _, number, lines in sections if kind == "state"]
    profiles = []
    for kind, args, number, lines in sections:
        if kind == "profile":
            if any(p.name == args[0] for p in profiles):
                raise ScenarioError(f"duplicate profile {args[0]!r}", number, 2)
            profiles.append(_parse_profile(args[0], lines, number, game, len(states)))
    sc = Scenario(game, tuple(types), tuple(states), tuple(profiles))
    for (kind, args, number, _) in sections:
        if kind == "profile":
            try:
                sc.profile(args[0])
            except GameError as e:
                raise ScenarioError(str(e), number, 1) from None
    return sc


# ---------------------------------------------------------------------------
# serialization

def _row_text(m) -> str:
    return " ; ".join(" ".join(fmt_short(v) for v in row) for row in m)


def _vector_text(w: Sequence[Fraction], game: MaterialGame) -> str:
    w = MixedStrategy(w)
    if w.is_pure:
        return game.strategy_labels[w.pure_index()]
    return "[" + " ".join(fmt_short(v) for v in w.weights) + "]"


def serialize_scenario(sc: Scenario) -> str:
    g = sc.game
    out = ["[game]", "labels " + " ".join(g.strategy_labels), "payoff " + _row_text(g.payoff)]
    if g.allow_nonpositive:
        out.append("allow_nonpositive yes")
    for t in sc.types:
        out += ["", f"[type {t.name}]", f"family {t.family}"]
        if t.lam is not None:
            out.append(f"lambda {fmt_short(t.lam)}")
        if t.recipe is not None:
            out.append(f"recipe {t.recipe}")
        out += [f"param {k} {v}" for k, v in t.params]
        if t.same is not None:
            out.append("same " + _row_text(t.same))
        if t.cross is not None:
            out.append("cross " + _row_text(t.cross))
    for s in sc.states:
        out += ["", "[state]", f"epsilon {fmt_short(s.epsilon)}", f"theta {s.theta}", f"tau {s.tau}"]
        if s.info is not None:
            out.append("info " + " ".join(fmt_short(v) for v in s.info))
    for p in sc.profiles:
        out += ["", f"[profile {p.name}]", f"state {p.state}"]
        out += [f"mu {a} {b} {fmt_short(v)}" for (a, b), v in p.mu]
        out += [f"play {a} {b} {_vector_text(x, g)} {_vector_text(y, g)}" for (a, b), (x, y) in p.plays]
    return "\n".join(out) + "\n"


def shipped_scenarios() -> list[str]:
    root = resources.files("prefmatch") / "scenarios"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".scn"))


def load_scenario(path: str, allow_nonpositive: bool = False) -> Scenario:
    """Read a scenario file; a bare name like ``ex1`` selects a shipped scenario."""
    p = Path(path)
    if p.exists():
        text = p.read_text(encoding="utf-8")
    elif path in shipped_scenarios():
        text = (resources.files("prefmatch") / "scenarios" / f"{path}.scn").read_text(encoding="utf-8")
    else:
        raise ScenarioError(f"no such scenario file or shipped scenario: {path}")
    return parse_scenario(text, allow_nonpositive)


# ---------------------------------------------------------------------------
# report encoding

def enc_pair(pair: StrategyPair, game: MaterialGame) -> dict:
    return {
        "label": pair.label(game.strategy_labels),
        "first": [fmt(v) for v in pair.first.weights],
        "second": [fmt(v) for v in pair.second.weights],
    }


def enc_witness(w: BlockingWitness | None, game: MaterialGame) -> dict | None:
    if w is None:
        return None
    out: dict[str, Any] = {
        "case": w.case_tag,
        "participants": [
            {"label": p.label, "class": list(p.origin), "side": p.side, "status_quo": {t: fmt(v) for t, v in p.status_quo}}
            for p in w.participants
        ],
        "agreed_pair": enc_pair(w.agreed_pair, game) if w.agreed_pair is not None else None,
        "utilities": [_enc_utility(u) for u in w.utilities],
        "count": w.count,
    }
    if w.hidden is not None:
        out["hidden_types"] = list(w.hidden)
    if w.plans is not None:
        out["plans"] = [
            {"members": list(plan.members), "strategies": {t: [fmt(v) for v in s.weights] for t, s in plan.plan}}
            for plan in w.plans
        ]
    return out


def _enc_utility(u):
    if isinstance(u, tuple):
        return {t: fmt(v) for t, v in u}
    return fmt(u)


def enc_report(rep: StabilityReport) -> dict:
    return {
        "mode": rep.mode,
        "aggregate": rep.aggregate,
        "reverse_aggregate": rep.reverse_aggregate,
        "coverage": rep.coverage,
        "records": [
            {
                "epsilon": fmt(r.epsilon),
                "profile": r.profile_id,
                "mu_theta_tau": fmt(r.mu_theta_tau) if r.mu_theta_tau is not None else None,
                "attained": r.attained,
                "G_theta": fmt(r.g_theta),
                "G_tau": fmt(r.g_tau),
                "comparison": r.comparison,
            }
            for r in rep.records
        ],
        "warnings": list(rep.warnings),
    }


def _enc_value(v):
    if isinstance(v, Fraction):
        return fmt(v)
    if isinstance(v, (tuple, list)):
        return [_enc_value(x) for x in v]
    if isinstance(v, (set, frozenset)):
        return sorted(_enc_value(x) for x in v)
    if isinstance(v, dict):
        return {str(k): _enc_value(x) for k, x in v.items()}
    return v


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, ensure_ascii=False) + "\n"


def render_text(report: Any, indent: int = 0) -> str:
    pad = "  " * indent
    lines = []
    if isinstance(report, dict):
        for k, v in report.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar(v)}")
    elif isinstance(report, list):
        for item in report:
            if isinstance(item, (dict, list)):
                lines.append(f"{pad}-")
                lines.append(render_text(item, indent + 1))
            else:
                lines.append(f"{pad}- {_scalar(item)}")
    else:
        lines.append(pad + _scalar(report))
    return "\n".join(lines)


def _scalar(v) -> str:
    if v is None:
        return "-"
    if v == [] or v == {}:
        return "(none)"
    if isinstance(v, bool):
        return "yes" if v else "no"
    return str(v)


# ---------------------------------------------------------------------------
# commands

@dataclass
class Options:
    epsilon_grid: tuple[Fraction, ...] | None = None
    support_cap: int = DEFAULT_SUPPORT_CAP
    case_order: tuple[str, ...] = CASES
    profile: str | None = None
    mode: str = "complete"
    timing: bool = False


def _state_echo(sc: Scenario, k: int) -> dict:
    s = sc.states[k]
    out = {"epsilon": fmt(s.epsilon), "theta": s.theta, "tau": s.tau}
    if s.info is not None:
        info = sc.info(k)
        out["info"] = {"p_theta": fmt(info.p_theta), "p_tau": fmt(info.p_tau), "p_u": fmt(info.p_u)}
        if info.q is not None:
            out["info"]["q_utheta"] = fmt(info.q.q_utheta)
    return out


def _profiles(sc: Scenario, opts: Options, kind) -> list[str]:
    names = [p.name for p in sc.profiles] if opts.profile is None else [opts.profile]
    out = [n for n in names if isinstance(sc.profile(n), kind)]
    if not out:
        raise GameError(f"the scenario has no {'complete' if kind is MatchingProfileC else 'incomplete'}-information profile to check")
    return out


def _cmd_solve_ne(sc: Scenario, opts: Options) -> dict:
    results = []
    for k in range(len(sc.states)):
        state = sc.population(k)
        for a, b in CLASSES:
            eqs = enumerate_nash(typed_game(state, a, b), opts.support_cap)
            results.append({
                "state": k,
                "class": [a, b],
                "count": len(eqs.equilibria),
                "degenerate": eqs.degenerate,
                "equilibria": [dict(enc_pair(p, sc.game), values=[fmt(v) for v in vals]) for p, vals in zip(eqs.equilibria, eqs.values)],
            })
    return {"results": results}


def _cmd_stable_check(sc: Scenario, opts: Options) -> dict:
    results = []
    for name in _profiles(sc, opts, MatchingProfileC):
        mp = sc.profile(name)
        v = is_nash_stable(mp, opts.support_cap)
        item = {"profile": name, "stable": v.stable, "reason": v.reason}
        if v.internal is not None:
            iv = v.internal
            item["internal_violation"] = {"class": list(iv.cls), "side": iv.side, "better_response": sc.game.strategy_labels[iv.better_response],
                                          "current": fmt(iv.current), "improved": fmt(iv.improved)}
        item["witness"] = enc_witness(v.witness, sc.game)
        results.append(item)
    return {"results": results}


def _grid(sc: Scenario, opts: Options) -> list[Fraction]:
    if opts.epsilon_grid is not None:
        return list(opts.epsilon_grid)
    return [s.epsilon for s in sc.states]


def _cmd_stable_enum(sc: Scenario, opts: Options) -> dict:
    results = []
    base = sc.states[0]
    theta, tau = sc.ptype(base.theta), sc.ptype(base.tau)
    for eps in _grid(sc, opts):
        classes = enumerate_stable(PopulationState(theta, tau, eps), sc.game, opts.support_cap)
        results.append({
            "epsilon": fmt(eps),
            "classes": [
                {
                    "pattern": [list(c) for c in cls.pattern],
                    "entries": [{"class": list(k), "pair": enc_pair(p, sc.game)} for k, p in cls.profile.entries],
                    "mu_theta_tau": {"low": fmt(cls.mu.low), "high": fmt(cls.mu.high),
                                     "low_attained": cls.mu.low_attained, "high_attained": cls.mu.high_attained},
                    "fitness": [{"mu_theta_tau": fmt(m), "attained": at, "G_theta": fmt(g1), "G_tau": fmt(g2)} for m, at, g1, g2 in cls.fitness],
                    "degenerate": cls.degenerate,
                }
                for cls in classes
            ],
        })
    return {"results": results}


def _cmd_bn_check(sc: Scenario, opts: Options) -> dict:
    results = []
    for name in _profiles(sc, opts, MatchingProfileI):
        mp = sc.profile(name)
        v = is_bayes_nash_stable(mp, cases=opts.case_order, support_cap=opts.support_cap)
        item = {"profile": name, "stable": v.stable, "reason": v.reason, "cases_searched": list(opts.case_order)}
        if v.internal is not None:
            iv = v.internal
            item["internal_violation"] = {"class": list(iv.cls), "side": iv.side, "better_response": sc.game.strategy_labels[iv.better_response],
                                          "current": fmt(iv.current), "improved": fmt(iv.improved)}
        item["witness"] = enc_witness(v.witness, sc.game)
        results.append(item)
    return {"results": results}


def _cmd_fitness(sc: Scenario, opts: Options) -> dict:
    results = []
    names = [p.name for p in sc.profiles] if opts.profile is None else [opts.profile]
    if not names:
        raise GameError("the scenario has no profiles")
    for name in names:
        mp = sc.profile(name)
        g = average_fitness(mp, sc.game) if isinstance(mp, MatchingProfileC) else average_fitness_ii(mp, sc.game)
        results.append({"profile": name, "G_theta": fmt(g[0]), "G_tau": fmt(g[1])})
    return {"results": results}


def _cmd_verdict(sc: Scenario, opts: Options) -> dict:
    base = sc.states[0]
    theta, tau = sc.ptype(base.theta), sc.ptype(base.tau)
    if opts.mode == "incomplete":
        cands = [sc.profile(p.name) for p in sc.profiles]
        cands = [c for c in cands if isinstance(c, MatchingProfileI)]
        rep = evo_verdict(theta, tau, sc.game, "incomplete", [], cands, opts.support_cap)
    else:
        grid = opts.epsilon_grid if opts.epsilon_grid is not None else DEFAULT_GRID
        rep = evo_verdict(theta, tau, sc.game, "complete", grid, None, opts.support_cap)
    return {"results": [enc_report(rep)], "warnings": list(rep.warnings)}


def _cmd_construct(sc: Scenario, opts: Options) -> dict:
    results = []
    for k in range(len(sc.states)):
        c = construct_stable(sc.population(k), opts.support_cap)
        mp = c.profile
        results.append({
            "state": k,
            "case": c.case,
            "swapped": c.swapped,
            "degenerate": c.degenerate,
            "mu": {f"{a},{b}": fmt(v) for (a, b), v in mp.config.mu},
            "entries": [{"class": list(key), "pair": enc_pair(p, sc.game)} for key, p in mp.profile.entries],
            "stable": is_nash_stable(mp, opts.support_cap).stable,
        })
    return {"results": results}


DISPATCH = {
    "solve-ne": _cmd_solve_ne,
    "stable-check": _cmd_stable_check,
    "stable-enum": _cmd_stable_enum,
    "bn-check": _cmd_bn_check,
    "fitness": _cmd_fitness,
    "verdict": _cmd_verdict,
    "construct": _cmd_construct,
}


def run(command: str, scenario: Scenario | None = None, opts: Options | None = None, case_id: str | None = None) -> tuple[dict, int]:
    """Execute one command; returns the report and the exit code."""
    opts = opts or Options()
    t0 = time.perf_counter()
    report: dict[str, Any] = {"schema_version": SCHEMA_VERSION, "command": command}
    code = 0
    if command == "replicate":
        from .cases import replicate

        rep = replicate(case_id)
        report["inputs"] = {"case": case_id}
        report["checks"] = [
            {"quantity": c.name, "expected": _enc_value(c.expected), "computed": _enc_value(c.computed), "ok": c.ok}
            for c in rep.checks
        ]
        report["passed"] = rep.passed
        if rep.report is not None:
            report["report"] = enc_report(rep.report)
        code = 0 if rep.passed else 1
    elif command in DISPATCH:
        if scenario is None:
            raise GameError(f"{command} needs a scenario")
        report["inputs"] = {
            "game": {"labels": list(scenario.game.strategy_labels), "payoff": [[fmt(v) for v in row] for row in scenario.game.payoff]},
            "states": [_state_echo(scenario, k) for k in range(len(scenario.states))],
        }
        report.update(DISPATCH[command](scenario, opts))
    else:
        raise GameError(f"unknown command {command!r}")
    report.setdefault("warnings", [])
    if opts.timing:
        report["timing"] = {"seconds": round(time.perf_counter() - t0, 3)}
    return report, code


# ---------------------------------------------------------------------------
# argument handling

def _grid_arg(text: str) -> tuple[Fraction, ...]:
    try:
        return tuple(parse_rational(t) for t in text.split(","))
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from None


def _cases_arg(text: str) -> tuple[str, ...]:
    cases = tuple(t.strip() for t in text.split(","))
    bad = [c for c in cases if c not in CASES]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown blocking cases {bad}; choose from {', '.join(CASES)}")
    return cases


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="prefmatch", allow_abbrev=False, description="Preference evolution under stable matching: exact checks and verdicts.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("target", help="scenario file or shipped scenario name; a case id for replicate")
    p.add_argument("--epsilon-grid", type=_grid_arg, help="comma separated rationals, e.g. 1/4,1/2,3/4")
    p.add_argument("--support-cap", type=int, default=DEFAULT_SUPPORT_CAP)
    p.add_argument("--allow-nonpositive", action="store_true", help="accept zero or negative material payoffs")
    p.add_argument("--case-order", type=_cases_arg, default=CASES, help="blocking cases to search, in order")
    p.add_argument("--profile", help="restrict to one named profile")
    p.add_argument("--mode", choices=("complete", "incomplete"), default="complete")
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--timing", action="store_true", help="include wall-clock time (breaks byte-identical output)")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    opts = Options(args.epsilon_grid, args.support_cap, args.case_order, args.profile, args.mode, args.timing)
    try:
        if args.command == "replicate":
            report, code = run("replicate", None, opts, case_id=args.target)
        else:
            sc = load_scenario(args.target, args.allow_nonpositive)
            report, code = run(args.command, sc, opts)
    except (GameError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    sys.stdout.write(dumps(report) if args.format == "json" else render_text(report) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
