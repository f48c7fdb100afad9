import json
import subprocess
import sys
from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prefmatch import cases
from prefmatch.cli_io import (
    Options,
    ScenarioError,
    load_scenario,
    main,
    parse_scenario,
    run,
    serialize_scenario,
    shipped_scenarios,
)
from prefmatch.matching_complete import MatchingProfileC
from prefmatch.matching_incomplete import MatchingProfileI


@pytest.mark.parametrize("name", ["ex1", "ex2", "ex3", "ex4", "b2", "b4", "pd"])
def test_shipped_scenarios_parse_and_round_trip(name):
    assert name in shipped_scenarios()
    sc = load_scenario(name)
    text = serialize_scenario(sc)
    assert serialize_scenario(parse_scenario(text)) == text


def test_profiles_follow_state_information():
    b4 = load_scenario("b4")
    mp = b4.profile("figure")
    assert isinstance(mp, MatchingProfileI) and mp.info.q.q_utheta == F(4, 5)
    assert isinstance(load_scenario("ex1").profile("stable"), MatchingProfileC)


def test_errors_carry_line_and_column():
    with pytest.raises(ScenarioError) as e:
        parse_scenario("[game]\nlabels A B\npayoff 1 x ; 1 1\n")
    assert (e.value.line, e.value.column) == (3, 10)
    with pytest.raises(ScenarioError, match="unknown type name"):
        parse_scenario("[game]\nlabels A B\npayoff 1 1 ; 1 1\n[state]\nepsilon 1/4\ntheta nobody\ntau nobody\n")


def test_row_sum_error_is_reported():
    text = serialize_scenario(load_scenario("ex1")).replace("mu theta theta 2/3", "mu theta theta 1/2")
    with pytest.raises(Exception, match="row-sum"):
        parse_scenario(text).profile("cross")


def test_nonpositive_payoffs_need_opt_in():
    text = "[game]\nlabels A B\npayoff 0 1 ; 3 0\n"
    with pytest.raises(Exception, match="positive"):
        parse_scenario(text)
    assert parse_scenario(text, allow_nonpositive=True).game.payoff[1][0] == 3


cell = st.fractions(min_value=0, max_value=5, max_denominator=4)


@given(st.lists(st.lists(cell, min_size=2, max_size=2), min_size=2, max_size=2),
       st.lists(st.lists(cell, min_size=2, max_size=2), min_size=2, max_size=2),
       st.sampled_from(["1/4", "1/2", "2/3"]))
@settings(max_examples=50, deadline=None)
def test_round_trip_property(same, cross, eps):
    def rows(m):
        return " ; ".join(" ".join(str(v) for v in r) for r in m)

    text = (f"[game]\nlabels A B\npayoff 1 2 ; 3 4\n\n[type t]\nfamily custom\nsame {rows(same)}\ncross {rows(cross)}\n\n"
            f"[type s]\nfamily selfish\n\n[state]\nepsilon {eps}\ntheta t\ntau s\n")
    sc = parse_scenario(text)
    out = serialize_scenario(sc)
    again = parse_scenario(out)
    assert serialize_scenario(again) == out
    assert again.ptype("t").table("same") == sc.ptype("t").table("same")


def test_run_replicate_example_three():
    report, code = run("replicate", case_id="ex3")
    assert code == 0 and report["passed"]
    assert {(r["G_theta"], r["G_tau"]) for r in report["report"]["records"]} == {("3/1", "5/1")}


def test_run_stable_check_and_solve_ne():
    sc = load_scenario("ex1")
    report, code = run("stable-check", sc, Options(profile="stable"))
    assert code == 0 and report["results"][0]["stable"]
    report, _ = run("solve-ne", sc)
    theta_theta = next(r for r in report["results"] if r["class"] == ["theta", "theta"])
    assert theta_theta["count"] == 3


def test_replicate_mismatch_exits_one(monkeypatch):
    monkeypatch.setitem(cases.CASES, "broken", lambda r: r.expect("one", 1, 2))
    report, code = run("replicate", case_id="broken")
    assert code == 1 and not report["passed"]


def test_main_exit_codes(capsys):
    assert main(["replicate", "ex1"]) == 0
    assert main(["stable-check", "no_such_scenario"]) == 2
    assert "error" in capsys.readouterr().err
    with pytest.raises(SystemExit) as e:
        main(["replicate", "ex1", "--case", "x"])
    assert e.value.code == 2


def test_output_is_byte_identical():
    cmd = [sys.executable, "-m", "prefmatch.cli_io", "stable-enum", "ex1", "--epsilon-grid", "1/4,1/2"]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert first == second
    assert json.loads(first)["schema_version"] == "1"
