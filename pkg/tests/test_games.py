import pytest

from cogmodal.checker import valid_on
from cogmodal.fixtures import CROSSROAD, mcross, mcross_g, rat_pess_cex
from cogmodal.games import (
    BudgetExceeded, GameError, best_response, enumerate_equilibria, game_report, joint_actions,
    nash, rational,
)
from cogmodal.model import AgentState, Model, world

WORLDS = ("w1", "w2", "w3", "w4")
CS, SC = {"1": "C", "2": "S"}, {"1": "S", "2": "C"}


def single_action_game(agents=("1",)):
    return Model(agents, (), (world("u", **{a: AgentState("c", 0, 0, "go") for a in agents}),), ("go",))


@pytest.mark.parametrize("w", WORLDS)
@pytest.mark.parametrize("mode", ["opt", "pess"])
def test_crossroad_best_responses(w, mode):
    m = mcross_g()
    assert best_response(m, w, "1", "S", {"2": "C"}, mode)
    assert best_response(m, w, "1", "C", {"2": "S"}, mode)
    assert best_response(m, w, "2", "S", {"1": "C"}, mode)
    assert best_response(m, w, "2", "C", {"1": "S"}, mode)


@pytest.mark.parametrize("w", WORLDS)
def test_continuing_into_a_crossing_car_is_not_best(w):
    assert not best_response(mcross_g(), w, "1", "C", {"2": "C"}, "opt")


@pytest.mark.parametrize("w", WORLDS)
@pytest.mark.parametrize("mode", ["opt", "pess"])
def test_crossroad_equilibria(w, mode):
    m = mcross_g()
    assert enumerate_equilibria(m, w, mode) == [CS, SC]
    assert nash(m, w, SC, mode) and nash(m, w, CS, mode)
    assert not nash(m, w, {"1": "C", "2": "C"}, mode)


def test_crossroad_rationality():
    m = mcross_g()
    assert rational(m, "w3", "1", "opt")
    assert not rational(m, "w2", "1", "opt")
    assert [rational(m, w, "1", "opt") for w in WORLDS] == [True, False, True, False]


def test_crossroad_game_hypotheses():
    m = mcross_g()
    assert valid_on(m, CROSSROAD["phi4"])
    assert valid_on(m, CROSSROAD["phi5"])


def test_single_action_games():
    m = single_action_game()
    assert best_response(m, "u", "1", "go", {}, "opt")
    assert nash(m, "u", {"1": "go"}, "pess")
    assert rational(m, "u", "1", "opt")
    # nothing else is ever played, so no pessimistic witness exists
    assert not rational(m, "u", "1", "pess")
    assert enumerate_equilibria(m, "u", "opt") == [{"1": "go"}]
    two = single_action_game(("1", "2"))
    assert enumerate_equilibria(two, "u", "pess") == [{"1": "go", "2": "go"}]


def test_pessimistic_rationality_gap():
    # rational at w2, yet a1 is pessimistically worse than a2
    m = rat_pess_cex()
    assert rational(m, "w2", "1", "pess")
    assert not best_response(m, "w2", "1", "a1", {}, "pess")
    assert not nash(m, "w2", {"1": "a1"}, "pess")
    assert best_response(m, "w2", "1", "a2", {}, "opt")
    assert not rational(m, "w2", "1", "opt")


def test_errors():
    m = mcross_g()
    with pytest.raises(GameError):
        best_response(m, "w1", "1", "X", {"2": "C"}, "opt")
    with pytest.raises(GameError):
        best_response(m, "w1", "1", "C", {}, "opt")
    with pytest.raises(GameError):
        nash(m, "w1", {"1": "C"}, "opt")
    with pytest.raises(GameError):
        rational(m, "w1", "1", "bayes")
    with pytest.raises(KeyError):
        rational(m, "w9", "1", "opt")
    with pytest.raises(GameError):
        enumerate_equilibria(mcross(), "w1", "opt")


def test_budget(monkeypatch):
    m = mcross_g()
    assert len(list(joint_actions(m, limit=4))) == 4
    with pytest.raises(BudgetExceeded):
        list(joint_actions(m, limit=3))
    monkeypatch.setenv("COGMODAL_BUDGET", "3")
    with pytest.raises(BudgetExceeded):
        enumerate_equilibria(m, "w1", "opt")
    monkeypatch.setenv("COGMODAL_BUDGET", "15")
    with pytest.raises(BudgetExceeded):
        game_report(m)
    assert game_report(m, ["w1", "w2", "w3"])


def test_report():
    rep = game_report(mcross_g())
    assert len(rep.groups) == 1 and rep.groups[0]["worlds"] == list(WORLDS)
    for w in WORLDS:
        assert rep.equilibria(w, "opt") == rep.equilibria(w, "pess") == [CS, SC]
    assert rep.rationality["w2"]["1"]["opt"] is False
    doc = rep.to_dict()
    assert doc["version"] == 1
    # 2 agents x 2 contexts x 2 actions
    assert len(doc["groups"][0]["best_responses"]) == 8
    text = rep.table()
    assert "NE^opt: (C,S) (S,C)" in text and "Rat_1^opt" in text
