import dataclasses
import json

import pytest
from hypothesis import given, settings

from cogmodal.fixtures import FIXTURES, m0, mcross_g
from cogmodal.genfuzz import rank_relation_roundtrip
from cogmodal.model import (
    AgentState, Model, ModelError, UnknownAgentError, atomic_rel, dumps_model, load_model,
    loads_model, model_to_dict, save_model, validate_model, world,
)
from cogmodal.syntax import Eq, Le, Nle

from .conftest import FIXTURE_DIR
from .strategies import models


def test_m0_plausibility_order():
    assert atomic_rel(m0(), Le("1", "P")) == {("w1", "w1"), ("w2", "w2"), ("w2", "w1")}


def test_m0_strict_complement():
    assert atomic_rel(m0(), Nle("1", "P")) == {("w1", "w2")}


def test_m0_single_cell():
    assert len(atomic_rel(m0(), Eq("1"))) == 4


def test_unknown_agent():
    with pytest.raises(UnknownAgentError):
        atomic_rel(m0(), Eq("9"))


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_fixtures_are_valid(name):
    assert validate_model(FIXTURES[name]()).ok


def test_shared_nominal_violates_c4():
    m = m0()
    w1, w2 = m.worlds
    bad = dataclasses.replace(m, worlds=(w1, dataclasses.replace(w2, nominals=frozenset({"x1", "x2"}))))
    rep = validate_model(bad)
    assert rep.constraints() == {"C4"}
    assert set(rep.violations[0].worlds) == {"w1", "w2"}


def test_missing_choices_violate_totality_and_independence():
    m = mcross_g()
    w4 = m.worlds[3]
    states = tuple((a, dataclasses.replace(s, choice=None)) for a, s in w4.states)
    bad = dataclasses.replace(m, worlds=m.worlds[:3] + (dataclasses.replace(w4, states=states),))
    assert {"choice-totality", "C5"} <= validate_model(bad).constraints()


def test_unplayed_joint_action_violates_c5():
    m = mcross_g()
    rep = validate_model(dataclasses.replace(m, worlds=m.worlds[:3]))
    assert rep.constraints() == {"C5"}


def test_choices_without_actions():
    m = mcross_g()
    assert "choices" in validate_model(dataclasses.replace(m, actions=None)).constraints()


def test_violations_are_data():
    m = Model(("1",), ("p",), (world("a", ["p", "z"], **{"1": AgentState("c", -1, 0)}),))
    assert validate_model(m).constraints() == {"ranks", "atoms"}


# -- JSON

@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_shipped_files_match_builtins(name):
    assert load_model(FIXTURE_DIR / f"{name}.json") == FIXTURES[name]()


def test_save_load_identity(tmp_path):
    path = tmp_path / "m.json"
    save_model(mcross_g(), path)
    assert load_model(path) == mcross_g()
    assert dumps_model(load_model(path)) == dumps_model(mcross_g())


def test_missing_nominals_default_to_world_id():
    doc = model_to_dict(m0())
    for w in doc["worlds"]:
        del w["nominals"]
    m = loads_model(json.dumps(doc))
    assert [w.nominals for w in m.worlds] == [frozenset({"w1"}), frozenset({"w2"})]
    assert validate_model(m).ok
    assert model_to_dict(m)["worlds"][0]["nominals"] == ["@w1"]


@pytest.mark.parametrize("mutate, message", [
    (lambda d: d["worlds"][0]["agents"]["1"].update(rank_p=-1), "natural"),
    (lambda d: d["worlds"][1].update(id="w1"), "duplicate world"),
    (lambda d: d["worlds"][0]["agents"]["1"].pop("cell"), "missing"),
    (lambda d: d.update(version=2), "version"),
    (lambda d: d.update(worlds=[]), "no worlds"),
])
def test_malformed_files(mutate, message):
    doc = model_to_dict(m0())
    mutate(doc)
    with pytest.raises(ModelError, match=message):
        loads_model(json.dumps(doc))


def test_duplicate_json_keys():
    with pytest.raises(ModelError, match="duplicate key"):
        loads_model('{"agents": ["1"], "agents": ["2"], "worlds": []}')


def test_invalid_json():
    with pytest.raises(ModelError):
        loads_model("{")


# -- properties

@settings(max_examples=100)
@given(models())
def test_complement_identity(m):
    for i in m.agents:
        eq = atomic_rel(m, Eq(i))
        for d in "PD":
            le, nle = atomic_rel(m, Le(i, d)), atomic_rel(m, Nle(i, d))
            assert le | nle == eq
            assert not le & nle


@settings(max_examples=100)
@given(models())
def test_orders_are_total_preorders_on_cells(m):
    for i in m.agents:
        eq = atomic_rel(m, Eq(i))
        for d in "PD":
            le = atomic_rel(m, Le(i, d))
            assert le <= eq
            assert all((w, w) in le for w in m.world_ids)
            assert all((u, v) in le or (v, u) in le for (u, v) in eq)
            assert all((u, x) in le for (u, v) in le for (y, x) in le if v == y)


@settings(max_examples=100)
@given(models(choices=True))
def test_rank_representation_is_lossless(m):
    assert rank_relation_roundtrip(m)


def test_roundtrip_on_fixtures():
    assert all(rank_relation_roundtrip(f()) for f in FIXTURES.values())
