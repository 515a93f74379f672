"""Acceptance criteria AC1 to AC10.

Each test is tagged with its criterion; ``conftest.py`` prints one PASS/FAIL
line per criterion after the run. Two criteria contain claims that do not
hold and are marked as strict expected failures, so the suite stays green
while the summary reports them as FAIL.
"""

import random
import time

import pytest

from cogmodal.checker import Checker, valid_on
from cogmodal.dynamics import radical_revise, reduce
from cogmodal.fixtures import CROSSROAD, m1, mcross, mcross_g
from cogmodal.games import best_response, enumerate_equilibria
from cogmodal.genfuzz import (
    DLCA_SCHEMAS, DLCAG_SCHEMAS, WF_SCHEMAS, FormulaGen, GenSpec, derive_seed,
    fuzz_validities, gen_model,
)
from cogmodal.syntax import ATTITUDE_KINDS, DynBox, _children, has_dynamic, parse_formula

from .conftest import ROOT

SEED = 2024
MODELS = 500


def fuzz(suite, n=MODELS, **spec):
    return fuzz_validities(suite, n, GenSpec(seed=SEED, **spec), max_failures=10**6)


def summary(rep):
    return f"{rep.models} models, {rep.checks} checks, {rep.failure_count} failures, {rep.elapsed:.1f} s"


# -- AC1

@pytest.mark.criterion("AC1")
def test_ac1_dlca_axioms_sound(note):
    t0 = time.perf_counter()
    rep = fuzz("dlca-axioms")
    wall = time.perf_counter() - t0
    note("AC1", summary(rep))
    assert rep.models == MODELS
    for sid in DLCA_SCHEMAS:
        assert rep.by_check[sid] >= 20 * MODELS, sid
    assert rep.by_check["Nec"] >= MODELS
    assert rep.failure_count == 0, rep.failures[:3]
    assert wall <= 60


# -- AC2

@pytest.mark.criterion("AC2")
def test_ac2_game_axioms_sound(note):
    rep = fuzz("dlcag-axioms")
    note("AC2", "game axioms: " + summary(rep))
    assert set(DLCAG_SCHEMAS) <= set(rep.by_check)
    assert rep.failure_count == 0, rep.failures[:3]


@pytest.mark.criterion("AC2")
def test_ac2_well_foundedness_axioms_sound(note):
    rep = fuzz("wf-axioms")
    note("AC2", "CWF/WF: " + summary(rep))
    assert all(rep.by_check[s] >= 20 * MODELS for s in WF_SCHEMAS)
    assert rep.failure_count == 0, rep.failures[:3]


# -- AC3

@pytest.mark.criterion("AC3")
def test_ac3_attitudes_agree_with_encodings(note):
    rep = fuzz("attitude-encodings")
    note("AC3", summary(rep))
    kinds = {label.split("-")[1] for label in rep.by_check}
    assert kinds == set(ATTITUDE_KINDS)
    assert rep.failure_count == 0, rep.failures[:3]


# -- AC4

@pytest.mark.criterion("AC4")
def test_ac4_known_validities(note):
    rep = fuzz("known-validities")
    note("AC4", summary(rep))
    assert {"sb-bridge", "d-monotony", "sd-bridge", "p-total", "rp-total", "d-ppes"} <= set(rep.by_check)
    assert rep.failure_count == 0, rep.failures[:3]


# -- AC5

# Derived by the pair-set reference evaluator in tests/oracle.py. MCROSS has a
# single cell per agent, so every formula has the same value at all worlds.
CROSSROAD_TABLE = {
    "[eq({i})](co -> lo1 & lo2)": (True, True),
    "CB{{{i}}}(!lo1, lo2)": (True, True),
    "CB{{{i}}}(!lo2, lo1)": (True, True),
    "SD{{{i}}}(!lo{i} & !co)": (True, True),
    "D{{{i}}} !lo{i}": (True, True),
    "D{{{i}}} !co": (True, True),
    "D{{{i}}}(lo1 & !lo2)": (True, True),
    "D{{{i}}}(!lo1 & lo2)": (True, True),
    # the outcome where the agent keeps her time is strongly desired
    "SD{{{i}}}(lo1 & !lo2)": (False, True),
    "SD{{{i}}}(!lo1 & lo2)": (True, False),
}


@pytest.mark.criterion("AC5")
def test_ac5_crossroad_truth_table(note):
    t0 = time.perf_counter()
    m = mcross()
    chk = Checker(m)
    assert valid_on(m, f"({CROSSROAD['phi1']}) & ({CROSSROAD['phi2']}) & ({CROSSROAD['phi3']})")
    for name in ("knows_collision", "cond_beliefs", "strong_desires", "one_sided_desired"):
        assert valid_on(m, CROSSROAD[name]), name
    for template, values in CROSSROAD_TABLE.items():
        for i, expected in zip("12", values):
            mask = chk.truth(parse_formula(template.format(i=i)))
            assert mask == (m.full if expected else 0), template.format(i=i)
    wall = time.perf_counter() - t0
    note("AC5", f"{len(CROSSROAD_TABLE) * 2} table entries in {wall * 1000:.0f} ms")
    assert wall < 1


@pytest.mark.criterion("AC5")
@pytest.mark.xfail(strict=True, reason="phi1 and phi3 force SD_1(!lo1 & lo2) and SD_2(lo1 & !lo2)")
def test_ac5_one_sided_outcomes_not_strongly_desired():
    assert valid_on(mcross(), CROSSROAD["one_sided_not_strong"])


# -- AC6

@pytest.mark.criterion("AC6")
def test_ac6_crossroad_game():
    m = mcross_g()
    assert valid_on(m, f"({CROSSROAD['phi4']}) & ({CROSSROAD['phi5']})")
    for w in m.world_ids:
        for mode in ("opt", "pess"):
            assert best_response(m, w, "1", "S", {"2": "C"}, mode)
            assert best_response(m, w, "1", "C", {"2": "S"}, mode)
            assert best_response(m, w, "2", "S", {"1": "C"}, mode)
            assert best_response(m, w, "2", "C", {"1": "S"}, mode)
            found = {(d["1"], d["2"]) for d in enumerate_equilibria(m, w, mode)}
            assert found == {("S", "C"), ("C", "S")}


@pytest.fixture(scope="module")
def rationality():
    return fuzz("rationality", 300)


@pytest.mark.criterion("AC6")
def test_ac6_optimistic_propositions_clean(rationality, note):
    rep = rationality
    note("AC6", summary(rep))
    opt = [f for f in rep.failures if f["check"].endswith("-opt")]
    assert rep.by_check["rat-lemma-opt"] > 0 and rep.by_check["nash-char-opt"] > 0
    assert opt == []


@pytest.mark.criterion("AC6")
def test_ac6_pessimistic_propositions_clean_with_two_actions(note):
    rep = fuzz("rationality", 300, actions=(1, 2))
    note("AC6", f"at most 2 actions: {rep.failure_count} failures")
    assert rep.failure_count == 0, rep.failures[:3]


@pytest.mark.criterion("AC6")
def test_ac6_pessimistic_failures_need_three_actions(rationality, note):
    pess = [f for f in rationality.failures if f["check"].endswith("-pess")]
    note("AC6", f"pessimistic counterexamples: {len(pess)}")
    for f in pess:
        m = gen_model(GenSpec(seed=f["model_seed"], with_choices=True))
        assert len(m.actions) >= 3


@pytest.mark.criterion("AC6")
@pytest.mark.xfail(strict=True, reason="pessimistic rationality lemma fails with three or more actions")
def test_ac6_pessimistic_propositions_clean(rationality):
    assert [f for f in rationality.failures if f["check"].endswith("-pess")] == []


# -- AC7

@pytest.mark.criterion("AC7")
def test_ac7a_transforms_match_comprehensions(note):
    rep = fuzz("transform-comprehension")
    note("AC7", f"{rep.by_check['comprehension']} transform pairs, {rep.failure_count} mismatches")
    assert rep.by_check["comprehension"] >= 500
    assert rep.failure_count == 0, rep.failures[:3]


@pytest.mark.criterion("AC7")
def test_ac7b_success_and_strengthening(note):
    rep = fuzz("revision-success")
    note("AC7", "success: " + summary(rep))
    assert len(rep.by_check) == 6
    assert rep.failure_count == 0, rep.failures[:3]


@pytest.mark.criterion("AC7")
def test_ac7c_conservative_non_strengthening():
    m = m1()
    f = parse_formula("[conB{1} !p](B{1} !p -> SB{1} !p)")
    falsified = [w for w in m.world_ids if not Checker(m, dynamic=True).holds(w, f)]
    assert falsified == ["w1", "w2", "w3"]


@pytest.mark.criterion("AC7")
def test_ac7d_crossroad_radical_desire():
    after = "SD{1} !lo2 & D{1} !lo2 & D{1} !lo1 & !SD{1} !lo1"
    m = mcross()
    assert not valid_on(m, "SD{1} !lo2")
    assert valid_on(radical_revise(m, "1", "D", "!lo2").model, after)
    # same result through the rewriter, on the unrevised model
    assert valid_on(m, reduce(f"[radD{{1}} !lo2]({after})"))


# -- AC8

def nesting(f) -> int:
    """Longest chain of dynamic operators, counting revision inputs."""
    below = max((nesting(c) for c in _children(f)), default=0)
    return below + isinstance(f, DynBox)


@pytest.mark.criterion("AC8")
def test_ac8_reduction_equivalence(note):
    rep = fuzz("reduction")
    note("AC8", f"{rep.by_check['reduce-equiv']} dynamic formulas, {rep.failure_count} mismatches")
    assert rep.by_check["reduce-equiv"] >= 1000
    assert "reduce-static" not in rep.by_check
    assert rep.failure_count == 0, rep.failures[:3]


@pytest.mark.criterion("AC8")
def test_ac8_reduction_is_static_and_bounded():
    sizes = []
    for k in range(1000):
        m = gen_model(GenSpec(seed=derive_seed("ac8", k)))
        g = FormulaGen.for_model(random.Random(k), m)
        f = g.dynamic_formula(3, 2)
        assert 1 <= nesting(f) <= 2
        r = reduce(f, budget=10**6)
        assert not has_dynamic(r)
        sizes.append(r.size)
    assert max(sizes) <= 10**6


# -- AC9

@pytest.mark.criterion("AC9")
def test_ac9_finite_model_consistency(note):
    rep = fuzz("finite-deviation")
    note("AC9", summary(rep))
    assert set(rep.by_check) == {"b-consistent", "b-not-bot", "d-not-top"}
    assert rep.failure_count == 0, rep.failures[:3]


@pytest.mark.criterion("AC9")
def test_ac9_deviation_documented():
    readme = (ROOT / "README.md").read_text(encoding="utf-8")
    assert "## Finite models" in readme
    assert "B_i⊥" in readme and "D_i⊤" in readme


# -- AC10

@pytest.mark.criterion("AC10")
def test_ac10_negative_control_is_falsified(note):
    rep = fuzz("negative-controls")
    first = min(f["model"] for f in rep.failures)
    note("AC10", f"{rep.failure_count} falsified instances, first in model {first}")
    assert rep.failure_count > 0
    assert first < MODELS
