"""Named models shipped with the package (also stored as JSON under ``fixtures/``)."""

from __future__ import annotations

from .model import AgentState, Model, WorldRecord


def _w(wid, atoms, nominal=None, **agents):
    return WorldRecord(wid, frozenset([nominal or wid]), frozenset(atoms), tuple(sorted(agents.items())))


def m0() -> Model:
    """One agent, one cell: w1 {p} is more plausible, w2 {} more desirable."""
    return Model(("1",), ("p",), (
        _w("w1", {"p"}, "x1", **{"1": AgentState("c", 1, 0)}),
        _w("w2", set(), "x2", **{"1": AgentState("c", 0, 1)}),
    ))


def m1() -> Model:
    """Three-world plausibility chain w1 > w2 > w3; only w1 satisfies p."""
    return Model(("1",), ("p",), (
        _w("w1", {"p"}, **{"1": AgentState("c", 2, 0)}),
        _w("w2", set(), **{"1": AgentState("c", 1, 0)}),
        _w("w3", set(), **{"1": AgentState("c", 0, 0)}),
    ))


_CROSS = {
    # world: (atoms, desirability rank of agent 1, of agent 2, joint choice)
    "w1": ({"co", "lo1", "lo2"}, 0, 0, ("C", "C")),
    "w2": ({"lo1"}, 1, 2, ("S", "C")),
    "w3": ({"lo2"}, 2, 1, ("C", "S")),
    "w4": ({"lo1", "lo2"}, 1, 1, ("S", "S")),
}


def mcross(choices: bool = False) -> Model:
    """Two drivers at a crossroad; flat plausibility, one cell each."""
    worlds = []
    for wid, (atoms, d1, d2, (c1, c2)) in _CROSS.items():
        worlds.append(_w(wid, atoms, **{
            "1": AgentState("c", 0, d1, c1 if choices else None),
            "2": AgentState("c", 0, d2, c2 if choices else None),
        }))
    return Model(("1", "2"), ("co", "lo1", "lo2"), tuple(worlds), ("C", "S") if choices else None)


def mcross_g() -> Model:
    return mcross(choices=True)


def sd_witness() -> Model:
    """Strong desire for p without strong desire for p & q."""
    return Model(("1",), ("p", "q"), (
        _w("u", {"p", "q"}, **{"1": AgentState("c", 0, 1)}),
        _w("v", {"p"}, **{"1": AgentState("c", 0, 2)}),
    ))


def rat_pess_cex() -> Model:
    """One agent, three actions, one cell, flat plausibility; desirability
    grows with the action index. At w2 the agent is pessimistically rational
    yet her action is pessimistically worse than a2."""
    return Model(("1",), (), tuple(
        _w(f"w{k + 1}", set(), **{"1": AgentState("c", 0, k, f"a{k}")}) for k in range(3)
    ), ("a0", "a1", "a2"))


FIXTURES = {
    "m0": m0,
    "m1": m1,
    "mcross": mcross,
    "mcross-g": mcross_g,
    "sd-witness": sd_witness,
    "rat-pess-cex": rat_pess_cex,
}


def fixture(name: str) -> Model:
    try:
        return FIXTURES[name]()
    except KeyError:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(FIXTURES)}") from None


# Crossroad hypotheses and conclusions, as formula source over agents 1 and 2.
def _both(template: str) -> str:
    return " & ".join("(" + template.format(i=i) + ")" for i in ("1", "2"))


CROSSROAD = {
    "phi1": _both("[eq({i})](((lo1 & !lo2) -> !co) & ((!lo1 & lo2) -> !co) & !(!lo1 & !lo2))"),
    "phi2": _both("<eq({i})> co & <eq({i})>(lo1 & !lo2) & <eq({i})>(!lo1 & lo2)"
                  " & <eq({i})>(lo1 & lo2 & !co)"),
    "phi3": _both("SD{{{i}}} !lo{i} & SD{{{i}}} !co"),
    "knows_collision": _both("[eq({i})](co -> lo1 & lo2)"),
    "cond_beliefs": _both("CB{{{i}}}(!lo1, lo2) & CB{{{i}}}(!lo2, lo1)"),
    "strong_desires": _both("SD{{{i}}}(!lo{i} & !co) & D{{{i}}} !lo{i} & D{{{i}}} !co"),
    "one_sided_desired": _both("D{{{i}}}(lo1 & !lo2) & D{{{i}}}(!lo1 & lo2)"),
    "one_sided_not_strong": _both("!SD{{{i}}}(lo1 & !lo2) & !SD{{{i}}}(!lo1 & lo2)"),
    "phi4": _both("[eq({i})]((play(1,C) & play(2,C) -> co)"
                  " & (play(1,C) & play(2,S) -> !lo1 & lo2)"
                  " & (play(1,S) & play(2,C) -> lo1 & !lo2)"
                  " & (play(1,S) & play(2,S) -> lo1 & lo2 & !co))"),
    "phi5": " & ".join(
        f"(!B{{{i}}} !(play(1,{a}) & play(2,{b})) <-> !B{{{i}}} !(play(1,{c}) & play(2,{d})))"
        for i, (a, b), (c, d) in (
            ("1", ("C", "C"), ("S", "C")), ("1", ("C", "S"), ("S", "S")),
            ("2", ("C", "C"), ("C", "S")), ("2", ("S", "C"), ("S", "S")),
        )),
}
