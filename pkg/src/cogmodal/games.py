"""Best response, subjective Nash equilibrium and rationality on models with choices.

All notions are formulas built from ``play`` atoms and realistic preference,
so each answer is a truth value at a world: an agent judges joint actions
from her own information cell and most plausible worlds there.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from typing import Mapping, Optional

from .checker import session
from .model import Model, UnknownAgentError
from .syntax import Attitude, Formula, Implies, Not, Play, conj

DEFAULT_BUDGET = 4096
MODES = ("opt", "pess")


class GameError(ValueError):
    pass


class BudgetExceeded(GameError):
    pass


def budget() -> int:
    """Joint-action sweep limit; ``COGMODAL_BUDGET`` overrides the default."""
    raw = os.environ.get("COGMODAL_BUDGET")
    return int(raw) if raw else DEFAULT_BUDGET


def _mode(mode: str) -> str:
    m = mode.lower()
    if m in ("opt", "optimistic"):
        return "opt"
    if m in ("pess", "pes", "pessimistic"):
        return "pess"
    raise GameError(f"unknown mode {mode!r}; use opt or pess")


def _rp(mode: str) -> str:
    return "RPopt" if _mode(mode) == "opt" else "RPpes"


def _require_game(m: Model) -> None:
    if m.actions is None:
        raise GameError("model declares no actions")


def _check(m: Model, agent: str, action: Optional[str] = None) -> None:
    if agent not in m.agents:
        raise UnknownAgentError(f"unknown agent {agent!r}")
    if action is not None and action not in m.actions:
        raise GameError(f"unknown action {action!r}")


def play_joint(joint: Mapping[str, str]) -> Formula:
    """Conjunction of ``play`` atoms for a (partial) joint action."""
    return conj(*(Play(a, joint[a]) for a in sorted(joint)))


def br_formula(m: Model, i: str, a: str, others: Mapping[str, str], mode: str) -> Formula:
    _require_game(m)
    _check(m, i, a)
    rest = {j: others[j] for j in others if j != i}
    for j, b in rest.items():
        _check(m, j, b)
    if set(rest) != set(m.agents) - {i}:
        raise GameError(f"others must assign an action to every agent except {i!r}")
    ctx = play_joint(rest)
    kind = _rp(mode)
    return conj(*(Attitude(kind, i, (conj(Play(i, b), ctx), conj(Play(i, a), ctx)))
                  for b in m.actions))


def ne_formula(m: Model, joint: Mapping[str, str], mode: str) -> Formula:
    _require_game(m)
    if set(joint) != set(m.agents):
        raise GameError("a joint action assigns an action to every agent")
    return conj(*(br_formula(m, i, joint[i], joint, mode) for i in m.agents))


def rat_formula(m: Model, i: str, mode: str) -> Formula:
    _require_game(m)
    _check(m, i)
    kind = _rp(mode)
    return conj(*(Implies(Play(i, a), Attitude(kind, i, (Not(Play(i, a)), Play(i, a))))
                  for a in m.actions))


def _at(m: Model, w: str, f: Formula) -> bool:
    if w not in m.index:
        raise KeyError(f"unknown world {w!r}")
    return session(m).holds(w, f)


def best_response(m: Model, w: str, i: str, a: str, others: Mapping[str, str], mode: str) -> bool:
    """Whether playing ``a`` is a best response of ``i`` to ``others`` at ``w``."""
    return _at(m, w, br_formula(m, i, a, others, mode))


def nash(m: Model, w: str, joint: Mapping[str, str], mode: str) -> bool:
    return _at(m, w, ne_formula(m, joint, mode))


def rational(m: Model, w: str, i: str, mode: str) -> bool:
    return _at(m, w, rat_formula(m, i, mode))


def joint_actions(m: Model, limit: Optional[int] = None):
    _require_game(m)
    limit = budget() if limit is None else limit
    count = len(m.actions) ** len(m.agents)
    if count > limit:
        raise BudgetExceeded(f"{count} joint actions exceed the budget of {limit}")
    for combo in itertools.product(m.actions, repeat=len(m.agents)):
        yield dict(zip(m.agents, combo))


def enumerate_equilibria(m: Model, w: str, mode: str, limit: Optional[int] = None) -> list:
    """All joint actions that are subjective equilibria at ``w``, in sweep order."""
    return [d for d in joint_actions(m, limit) if nash(m, w, d, mode)]


# ---------------------------------------------------------------- reports


@dataclass
class GameReport:
    agents: tuple
    actions: tuple
    rationality: dict = field(default_factory=dict)  # world -> agent -> mode -> bool
    groups: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "version": 1,
            "agents": list(self.agents),
            "actions": list(self.actions),
            "rationality": self.rationality,
            "groups": self.groups,
        }

    def equilibria(self, w: str, mode: str) -> list:
        for g in self.groups:
            if w in g["worlds"]:
                return g["equilibria"][_mode(mode)]
        raise KeyError(w)

    def table(self) -> str:
        lines = []
        head = ["world"] + [f"Rat_{i}^{md}" for i in self.agents for md in MODES]
        rows = [[w] + ["yes" if self.rationality[w][i][md] else "no"
                       for i in self.agents for md in MODES] for w in self.rationality]
        lines += _align([head] + rows)
        for g in self.groups:
            lines.append("")
            lines.append(f"worlds {', '.join(g['worlds'])}")
            for md in MODES:
                eqs = ["(" + ",".join(d[a] for a in self.agents) + ")" for d in g["equilibria"][md]]
                lines.append(f"  NE^{md}: {' '.join(eqs) if eqs else 'none'}")
            hdr = ["agent", "action", "others"] + [f"BR^{md}" for md in MODES]
            body = [[r["agent"], r["action"], ",".join(f"{k}:{v}" for k, v in r["others"].items())]
                    + ["yes" if r[md] else "no" for md in MODES] for r in g["best_responses"]]
            lines += ["  " + s for s in _align([hdr] + body)]
        return "\n".join(lines)


def _align(rows: list) -> list:
    widths = [max(len(str(r[k])) for r in rows) for k in range(len(rows[0]))]
    return ["  ".join(str(c).ljust(wd) for c, wd in zip(r, widths)).rstrip() for r in rows]


def game_report(m: Model, worlds=None, limit: Optional[int] = None) -> GameReport:
    """Rationality per world; equilibria and best responses per group of
    worlds that every agent's information cells identify.

    The budget caps worlds times joint actions.
    """
    _require_game(m)
    worlds = list(worlds) if worlds else list(m.world_ids)
    rep = GameReport(m.agents, m.actions)
    limit = budget() if limit is None else limit
    cost = len(worlds) * len(m.actions) ** len(m.agents)
    if cost > limit:
        raise BudgetExceeded(f"report over {len(worlds)} worlds needs {cost} sweeps, budget is {limit}")
    joints = list(joint_actions(m, limit))
    for w in worlds:
        rep.rationality[w] = {i: {md: rational(m, w, i, md) for md in MODES} for i in m.agents}
    groups: dict = {}
    for w in worlds:
        k = m.index[w]
        key = tuple(m.cell_of(i)[k] for i in m.agents)
        groups.setdefault(key, []).append(w)
    for ws in groups.values():
        w = ws[0]
        brs = []
        for i in m.agents:
            seen = set()
            for d in joints:
                others = {j: d[j] for j in m.agents if j != i}
                key = tuple(sorted(others.items()))
                if key in seen:
                    continue
                seen.add(key)
                for a in m.actions:
                    row = {"agent": i, "action": a, "others": others}
                    row.update({md: best_response(m, w, i, a, others, md) for md in MODES})
                    brs.append(row)
        rep.groups.append({
            "worlds": ws,
            "equilibria": {md: [d for d in joints if nash(m, w, d, md)] for md in MODES},
            "best_responses": brs,
        })
    return rep
