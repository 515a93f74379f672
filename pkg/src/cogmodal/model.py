"""Finite multi-agent cognitive models, their constraints, and the JSON format.

Per agent, every world carries an information-cell label and two natural
ranks. ``w <= v`` (plausibility or desirability) holds iff both worlds share
the agent's cell and ``rank(w) <= rank(v)``; higher rank means more
plausible/desirable. Containment in the knowledge relation and
comparability inside a cell therefore hold by construction.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field, replace
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping, Optional

from .syntax import DIMS, Eq, Le, Nle, Program

FORMAT_VERSION = 1


class ModelError(ValueError):
    """Malformed model file or inconsistent model data."""


class UnknownAgentError(KeyError):
    pass


@dataclass(frozen=True)
class AgentState:
    cell: str
    rank_p: int
    rank_d: int
    choice: Optional[str] = None

    def rank(self, dim: str) -> int:
        return self.rank_p if dim == "P" else self.rank_d


@dataclass(frozen=True)
class WorldRecord:
    id: str
    nominals: frozenset
    atoms: frozenset
    states: tuple  # ((agent, AgentState), ...)

    def state(self, agent: str) -> AgentState:
        for a, s in self.states:
            if a == agent:
                return s
        raise UnknownAgentError(agent)


def world(id: str, atoms: Iterable[str] = (), nominals: Iterable[str] = (), **states: AgentState) -> WorldRecord:
    """Convenience constructor; ``states`` maps agent id to AgentState."""
    return WorldRecord(str(id), frozenset(nominals) or frozenset([str(id)]), frozenset(atoms),
                       tuple(sorted(states.items())))


@dataclass(frozen=True)
class Model:
    agents: tuple
    atoms: tuple
    worlds: tuple
    actions: Optional[tuple] = None
    version: int = FORMAT_VERSION

    def __hash__(self) -> int:
        try:
            return self.__dict__["_h"]
        except KeyError:
            h = hash((self.agents, self.atoms, self.worlds, self.actions))
            self.__dict__["_h"] = h
            return h

    # -- indices used by the checker; worlds are numbered by list position

    @property
    def n(self) -> int:
        return len(self.worlds)

    @property
    def world_ids(self) -> tuple:
        return tuple(w.id for w in self.worlds)

    @cached_property
    def index(self) -> dict:
        return {w.id: k for k, w in enumerate(self.worlds)}

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    @cached_property
    def _atom_masks(self) -> dict:
        out: dict = {}
        for k, w in enumerate(self.worlds):
            for a in w.atoms:
                out[a] = out.get(a, 0) | (1 << k)
        return out

    @cached_property
    def _nominal_masks(self) -> dict:
        out: dict = {}
        for k, w in enumerate(self.worlds):
            for x in w.nominals:
                out[x] = out.get(x, 0) | (1 << k)
        return out

    def atom_mask(self, name: str) -> int:
        return self._atom_masks.get(name, 0)

    def nominal_mask(self, name: str) -> int:
        return self._nominal_masks.get(name, 0)

    def _check_agent(self, agent: str) -> None:
        if agent not in self.agents:
            raise UnknownAgentError(f"unknown agent {agent!r}")

    @cached_property
    def _cells(self) -> dict:
        out = {}
        for a in self.agents:
            by_label: dict = {}
            for k, w in enumerate(self.worlds):
                lab = w.state(a).cell
                by_label[lab] = by_label.get(lab, 0) | (1 << k)
            out[a] = (tuple(by_label.values()),
                      tuple(by_label[w.state(a).cell] for w in self.worlds))
        return out

    def cells(self, agent: str) -> tuple:
        """Information cells of ``agent`` as world bitmasks."""
        self._check_agent(agent)
        return self._cells[agent][0]

    def cell_of(self, agent: str) -> tuple:
        """Per world index, the bitmask of that world's cell for ``agent``."""
        self._check_agent(agent)
        return self._cells[agent][1]

    @cached_property
    def _ranks(self) -> dict:
        return {(a, d): tuple(w.state(a).rank(d) for w in self.worlds)
                for a in self.agents for d in DIMS}

    def ranks(self, agent: str, dim: str) -> tuple:
        self._check_agent(agent)
        return self._ranks[(agent, dim)]

    def choices(self, agent: str) -> tuple:
        self._check_agent(agent)
        return tuple(w.state(agent).choice for w in self.worlds)

    def world_set(self, mask: int) -> frozenset:
        return frozenset(w.id for k, w in enumerate(self.worlds) if mask >> k & 1)

    def mask_of(self, ids: Iterable[str]) -> int:
        m = 0
        for i in ids:
            m |= 1 << self.index[i]
        return m

    def with_ranks(self, agent: str, dim: str, ranks: Mapping[str, int]) -> "Model":
        """Copy with ``agent``'s ``dim`` ranks replaced (others untouched)."""
        key = "rank_p" if dim == "P" else "rank_d"
        worlds = []
        for w in self.worlds:
            states = tuple((a, replace(s, **{key: ranks[w.id]}) if a == agent else s)
                           for a, s in w.states)
            worlds.append(replace(w, states=states))
        return replace(self, worlds=tuple(worlds))


# ---------------------------------------------------------------- relations


def relation_rows(m: Model, a: Program) -> tuple:
    """Successor bitmask per world for an atomic program."""
    cell_of = m.cell_of(a.agent)
    if isinstance(a, Eq):
        return cell_of
    if not isinstance(a, (Le, Nle)):
        raise TypeError(f"not an atomic program: {a!r}")
    r = m.ranks(a.agent, a.dim)
    rows = []
    for k in range(m.n):
        row = 0
        c = cell_of[k]
        rk = r[k]
        for v in range(m.n):
            if c >> v & 1 and ((rk <= r[v]) if isinstance(a, Le) else (rk > r[v])):
                row |= 1 << v
        rows.append(row)
    return tuple(rows)


def rows_to_pairs(m: Model, rows: Iterable[int]) -> frozenset:
    ids = m.world_ids
    return frozenset((ids[k], ids[v]) for k, row in enumerate(rows)
                     for v in range(m.n) if row >> v & 1)


def atomic_rel(m: Model, a: Program) -> frozenset:
    """The pair set of an atomic program ``eq``, ``le`` or ``nle``."""
    return rows_to_pairs(m, relation_rows(m, a))


# ---------------------------------------------------------------- validation


@dataclass(frozen=True)
class Violation:
    constraint: str
    message: str
    worlds: tuple = ()
    agent: Optional[str] = None


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def constraints(self) -> set:
        return {v.constraint for v in self.violations}

    def add(self, constraint: str, message: str, worlds=(), agent=None) -> None:
        self.violations.append(Violation(constraint, message, tuple(worlds), agent))


def validate_model(m: Model) -> ValidationReport:
    """Check every model constraint; violations are reported, never raised."""
    rep = ValidationReport()
    if not m.worlds:
        rep.add("worlds", "model has no worlds")
        return rep
    ids = [w.id for w in m.worlds]
    for wid in sorted({i for i in ids if ids.count(i) > 1}):
        rep.add("worlds", f"duplicate world id {wid!r}", [wid])
    if len(set(m.agents)) != len(m.agents):
        rep.add("agents", "duplicate agent id")

    declared = set(m.atoms)
    for w in m.worlds:
        agents_here = [a for a, _ in w.states]
        for a in m.agents:
            if a not in agents_here:
                rep.add("agents", f"world {w.id!r} has no entry for agent {a!r}", [w.id], a)
        for a in agents_here:
            if a not in m.agents:
                rep.add("agents", f"world {w.id!r} mentions undeclared agent {a!r}", [w.id], a)
        for a, s in w.states:
            if not (isinstance(s.rank_p, int) and isinstance(s.rank_d, int)) or s.rank_p < 0 or s.rank_d < 0:
                rep.add("ranks", f"ranks of agent {a!r} at {w.id!r} must be naturals", [w.id], a)
        if not w.nominals:
            rep.add("C3", f"world {w.id!r} has no nominal", [w.id])
        extra = set(w.atoms) - declared
        if extra:
            rep.add("atoms", f"world {w.id!r} uses undeclared atoms {sorted(extra)}", [w.id])

    owner: dict = {}
    for w in m.worlds:
        for x in w.nominals:
            owner.setdefault(x, []).append(w.id)
    for x, ws in sorted(owner.items()):
        if len(ws) > 1:
            rep.add("C4", f"nominal @{x} is attached to several worlds", ws)

    if rep.violations:
        return rep  # structural problems make the choice checks meaningless

    if m.actions is None:
        for w in m.worlds:
            if any(s.choice is not None for _, s in w.states):
                rep.add("choices", f"world {w.id!r} has choices but the model declares no actions", [w.id])
        return rep

    acts = set(m.actions)
    total = True
    for w in m.worlds:
        for a in m.agents:
            c = w.state(a).choice
            if c is None:
                total = False
                rep.add("choice-totality", f"agent {a!r} has no choice at {w.id!r}", [w.id], a)
            elif c not in acts:
                total = False
                rep.add("choice-totality", f"undeclared action {c!r} at {w.id!r}", [w.id], a)
    if not total:
        # missing choices also break subjective independence; report it
        for i in m.agents:
            for cell in m.cells(i):
                ws = [w for k, w in enumerate(m.worlds) if cell >> k & 1]
                if any(w.state(j).choice not in acts for w in ws for j in m.agents):
                    rep.add("C5", f"cell of agent {i!r} has incomplete joint actions",
                            [w.id for w in ws], i)
        return rep

    for i in m.agents:
        for cell in m.cells(i):
            ws = [w for k, w in enumerate(m.worlds) if cell >> k & 1]
            played = {tuple(w.state(j).choice for j in m.agents) for w in ws}
            options = [sorted({w.state(j).choice for w in ws}) for j in m.agents]
            for delta in itertools.product(*options):
                if delta not in played:
                    rep.add("C5", f"joint action {dict(zip(m.agents, delta))} is never played "
                            f"in a cell of agent {i!r}", [w.id for w in ws], i)
    return rep


# ---------------------------------------------------------------- JSON


def _reject_duplicates(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise ModelError(f"duplicate key {k!r}")
        out[k] = v
    return out


def _nat(v, what: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int) or v < 0:
        raise ModelError(f"{what} must be a natural number, got {v!r}")
    return v


def model_from_dict(doc: dict) -> Model:
    if not isinstance(doc, dict):
        raise ModelError("model document must be a JSON object")
    version = doc.get("version", FORMAT_VERSION)
    if version != FORMAT_VERSION:
        raise ModelError(f"unsupported model format version {version!r}")
    try:
        agents = tuple(str(a) for a in doc["agents"])
        raw_worlds = doc["worlds"]
    except (KeyError, TypeError) as e:
        raise ModelError(f"missing field {e}") from None
    atoms = tuple(str(a) for a in doc.get("atoms", ()))
    actions = doc.get("actions")
    if actions is not None:
        actions = tuple(str(a) for a in actions)
    if not raw_worlds:
        raise ModelError("model has no worlds")
    worlds = []
    seen = set()
    for rw in raw_worlds:
        try:
            wid = str(rw["id"])
            per_agent = rw["agents"]
        except (KeyError, TypeError) as e:
            raise ModelError(f"world entry missing field {e}") from None
        if wid in seen:
            raise ModelError(f"duplicate world id {wid!r}")
        seen.add(wid)
        noms = frozenset(str(x).lstrip("@") for x in rw.get("nominals") or ()) or frozenset([wid])
        states = []
        for a, st in per_agent.items():
            a = str(a)
            try:
                cell = str(st["cell"])
                rp = _nat(st["rank_p"], f"rank_p of agent {a} at {wid}")
                rd = _nat(st["rank_d"], f"rank_d of agent {a} at {wid}")
            except (KeyError, TypeError) as e:
                raise ModelError(f"agent entry at {wid!r} missing field {e}") from None
            ch = st.get("choice")
            states.append((a, AgentState(cell, rp, rd, None if ch is None else str(ch))))
        worlds.append(WorldRecord(wid, noms, frozenset(str(p) for p in rw.get("atoms", ())),
                                  tuple(sorted(states))))
    return Model(agents, atoms, tuple(worlds), actions)


def model_to_dict(m: Model) -> dict:
    doc: dict = {"version": m.version, "agents": list(m.agents), "atoms": list(m.atoms)}
    if m.actions is not None:
        doc["actions"] = list(m.actions)
    ws = []
    for w in m.worlds:
        ag = {}
        for a, s in w.states:
            e = {"cell": s.cell, "rank_p": s.rank_p, "rank_d": s.rank_d}
            if s.choice is not None:
                e["choice"] = s.choice
            ag[a] = e
        ws.append({"id": w.id, "nominals": ["@" + x for x in sorted(w.nominals)],
                   "atoms": sorted(w.atoms), "agents": ag})
    doc["worlds"] = ws
    return doc


def loads_model(text: str) -> Model:
    try:
        doc = json.loads(text, object_pairs_hook=_reject_duplicates)
    except json.JSONDecodeError as e:
        raise ModelError(f"invalid JSON: {e}") from None
    return model_from_dict(doc)


def dumps_model(m: Model) -> str:
    return json.dumps(model_to_dict(m), indent=2, ensure_ascii=False) + "\n"


def load_model(path) -> Model:
    return loads_model(Path(path).read_text(encoding="utf-8"))


def save_model(m: Model, path) -> None:
    Path(path).write_text(dumps_model(m), encoding="utf-8")
