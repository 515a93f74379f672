"""Deterministic random models and formulas, axiom instances and fuzz suites.

Every generated model is valid by construction. Without choices, cells are a
random labelling of the worlds. With choices, worlds come in blocks: a block
holds one world per joint action of a product of per-agent action sets, and
an agent's cell is a union of blocks sharing the same product, which keeps
choice independence true inside every cell.

A suite yields checks per model; a check either names a formula that must
hold at every world or carries a precomputed mask of bad worlds. Failures
keep the model (written to disk when an output directory is given), the
first bad world and the formula, so :func:`replay_failure` can rerun them.
"""

from __future__ import annotations

import dataclasses
import hashlib
import itertools
import json
import math
import random
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterator, Optional

from .checker import Checker, check_wt
from .dynamics import reduce, revise_mask
from .model import (
    AgentState, Model, WorldRecord, dumps_model, load_model, relation_rows, save_model,
    validate_model,
)
from .syntax import (
    ATTITUDE_KINDS, PREF_KINDS, And, Atom, Attitude, Bot, Box, Conv, Diamond, DynBox, Eq,
    Formula, Iff, Implies, Inter, Le, Nle, Nominal, Not, Or, Play, Program, RevisionOp,
    Seq, Test, Top, Union_, conj, disj, expand_attitudes, gt, has_dynamic, lt,
    parse_formula, render,
)

ATOM_NAMES = ("p", "q", "r", "s")
DIMS = ("P", "D")


@dataclass(frozen=True)
class GenSpec:
    """Generation envelope. Ranges are inclusive ``(lo, hi)`` pairs."""

    seed: int = 0
    worlds: tuple = (1, 8)
    agents: tuple = (1, 3)
    atoms: tuple = (1, 4)
    cells: tuple = (1, 3)
    max_rank: int = 3
    with_choices: bool = False
    actions: tuple = (1, 3)
    depth: int = 4
    instances: int = 20

    def __post_init__(self):
        for name in ("worlds", "agents", "atoms", "cells", "actions"):
            lo, hi = getattr(self, name)
            if not 0 <= lo <= hi:
                raise ValueError(f"{name}: empty range {lo}..{hi}")
        for name in ("worlds", "agents", "cells", "actions"):
            if getattr(self, name)[0] < 1:
                raise ValueError(f"{name} needs at least 1")
        if self.max_rank < 0 or self.depth < 0 or self.instances < 1:
            raise ValueError("max_rank and depth must be >= 0, instances >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")

    def replace(self, **kw) -> "GenSpec":
        return dataclasses.replace(self, **kw)

    def to_dict(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in dataclasses.asdict(self).items()}

    @classmethod
    def from_dict(cls, d: dict) -> "GenSpec":
        return cls(**{k: tuple(v) if isinstance(v, list) else v for k, v in d.items()})


def derive_seed(*parts) -> int:
    digest = hashlib.sha256(":".join(map(str, parts)).encode()).digest()
    return int.from_bytes(digest[:8], "big")


# ---------------------------------------------------------------- models


def _dense_ranks(rng: random.Random, cells: list, max_rank: int) -> dict:
    raw = {k: rng.randint(0, max_rank) for k in range(len(cells))}
    out = {}
    for lab in set(cells):
        members = [k for k, c in enumerate(cells) if c == lab]
        levels = sorted({raw[k] for k in members})
        out.update({k: levels.index(raw[k]) for k in members})
    return out


def _choice_blocks(rng: random.Random, n_min: int, n_max: int, agents: tuple, actions: tuple) -> list:
    blocks: list = []
    total = 0
    while total < n_max:
        if blocks and rng.random() < 0.4:
            prod = rng.choice(blocks)
        else:
            prod = tuple(tuple(sorted(rng.sample(actions, rng.randint(1, len(actions)))))
                         for _ in agents)
        prod = list(prod)
        while total + math.prod(map(len, prod)) > n_max:
            k = max(range(len(prod)), key=lambda j: len(prod[j]))
            prod[k] = prod[k][:-1]
        blocks.append(tuple(prod))
        total += math.prod(map(len, prod))
        if total >= n_min and rng.random() < 0.35:
            break
    return blocks


def gen_model(spec: GenSpec) -> Model:
    return _gen_model(random.Random(spec.seed), spec)


def _gen_model(rng: random.Random, spec: GenSpec) -> Model:
    agents = tuple(str(k + 1) for k in range(rng.randint(*spec.agents)))
    n_atoms = rng.randint(*spec.atoms)
    atoms = tuple(ATOM_NAMES[k] if k < len(ATOM_NAMES) else f"p{k}" for k in range(n_atoms))
    n_max = rng.randint(*spec.worlds)

    if spec.with_choices:
        actions = tuple(f"a{k}" for k in range(rng.randint(*spec.actions)))
        blocks = _choice_blocks(rng, spec.worlds[0], n_max, agents, actions)
        joints = []  # (block index, joint action) per world
        for b, prod in enumerate(blocks):
            joints += [(b, combo) for combo in itertools.product(*prod)]
        n = len(joints)
        cells = {}
        for i in agents:
            label = {}
            base = 0
            for prod in dict.fromkeys(blocks):
                members = [b for b, q in enumerate(blocks) if q == prod]
                parts = rng.randint(1, len(members))
                for b in members:
                    label[b] = f"c{base + rng.randrange(parts)}"
                base += parts
            cells[i] = [label[b] for b, _ in joints]
    else:
        actions = None
        n = n_max
        cells = {}
        for i in agents:
            c = rng.randint(*spec.cells)
            cells[i] = [f"c{rng.randrange(c)}" for _ in range(n)]

    ranks = {(i, d): _dense_ranks(rng, cells[i], spec.max_rank) for i in agents for d in DIMS}
    extra = {}
    for k in range(n):
        if rng.random() < 0.15:
            extra[k] = f"n{k + 1}"
    worlds = []
    for k in range(n):
        wid = f"w{k + 1}"
        states = []
        for a, i in enumerate(agents):
            choice = joints[k][1][a] if actions else None
            states.append((i, AgentState(cells[i][k], ranks[i, "P"][k], ranks[i, "D"][k], choice)))
        valuation = frozenset(p for p in atoms if rng.random() < 0.5)
        noms = frozenset([wid] + ([extra[k]] if k in extra else []))
        worlds.append(WorldRecord(wid, noms, valuation, tuple(states)))
    return Model(agents, atoms, tuple(worlds), actions)


# ---------------------------------------------------------------- formulas


class FormulaGen:
    """Random formulas and programs over a fixed vocabulary.

    Programs lean toward atomic relations and single combinators.
    """

    def __init__(self, rng: random.Random, atoms, nominals, agents, actions=None):
        self.rng = rng
        self.atoms = tuple(atoms)
        self.nominals = tuple(nominals)
        self.agents = tuple(agents)
        self.actions = tuple(actions) if actions else ()

    @classmethod
    def for_model(cls, rng: random.Random, m: Model) -> "FormulaGen":
        noms = sorted({x for w in m.worlds for x in w.nominals})
        return cls(rng, m.atoms, noms, m.agents, m.actions)

    def agent(self) -> str:
        return self.rng.choice(self.agents)

    def nominal(self) -> Formula:
        return Nominal(self.rng.choice(self.nominals))

    def leaf(self) -> Formula:
        r = self.rng.random()
        if self.atoms and r < 0.6:
            return Atom(self.rng.choice(self.atoms))
        if r < 0.75 and self.nominals:
            return self.nominal()
        if r < 0.88 and self.actions:
            return Play(self.agent(), self.rng.choice(self.actions))
        return Top() if self.rng.random() < 0.5 else Bot()

    def prop(self, depth: int) -> Formula:
        if depth <= 0 or self.rng.random() < 0.3:
            if self.atoms and self.rng.random() < 0.85:
                return Atom(self.rng.choice(self.atoms))
            return Top() if self.rng.random() < 0.5 else Bot()
        r = self.rng.random()
        if r < 0.3:
            return Not(self.prop(depth - 1))
        t = self.rng.choice((And, Or, Implies))
        return t(self.prop(depth - 1), self.prop(depth - 1))

    def formula(self, depth: int) -> Formula:
        if depth <= 0 or self.rng.random() < 0.25:
            return self.leaf()
        r = self.rng.random()
        d = depth - 1
        if r < 0.18:
            return Not(self.formula(d))
        if r < 0.45:
            t = self.rng.choice((And, Or, Implies, Iff))
            return t(self.formula(d), self.formula(d))
        if r < 0.62:
            return Box(self.program(min(d, 2)), self.formula(d))
        if r < 0.75:
            return Diamond(self.program(min(d, 2)), self.formula(d))
        return self.attitude(d)

    def program(self, depth: int) -> Program:
        rng = self.rng
        if depth <= 0 or rng.random() < 0.6:
            r = rng.random()
            if r < 0.3:
                return Eq(self.agent())
            t = Le if r < 0.75 else Nle
            return t(self.agent(), rng.choice(DIMS))
        r = rng.random()
        d = depth - 1
        if r < 0.25:
            return Seq(self.program(d), self.program(d))
        if r < 0.45:
            return Union_(self.program(d), self.program(d))
        if r < 0.65:
            return Inter(self.program(d), self.program(d))
        if r < 0.85:
            return Conv(self.program(d))
        return Test(self.formula(min(d, 1)))

    def attitude(self, depth: int, kind: Optional[str] = None, shape: Optional[str] = None) -> Attitude:
        """``shape`` picks ``monadic``, ``weak`` or ``strict`` for preferences."""
        rng = self.rng
        kind = kind or rng.choice(ATTITUDE_KINDS)
        i = self.agent()
        if kind in ("CB", "CD"):
            return Attitude(kind, i, (self.formula(depth), self.formula(depth)))
        if kind in PREF_KINDS:
            shape = shape or rng.choice(("monadic", "weak", "strict"))
            if shape == "monadic":
                return Attitude(kind, i, (self.formula(depth),))
            return Attitude(kind, i, (self.formula(depth), self.formula(depth)), shape == "strict")
        return Attitude(kind, i, (self.formula(depth),))

    def revision(self, nest: int = 0) -> RevisionOp:
        rng = self.rng
        if nest > 0 and rng.random() < 0.25:
            phi = self.dynamic(1, nest)
        else:
            phi = self.formula(1)
        return RevisionOp(rng.choice(("radical", "conservative")), rng.choice(DIMS), self.agent(), phi)

    def dynamic(self, depth: int, nest: int = 2) -> Formula:
        """Formula with at most ``nest`` revision operators along any path."""
        rng = self.rng
        if nest <= 0 or depth <= 0:
            return self.formula(min(depth, 1))
        r = rng.random()
        if r < 0.4:
            op = self.revision(nest - 1)
            return DynBox(op, self.revised_body(op, depth - 1, nest - 1))
        if r < 0.5:
            return Not(self.dynamic(depth - 1, nest))
        if r < 0.7:
            t = rng.choice((And, Or, Implies))
            return t(self.dynamic(depth - 1, nest), self.formula(min(depth - 1, 1)))
        if r < 0.85:
            t = rng.choice((Box, Diamond))
            return t(self.program(1), self.dynamic(depth - 1, nest))
        return self.attitude_over(self.dynamic(depth - 1, nest))

    def revised_body(self, op: RevisionOp, depth: int, nest: int) -> Formula:
        """Scope of a revision, usually talking about the revised ordering."""
        rng = self.rng
        inner = self.dynamic(depth, nest) if nest > 0 and rng.random() < 0.5 else self.formula(min(depth, 1))
        r = rng.random()
        if r < 0.45:
            kinds = ("B", "SB", "CB", "RPopt", "RPpes") if op.dim == "P" else \
                ("D", "SD", "CD", "Popt", "Ppes", "RPopt", "RPpes")
            kind = rng.choice(kinds)
            if kind in ("CB", "CD") or kind in PREF_KINDS:
                return Attitude(kind, op.agent, (self.formula(1), inner))
            return Attitude(kind, op.agent, (inner,))
        if r < 0.75:
            t = rng.choice((Le, Nle))
            prog = t(op.agent, op.dim)
            if rng.random() < 0.3:
                prog = rng.choice((Seq, Union_, Inter))(prog, self.program(1))
            return rng.choice((Box, Diamond))(prog, inner)
        return inner

    def attitude_over(self, f: Formula) -> Attitude:
        kind = self.rng.choice(ATTITUDE_KINDS)
        i = self.agent()
        if kind in ("CB", "CD") or kind in PREF_KINDS and self.rng.random() < 0.5:
            return Attitude(kind, i, (self.formula(0), f))
        return Attitude(kind, i, (f,))

    def dynamic_formula(self, depth: int, nest: int = 2) -> Formula:
        f = self.dynamic(depth, nest)
        if not has_dynamic(f):
            f = DynBox(self.revision(nest - 1), f)
        return f


def gen_formula(spec: GenSpec, m: Optional[Model] = None) -> Formula:
    """Static formula of depth at most ``spec.depth`` over ``m``'s vocabulary
    (by default the model generated from the same spec)."""
    m = gen_model(spec) if m is None else m
    rng = random.Random(derive_seed("formula", spec.seed))
    return FormulaGen.for_model(rng, m).formula(spec.depth)


# ---------------------------------------------------------------- schemas


def _sub_depth(spec: GenSpec) -> int:
    return max(0, min(spec.depth, 4) - 2)


def _schema_k(g, d):
    p, a, b = g.program(2), g.formula(d), g.formula(d)
    return Implies(And(Box(p, a), Box(p, Implies(a, b))), Box(p, b))


def _schema_t_eq(g, d):
    e = Eq(g.agent())
    a = g.formula(d)
    return Implies(Box(e, a), a)


def _schema_4_eq(g, d):
    e = Eq(g.agent())
    a = g.formula(d)
    return Implies(Box(e, a), Box(e, Box(e, a)))


def _schema_5_eq(g, d):
    e = Eq(g.agent())
    a = g.formula(d)
    return Implies(Not(Box(e, a)), Box(e, Not(Box(e, a))))


def _le(g):
    return Le(g.agent(), g.rng.choice(DIMS))


def _schema_t_le(g, d):
    r, a = _le(g), g.formula(d)
    return Implies(Box(r, a), a)


def _schema_4_le(g, d):
    r, a = _le(g), g.formula(d)
    return Implies(Box(r, a), Box(r, Box(r, a)))


def _schema_inc(g, d):
    r, a = _le(g), g.formula(d)
    return Implies(Box(Eq(r.agent), a), Box(r, a))


def _schema_conn(g, d):
    r = _le(g)
    e = Eq(r.agent)
    a, b = g.formula(d), g.formula(d)
    return Implies(And(Diamond(e, a), Diamond(e, b)),
                   Or(Diamond(e, And(a, Diamond(r, b))), Diamond(e, And(b, Diamond(r, a)))))


def _schema_red_seq(g, d):
    p, q, a = g.program(1), g.program(1), g.formula(d)
    return Iff(Box(Seq(p, q), a), Box(p, Box(q, a)))


def _schema_red_union(g, d):
    p, q, a = g.program(1), g.program(1), g.formula(d)
    return Iff(Box(Union_(p, q), a), And(Box(p, a), Box(q, a)))


def _schema_add1(g, d):
    p, q, a, b = g.program(1), g.program(1), g.formula(d), g.formula(d)
    return Implies(And(Box(p, a), Box(q, b)), Box(Inter(p, q), And(a, b)))


def _schema_add2(g, d):
    p, q, x = g.program(1), g.program(1), g.nominal()
    return Implies(And(Diamond(p, x), Diamond(q, x)), Diamond(Inter(p, q), x))


def _schema_conv1(g, d):
    p, a = g.program(2), g.formula(d)
    return Implies(a, Box(p, Diamond(Conv(p), a)))


def _schema_conv2(g, d):
    p, a = g.program(2), g.formula(d)
    return Implies(a, Box(Conv(p), Diamond(p, a)))


def _schema_comp1(g, d):
    r, a = _le(g), g.formula(d)
    return Iff(And(Box(r, a), Box(Nle(r.agent, r.dim), a)), Box(Eq(r.agent), a))


def _schema_comp2(g, d):
    r, x = _le(g), g.nominal()
    return Implies(Diamond(r, x), Box(Nle(r.agent, r.dim), Not(x)))


def _schema_red_test(g, d):
    a, b = g.formula(d), g.formula(d)
    return Implies(Box(Test(a), b), Implies(a, b))


def _schema_most(g, d):
    p, q, x, a = g.program(2), g.program(2), g.nominal(), g.formula(d)
    return Implies(Diamond(p, And(x, a)), Box(q, Implies(x, a)))


def _schema_most_act(g, d):
    if len(g.actions) < 2:
        return None
    a, b = g.rng.sample(g.actions, 2)
    i = g.agent()
    return Implies(Play(i, a), Not(Play(i, b)))


def _schema_least_act(g, d):
    i = g.agent()
    return disj(*(Play(i, a) for a in g.actions))


def _schema_sic(g, d):
    i = g.agent()
    e = Eq(i)
    delta = {j: g.rng.choice(g.actions) for j in g.agents}
    each = conj(*(Diamond(e, Play(j, delta[j])) for j in g.agents))
    return Implies(each, Diamond(e, conj(*(Play(j, delta[j]) for j in g.agents))))


def _schema_cwf(g, d):
    i, a = g.agent(), g.formula(d)
    return Implies(Diamond(Eq(i), a), Diamond(Eq(i), And(a, Box(lt(i, "P"), Not(a)))))


def _schema_wf(g, d):
    i, a = g.agent(), g.formula(d)
    return Implies(Diamond(Eq(i), a), Diamond(Eq(i), And(a, Box(gt(i, "D"), Not(a)))))


def _schema_belief_truth(g, d):
    a = g.formula(d)
    return Implies(Attitude("B", g.agent(), (a,)), a)


SCHEMAS: dict = {
    "K": _schema_k,
    "T_eq": _schema_t_eq,
    "4_eq": _schema_4_eq,
    "5_eq": _schema_5_eq,
    "T_le": _schema_t_le,
    "4_le": _schema_4_le,
    "Inc": _schema_inc,
    "Conn": _schema_conn,
    "Red_seq": _schema_red_seq,
    "Red_union": _schema_red_union,
    "Add1_inter": _schema_add1,
    "Add2_inter": _schema_add2,
    "Conv1": _schema_conv1,
    "Conv2": _schema_conv2,
    "Comp1": _schema_comp1,
    "Comp2": _schema_comp2,
    "Red_test": _schema_red_test,
    "Most": _schema_most,
    "MostAct": _schema_most_act,
    "LeastAct": _schema_least_act,
    "SIC": _schema_sic,
    "CWF": _schema_cwf,
    "WF": _schema_wf,
    "BeliefTruth": _schema_belief_truth,
}
DLCA_SCHEMAS = tuple(list(SCHEMAS)[:18])
DLCAG_SCHEMAS = ("MostAct", "LeastAct", "SIC")
WF_SCHEMAS = ("CWF", "WF")
GAME_SCHEMAS = set(DLCAG_SCHEMAS)


def _instances(sid: str, g: FormulaGen, count: int, depth: int) -> list:
    try:
        build = SCHEMAS[sid]
    except KeyError:
        raise KeyError(f"unknown schema {sid!r}; known: {', '.join(SCHEMAS)}") from None
    if sid in GAME_SCHEMAS and not g.actions:
        raise ValueError(f"schema {sid} needs a model with choices")
    out = []
    for _ in range(count):
        f = build(g, depth)
        if f is not None:
            out.append(f)
    return out


def axiom_instances(schema_id: str, m: Model, spec: GenSpec, rng: Optional[random.Random] = None) -> list:
    """``spec.instances`` instances of a schema over ``m``'s vocabulary.

    MostAct has no instance on models with a single action.
    """
    rng = rng or random.Random(derive_seed("schema", spec.seed, schema_id))
    return _instances(schema_id, FormulaGen.for_model(rng, m), spec.instances, _sub_depth(spec))


# ---------------------------------------------------------------- oracles


def rank_relation_roundtrip(m: Model) -> bool:
    """Rebuild ranks from each induced ordering and compare the relations."""
    for i in m.agents:
        for dim in DIMS:
            rows = relation_rows(m, Le(i, dim))
            new = {}
            for cell in m.cells(i):
                members = [k for k in range(m.n) if cell >> k & 1]
                # every ordering must be a total preorder confined to its cell
                for k in members:
                    if rows[k] & ~cell or not rows[k] >> k & 1:
                        return False
                    for v in members:
                        if rows[k] >> v & 1:
                            if not _subset(rows[v], rows[k]):
                                return False
                        elif not rows[v] >> k & 1:
                            return False
                # rows[k] is the set of worlds at least as good as k
                ups = {k: bin(rows[k]).count("1") for k in members}
                sizes = sorted(set(ups.values()), reverse=True)
                new.update({m.world_ids[k]: sizes.index(ups[k]) for k in members})
            rebuilt = m.with_ranks(i, dim, new)
            if relation_rows(rebuilt, Le(i, dim)) != rows:
                return False
    return True


def _subset(a: int, b: int) -> bool:
    return a & ~b == 0


def comprehension(m: Model, op: RevisionOp, mask: int) -> frozenset:
    """Pairs of the revised ordering, by the defining set comprehension over
    the old model, using literal rank comparisons."""
    i, dim = op.agent, op.dim
    ranks = m.ranks(i, dim)
    cell_of = m.cell_of(i)
    n = m.n

    def sat(k):
        return bool(mask >> k & 1)

    def le(a, b):
        return cell_of[a] == cell_of[b] and ranks[a] <= ranks[b]

    def same(a, b):
        return cell_of[a] == cell_of[b]

    if op.flavor == "radical":
        pairs = {(a, b) for a in range(n) for b in range(n)
                 if (sat(a) == sat(b) and le(a, b)) or (not sat(a) and sat(b) and same(a, b))}
    else:
        if dim == "P":
            def special(a, ref):
                pool = [u for u in range(n) if same(u, ref) and sat(u)]
                return sat(a) and same(a, ref) and all(ranks[u] <= ranks[a] for u in pool)
        else:
            def special(a, ref):
                pool = [u for u in range(n) if same(u, ref) and not sat(u)]
                return not sat(a) and same(a, ref) and all(ranks[a] <= ranks[u] for u in pool)
        pairs = set()
        for a in range(n):
            for b in range(n):
                sa, sb = special(a, a), special(b, a)
                if sa == sb and le(a, b):
                    pairs.add((a, b))
                elif dim == "P" and not sa and sb and same(a, b):
                    pairs.add((a, b))
                elif dim == "D" and sa and not sb and same(a, b):
                    pairs.add((a, b))
    ids = m.world_ids
    return frozenset((ids[a], ids[b]) for a, b in pairs)


def transform_mismatch(m: Model, op: RevisionOp, chk: Optional[Checker] = None) -> int:
    """Mask of worlds whose outgoing revised pairs disagree with the
    comprehension, plus every world if anything else in the model changed."""
    chk = chk or Checker(m)
    mask = chk.truth(op.input)
    res = revise_mask(m, op.flavor, op.agent, op.dim, mask)
    new = res.model
    expected = comprehension(m, op, mask)
    got_rows = relation_rows(new, Le(op.agent, op.dim))
    bad = 0
    ids = m.world_ids
    for k in range(m.n):
        got = {ids[v] for v in range(m.n) if got_rows[k] >> v & 1}
        want = {b for a, b in expected if a == ids[k]}
        if got != want:
            bad |= 1 << k
    untouched = all(
        relation_rows(new, p) == relation_rows(m, p)
        for j in m.agents
        for p in [Eq(j)] + [Le(j, d) for d in DIMS if (j, d) != (op.agent, op.dim)]
    )
    same_rest = all(
        a.id == b.id and a.atoms == b.atoms and a.nominals == b.nominals
        and all(a.state(j).cell == b.state(j).cell and a.state(j).choice == b.state(j).choice
                for j in m.agents)
        for a, b in zip(m.worlds, new.worlds)
    )
    if not (untouched and same_rest and validate_model(new).ok):
        bad = m.full
    return bad


# ---------------------------------------------------------------- suites


@dataclass
class Check:
    label: str
    formula: Optional[Formula] = None
    bad: Optional[int] = None
    model: Optional[Model] = None
    kind: str = "formula"
    detail: Optional[str] = None


@dataclass(frozen=True)
class Suite:
    name: str
    run: Callable
    choices: bool = False
    description: str = ""


def _suite_schemas(names):
    def run(m, chk, g, spec):
        d = _sub_depth(spec)
        for sid in names:
            for f in _instances(sid, g, spec.instances, d):
                yield Check(sid, f)
    return run


def _run_dlca(m, chk, g, spec):
    d = _sub_depth(spec)
    valid = []
    for sid in DLCA_SCHEMAS:
        for f in _instances(sid, g, spec.instances, d):
            valid.append(f)
            yield Check(sid, f)
    # necessitation, checked per model on instances just shown valid
    for f in g.rng.sample(valid, min(4, len(valid))):
        if chk.truth(f) == m.full:
            yield Check("Nec", Box(g.program(2), f))


def _run_encodings(m, chk, g, spec):
    d = max(0, _sub_depth(spec) - 1)
    per = max(1, spec.instances // 5)
    for kind in ATTITUDE_KINDS:
        shapes = ("monadic", "weak", "strict") if kind in PREF_KINDS else (None,)
        for shape in shapes:
            for _ in range(per):
                a = g.attitude(d, kind, shape)
                yield Check(f"enc-{kind}" + (f"-{shape}" if shape else ""), Iff(a, expand_attitudes(a)))


def _run_known_validities(m, chk, g, spec):
    d = _sub_depth(spec)
    for _ in range(max(1, spec.instances // 4)):
        i = g.agent()
        a, b = g.formula(d), g.formula(d)
        A = lambda kind, *args, strict=False: Attitude(kind, i, args, strict)  # noqa: E731
        e = Eq(i)
        yield Check("sb-bridge", Implies(And(A("SB", a), Diamond(e, a)), A("B", a)))
        yield Check("d-monotony", Implies(A("D", a), A("D", And(a, b))))
        yield Check("sd-bridge", Implies(And(A("SD", a), Diamond(e, Not(a))), A("D", a)))
        for kind in ("Popt", "Ppes"):
            yield Check("p-total", Or(A(kind, b, a), A(kind, a, b)))
        for kind in ("RPopt", "RPpes"):
            yield Check("rp-total", Or(A(kind, b, a), A(kind, a, b)))
        yield Check("d-ppes", Implies(Not(A("D", Top())), Iff(A("D", a), A("Ppes", a))))


def _run_finite(m, chk, g, spec):
    d = _sub_depth(spec)
    for _ in range(max(1, spec.instances // 4)):
        i = g.agent()
        a = g.formula(d)
        yield Check("b-consistent", Not(And(Attitude("B", i, (a,)), Attitude("B", i, (Not(a),)))))
    for i in m.agents:
        yield Check("b-not-bot", Not(Attitude("B", i, (Bot(),))))
        yield Check("d-not-top", Not(Attitude("D", i, (Top(),))))


def _wt_bridge(i, a):
    return Implies(And(Attitude("SD", i, (a,)), Not(Attitude("B", i, (Not(a),)))), Attitude("B", i, (a,)))


def _run_wt(m, chk, g, spec):
    d = _sub_depth(spec)
    for i in m.agents:
        # a copy whose plausibility follows desirability always satisfies WT
        aligned = m.with_ranks(i, "P", dict(zip(m.world_ids, m.ranks(i, "D"))))
        for target in (m, aligned):
            if not check_wt(target, i):
                continue
            for _ in range(max(1, spec.instances // 4)):
                yield Check("wt-bridge", _wt_bridge(i, g.formula(d)), model=target)


def _run_rationality(m, chk, g, spec):
    from .games import ne_formula, rat_formula

    joints = [dict(zip(m.agents, c)) for c in itertools.product(m.actions, repeat=len(m.agents))]
    for mode, kind in (("opt", "RPopt"), ("pess", "RPpes")):
        for i in m.agents:
            rat = rat_formula(m, i, mode)
            for a in m.actions:
                lemma = conj(*(Attitude(kind, i, (Play(i, b), Play(i, a))) for b in m.actions))
                yield Check(f"rat-lemma-{mode}", Implies(And(rat, Play(i, a)), lemma))
        for delta in g.rng.sample(joints, min(4, len(joints))):
            play = conj(*(Play(j, delta[j]) for j in m.agents))
            hyp = conj(*(And(rat_formula(m, i, mode),
                             Attitude("B", i, (conj(*(Play(j, delta[j]) for j in m.agents if j != i)),)))
                         for i in m.agents))
            yield Check(f"nash-char-{mode}", Implies(And(play, hyp), ne_formula(m, delta, mode)))


def _random_op(g: FormulaGen, flavor=None, dim=None, phi=None) -> RevisionOp:
    return RevisionOp(flavor or g.rng.choice(("radical", "conservative")), dim or g.rng.choice(DIMS),
                      g.agent(), phi if phi is not None else g.formula(2))


def _run_comprehension(m, chk, g, spec):
    for flavor in ("radical", "conservative"):
        for dim in DIMS:
            op = _random_op(g, flavor, dim)
            yield Check("comprehension", bad=transform_mismatch(m, op, chk), kind="transform",
                        detail=render(op))


def _run_success(m, chk, g, spec):
    for _ in range(max(1, spec.instances // 5)):
        i = g.agent()
        a = g.prop(2)
        e = Eq(i)
        B, SB, D, SD = (lambda f, k=k: Attitude(k, i, (f,)) for k in ("B", "SB", "D", "SD"))
        op = lambda fl, dim: RevisionOp(fl, dim, i, a)  # noqa: E731
        yield Check("rad-success-B", Implies(Diamond(e, a), DynBox(op("radical", "P"), And(B(a), SB(a)))))
        yield Check("rad-success-D", Implies(Diamond(e, Not(a)), DynBox(op("radical", "D"), And(D(a), SD(a)))))
        yield Check("rad-strength-B", DynBox(op("radical", "P"), Implies(B(a), SB(a))))
        yield Check("rad-strength-D", DynBox(op("radical", "D"), Implies(D(a), SD(a))))
        yield Check("con-success-B", Implies(Not(Attitude("CB", i, (a, Bot()))), DynBox(op("conservative", "P"), B(a))))
        yield Check("con-success-D", Implies(Not(Attitude("CD", i, (a, Top()))), DynBox(op("conservative", "D"), D(a))))


def _run_reduction(m, chk, g, spec):
    for _ in range(2):
        f = g.dynamic_formula(min(spec.depth, 3), 2)
        r = reduce(f)
        if has_dynamic(r):
            yield Check("reduce-static", bad=m.full, detail=render(f))
        yield Check("reduce-equiv", Iff(f, r))


def _run_negative(m, chk, g, spec):
    for f in _instances("BeliefTruth", g, spec.instances, _sub_depth(spec)):
        yield Check("belief-truth", f)


def _run_roundtrip(m, chk, g, spec):
    yield Check("rank-roundtrip", bad=0 if rank_relation_roundtrip(m) else m.full, kind="roundtrip")


SUITES: dict = {s.name: s for s in (
    Suite("dlca-axioms", _run_dlca, description="18 DLCA axiom schemas plus necessitation per model"),
    Suite("dlcag-axioms", _suite_schemas(DLCAG_SCHEMAS), choices=True, description="MostAct, LeastAct, SIC"),
    Suite("wf-axioms", _suite_schemas(WF_SCHEMAS), description="CWF and WF"),
    Suite("attitude-encodings", _run_encodings, description="native attitudes vs program encodings"),
    Suite("known-validities", _run_known_validities, description="bridges, D monotony, totality, D/Ppes"),
    Suite("finite-deviation", _run_finite, description="consistency of belief and desire on finite cells"),
    Suite("wt-bridge", _run_wt, description="wishful thinking bridge"),
    Suite("rationality", _run_rationality, choices=True, description="rationality lemma and Nash characterisation"),
    Suite("transform-comprehension", _run_comprehension, description="revised orders vs set comprehension"),
    Suite("revision-success", _run_success, description="success and strengthening for propositional inputs"),
    Suite("reduction", _run_reduction, description="reduce vs semantic revision"),
    Suite("negative-controls", _run_negative, description="B_i phi -> phi, expected to fail"),
    Suite("rank-roundtrip", _run_roundtrip, description="ranks rebuilt from induced orders"),
)}


# ---------------------------------------------------------------- harness


@dataclass
class FuzzReport:
    suite: str
    seed: int
    models: int
    checks: int = 0
    failures: list = field(default_factory=list)
    failure_count: int = 0
    by_check: dict = field(default_factory=dict)  # label -> number of checks
    elapsed: float = 0.0

    @property
    def ok(self) -> bool:
        return self.failure_count == 0

    def to_dict(self) -> dict:
        return {
            "version": 1,
            "suite": self.suite,
            "seed": self.seed,
            "models": self.models,
            "checks": self.checks,
            "failure_count": self.failure_count,
            "by_check": dict(sorted(self.by_check.items())),
            "failures": self.failures,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _fuzz_one(suite: Suite, k: int, spec: GenSpec):
    mseed = derive_seed(suite.name, spec.seed, k)
    mspec = spec.replace(seed=mseed, with_choices=suite.choices or spec.with_choices)
    m = gen_model(mspec)
    chk = Checker(m, dynamic=True)
    g = FormulaGen.for_model(random.Random(derive_seed("formulas", mseed)), m)
    counts: dict = {}
    found = []
    checkers = {id(m): chk}
    for c in suite.run(m, chk, g, mspec):
        counts[c.label] = counts.get(c.label, 0) + 1
        target = c.model or m
        if c.bad is None:
            ck = checkers.get(id(target))
            if ck is None:
                ck = checkers[id(target)] = Checker(target, dynamic=True)
            bad = target.full & ~ck.truth(c.formula)
        else:
            bad = c.bad
        if bad:
            w = target.world_ids[(bad & -bad).bit_length() - 1]
            found.append((k, mseed, target, w, c))
    return counts, found


def fuzz_validities(suite_id: str, n_models: int, spec: Optional[GenSpec] = None,
                    out_dir=None, max_failures: int = 100, workers: int = 1) -> FuzzReport:
    """Run a registered suite over ``n_models`` generated models.

    Model ``k`` uses a seed derived from the suite, ``spec.seed`` and ``k``,
    so results do not depend on ``workers``.
    """
    try:
        suite = SUITES[suite_id]
    except KeyError:
        raise KeyError(f"unknown suite {suite_id!r}; known: {', '.join(SUITES)}") from None
    spec = spec or GenSpec()
    start = time.perf_counter()
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(workers) as ex:
            results = list(ex.map(_fuzz_one, [suite] * n_models, range(n_models), [spec] * n_models))
    else:
        results = [_fuzz_one(suite, k, spec) for k in range(n_models)]
    rep = FuzzReport(suite_id, spec.seed, n_models)
    out = Path(out_dir) if out_dir is not None else None
    written: dict = {}
    for counts, found in results:
        for label, c in counts.items():
            rep.checks += c
            rep.by_check[label] = rep.by_check.get(label, 0) + c
        for k, mseed, target, w, c in found:
            rep.failure_count += 1
            if len(rep.failures) >= max_failures:
                continue
            path = None
            if out is not None:
                key = dumps_model(target)
                path = written.get(key)
                if path is None:
                    out.mkdir(parents=True, exist_ok=True)
                    path = str(out / f"{suite_id}-m{k}-{len(written)}.json")
                    save_model(target, path)
                    written[key] = path
            rec = {"model_file": path, "world": w, "check": c.label, "kind": c.kind,
                   "model": k, "model_seed": mseed,
                   "formula": render(c.formula) if c.formula is not None else c.detail}
            rep.failures.append(rec)
    rep.elapsed = time.perf_counter() - start
    return rep


def replay_failure(rec: dict, m: Optional[Model] = None) -> bool:
    """Rerun a recorded failure; True when it still fails."""
    m = m or load_model(rec["model_file"])
    kind = rec.get("kind", "formula")
    if kind == "formula":
        f = parse_formula(rec["formula"])
        return not Checker(m, dynamic=True).holds(rec["world"], f)
    if kind == "transform":
        op = parse_formula(f"[{rec['formula']}] true").op
        bad = transform_mismatch(m, op)
        return bool(bad >> m.index[rec["world"]] & 1)
    if kind == "roundtrip":
        return not rank_relation_roundtrip(m)
    raise ValueError(f"unknown failure kind {kind!r}")
