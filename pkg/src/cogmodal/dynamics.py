"""Belief and desire revision: model transforms and the reduction rewriter.

Radical revision by ``f`` lifts every ``f``-world of the agent's cell strictly
above every other world, keeping the old order inside both tiers.
Conservative belief revision promotes only the most plausible ``f``-worlds to
a fresh top rank; conservative desire revision demotes only the least
desirable ``!f``-worlds to a fresh bottom rank. Ranks are renumbered densely
from 0 inside each cell afterwards.

:func:`reduce` removes dynamic operators syntactically, innermost first, by
pushing each operator through Boolean structure and boxes, where the program
is rewritten by :func:`f_transform`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .checker import session
from .model import Model
from .syntax import (
    And, Atom, Attitude, Bot, Box, Conv, Diamond, DynBox, DynamicOperatorError, Eq,
    Formula, Iff, Implies, Inter, Le, Nle, Nominal, Not, Or, Play, Program, RevisionOp,
    Seq, Test, Top, Union_, encode_attitude, gt, has_dynamic, lt, map_children,
    parse_formula, seq, union,
)

DEFAULT_NODE_BUDGET = 10**6


class RewriteBudgetError(RuntimeError):
    pass


@dataclass(frozen=True)
class TransformResult:
    model: Model
    changed_agent: str
    dim: str
    # cell label -> {world id: (old rank, new rank)}
    normalization_log: dict


def _dense(worlds: list, ranks: dict, offset: int = 0) -> dict:
    levels = sorted({ranks[w] for w in worlds})
    pos = {r: k for k, r in enumerate(levels)}
    return {w: offset + pos[ranks[w]] for w in worlds}


def revise_mask(m: Model, flavor: str, agent: str, dim: str, mask: int) -> TransformResult:
    """Revise ``agent``'s ``dim`` ordering by the world set ``mask``."""
    old = dict(zip(m.world_ids, m.ranks(agent, dim)))
    ids = m.world_ids
    new: dict = {}
    log: dict = {}
    for cell in m.cells(agent):
        members = [k for k in range(m.n) if cell >> k & 1]
        ws = [ids[k] for k in members]
        inside = [ids[k] for k in members if mask >> k & 1]
        if flavor == "radical":
            lower = [w for w in ws if w not in inside]
            ranked = _dense(lower, old)
            ranked.update(_dense(inside, old, len(set(ranked.values()))))
        elif dim == "P":
            top = {w for w in inside if all(old[u] <= old[w] for u in inside)}
            rest = [w for w in ws if w not in top]
            ranked = _dense(rest, old)
            height = len(set(ranked.values()))
            ranked.update({w: height for w in top})
        else:
            outside = [w for w in ws if w not in inside]
            bottom = {w for w in outside if all(old[w] <= old[u] for u in outside)}
            rest = [w for w in ws if w not in bottom]
            ranked = _dense(rest, old, 1 if bottom else 0)
            ranked.update({w: 0 for w in bottom})
        new.update(ranked)
        label = m.worlds[members[0]].state(agent).cell
        log[label] = {w: (old[w], ranked[w]) for w in ws}
    return TransformResult(m.with_ranks(agent, dim, new), agent, dim, log)


def _revise(flavor, m, i, dim, f) -> TransformResult:
    f = parse_formula(f) if isinstance(f, str) else f
    if has_dynamic(f):
        raise DynamicOperatorError("revision input must be static; reduce it first")
    return revise_mask(m, flavor, i, dim, session(m).truth(f))


def radical_revise(m: Model, i: str, dim: str, f: Union[str, Formula]) -> TransformResult:
    return _revise("radical", m, i, dim, f)


def conservative_revise(m: Model, i: str, dim: str, f: Union[str, Formula]) -> TransformResult:
    return _revise("conservative", m, i, dim, f)


def apply_op(m: Model, op: RevisionOp) -> TransformResult:
    return _revise(op.flavor, m, op.agent, op.dim, op.input)


# ---------------------------------------------------------------- rewriting


def _guard(op: RevisionOp) -> Formula:
    """Formula true exactly at the worlds that change tier under ``op``."""
    i, phi = op.agent, op.input
    if op.flavor == "radical":
        return phi
    if op.dim == "P":
        return And(phi, Box(lt(i, "P"), Not(phi)))
    return And(Not(phi), Box(gt(i, "D"), phi))


def f_transform(op: RevisionOp, p: Program, push=None) -> Program:
    """Program over the old model denoting ``p``'s relation after ``op``.

    Tests ``?(psi)`` become ``?([op]psi)``, or ``?(push(psi))`` when a pusher
    is supplied (as :func:`reduce` does).
    """
    i, dim = op.agent, op.dim

    def go(q: Program) -> Program:
        t = type(q)
        if t is Le or t is Nle:
            if q.agent != i or q.dim != dim:
                return q
            g = _guard(op)
            ng = Not(g)
            # order: (inside;rel;inside) | (outside;rel;outside) | (lower tier;eq;upper tier)
            if op.flavor == "conservative" and dim == "D":
                lo, hi = g, ng  # demoted worlds sit below everything else
            else:
                lo, hi = ng, g
            if t is Nle:
                lo, hi = hi, lo
            return union(seq(Test(g), q, Test(g)), seq(Test(ng), q, Test(ng)),
                         seq(Test(lo), Eq(i), Test(hi)))
        if t is Eq:
            return q
        if t is Test:
            return Test(push(q.formula) if push else DynBox(op, q.formula))
        if t is Conv:
            return Conv(go(q.arg))
        if t in (Seq, Union_, Inter):
            return t(go(q.left), go(q.right))
        raise TypeError(f"not a program: {q!r}")

    return go(p)


def reduce(f: Union[str, Formula], budget: int = DEFAULT_NODE_BUDGET) -> Formula:
    """Equivalent formula without dynamic operators.

    Dynamic operators are eliminated innermost first: revision inputs and the
    operator's scope are reduced before the operator itself is pushed inwards.
    Attitudes are expanded to programs only where an operator meets them.
    """
    f = parse_formula(f) if isinstance(f, str) else f
    red_memo: dict = {}
    push_memo: dict = {}

    def red(n):
        try:
            return red_memo[n]
        except KeyError:
            pass
        if isinstance(n, DynBox):
            op = n.op
            op = RevisionOp(op.flavor, op.dim, op.agent, red(op.input))
            out = push(op, red(n.body))
        else:
            out = map_children(n, red)
        if out.size > budget:
            raise RewriteBudgetError(f"rewritten formula exceeds {budget} nodes")
        red_memo[n] = out
        return out

    def push(op: RevisionOp, g: Formula) -> Formula:
        key = (op, g)
        try:
            return push_memo[key]
        except KeyError:
            pass
        t = type(g)
        if t in (Top, Bot, Atom, Nominal, Play):
            out = g
        elif t is Not:
            out = Not(push(op, g.arg))
        elif t in (And, Or, Implies, Iff):
            out = t(push(op, g.left), push(op, g.right))
        elif t is Box or t is Diamond:
            out = t(f_transform(op, g.program, lambda h: push(op, h)), push(op, g.body))
        elif t is Attitude:
            args = tuple(g.args)
            out = push(op, encode_attitude(Attitude(g.kind, g.agent, args, g.strict)))
        else:
            raise TypeError(f"cannot push a revision through {g!r}")
        if out.size > budget:
            raise RewriteBudgetError(f"rewritten formula exceeds {budget} nodes")
        push_memo[key] = out
        return out

    return red(f)
