"""Truth evaluation on finite cognitive models.

Worlds are numbered by position; world sets are int bitmasks and a relation
is a tuple of successor bitmasks, one per world. A :class:`Checker` is one
checking session over a single model: it memoises relations per program and
truth sets per formula.

Attitudes are evaluated directly from their set-theoretic definitions (best
and worst worlds of an information cell, quantifier conditions on ranks). The
program encodings in :func:`cogmodal.syntax.expand_attitudes` are an
independent route to the same truth values and serve as the test oracle.
"""

from __future__ import annotations

import sys
from functools import lru_cache
from typing import Optional, Union

from .model import Model, UnknownAgentError, relation_rows, rows_to_pairs
from .syntax import (
    And, Atom, Attitude, Bot, Box, Conv, Diamond, DynBox, Eq, Formula, Iff, Implies,
    Inter, Le, Nle, Node, Nominal, Not, Or, Play, Program, Seq, Test, Top, Union_,
    DynamicOperatorError, parse_formula, parse_program, walk,
)

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))


class VocabularyError(ValueError):
    """Formula mentions an agent or action the model does not declare."""


def _formula(f: Union[str, Formula]) -> Formula:
    return parse_formula(f) if isinstance(f, str) else f


def _program(p: Union[str, Program]) -> Program:
    return parse_program(p) if isinstance(p, str) else p


def _bits(mask: int):
    k = 0
    while mask:
        if mask & 1:
            yield k
        mask >>= 1
        k += 1


def check_vocabulary(m: Model, f: Node) -> None:
    """Reject unknown agents and actions before evaluation (atoms are closed-world)."""
    for n in walk(f):
        agent = getattr(n, "agent", None)
        if isinstance(n, DynBox):
            agent = n.op.agent
        if agent is not None and agent not in m.agents:
            raise VocabularyError(f"unknown agent {agent!r} in {n}")
        if isinstance(n, Play):
            if m.actions is None:
                raise VocabularyError(f"{n} needs a model with choices")
            if n.action not in m.actions:
                raise VocabularyError(f"unknown action {n.action!r} in {n}")


class Checker:
    """A model-checking session with per-program and per-formula memo tables.

    With ``dynamic=True`` dynamic operators are evaluated semantically, by
    revising the model and evaluating the body on the result.
    """

    def __init__(self, model: Model, dynamic: bool = False):
        self.m = model
        self.dynamic = dynamic
        self._rel: dict = {}
        self._truth: dict = {}
        self._sub: dict = {}

    # ------------------------------------------------------------ relations

    def rows(self, p: Program) -> tuple:
        try:
            return self._rel[p]
        except KeyError:
            pass
        n = self.m.n
        t = type(p)
        if t in (Eq, Le, Nle):
            out = relation_rows(self.m, p)
        elif t is Seq:
            a, b = self.rows(p.left), self.rows(p.right)
            out = []
            for row in a:
                acc = 0
                for v in _bits(row):
                    acc |= b[v]
                out.append(acc)
            out = tuple(out)
        elif t is Union_:
            a, b = self.rows(p.left), self.rows(p.right)
            out = tuple(x | y for x, y in zip(a, b))
        elif t is Inter:
            a, b = self.rows(p.left), self.rows(p.right)
            out = tuple(x & y for x, y in zip(a, b))
        elif t is Conv:
            a = self.rows(p.arg)
            out = [0] * n
            for w, row in enumerate(a):
                for v in _bits(row):
                    out[v] |= 1 << w
            out = tuple(out)
        elif t is Test:
            tm = self.truth(p.formula)
            out = tuple((1 << w) if tm >> w & 1 else 0 for w in range(n))
        else:
            raise TypeError(f"not a program: {p!r}")
        self._rel[p] = out
        return out

    def rel(self, p: Union[str, Program]) -> frozenset:
        return rows_to_pairs(self.m, self.rows(_program(p)))

    # ------------------------------------------------------------ formulas

    def truth(self, f: Formula) -> int:
        """Bitmask of the worlds satisfying ``f``."""
        try:
            return self._truth[f]
        except KeyError:
            pass
        m = self.m
        t = type(f)
        if t is Atom:
            out = m.atom_mask(f.name)
        elif t is Not:
            out = m.full & ~self.truth(f.arg)
        elif t is And:
            out = self.truth(f.left) & self.truth(f.right)
        elif t is Box or t is Diamond:
            rows = self.rows(f.program)
            body = self.truth(f.body)
            if t is Box:
                bad = m.full & ~body
                out = 0
                for w, row in enumerate(rows):
                    if not row & bad:
                        out |= 1 << w
            else:
                out = 0
                for w, row in enumerate(rows):
                    if row & body:
                        out |= 1 << w
        elif t is Or:
            out = self.truth(f.left) | self.truth(f.right)
        elif t is Implies:
            out = (m.full & ~self.truth(f.left)) | self.truth(f.right)
        elif t is Iff:
            out = m.full & ~(self.truth(f.left) ^ self.truth(f.right))
        elif t is Top:
            out = m.full
        elif t is Bot:
            out = 0
        elif t is Nominal:
            out = m.nominal_mask(f.name)
        elif t is Play:
            if m.actions is None or f.action not in m.actions:
                raise VocabularyError(f"{f}: model declares actions {m.actions}")
            out = 0
            for w, c in enumerate(m.choices(f.agent)):
                if c == f.action:
                    out |= 1 << w
        elif t is Attitude:
            out = self._attitude(f)
        elif t is DynBox:
            if not self.dynamic:
                raise DynamicOperatorError("static checker cannot evaluate dynamic operators; reduce first")
            out = self._dynamic(f)
        else:
            raise TypeError(f"not a formula: {f!r}")
        self._truth[f] = out
        return out

    def holds(self, w: str, f: Union[str, Formula]) -> bool:
        return bool(self.truth(_formula(f)) >> self.m.index[w] & 1)

    def truth_set(self, f: Union[str, Formula]) -> frozenset:
        return self.m.world_set(self.truth(_formula(f)))

    def valid(self, f: Union[str, Formula]) -> bool:
        return self.truth(_formula(f)) == self.m.full

    def _dynamic(self, f: DynBox) -> int:
        from .dynamics import revise_mask

        op = f.op
        key = (op, )
        sub = self._sub.get(key)
        if sub is None:
            new = revise_mask(self.m, op.flavor, op.agent, op.dim, self.truth(op.input)).model
            sub = self._sub[key] = Checker(new, dynamic=True)
        return sub.truth(f.body)

    # ------------------------------------------------------------ attitudes

    def best(self, agent: str, dim: str, cell: int, cond: Optional[int] = None) -> int:
        """Maximal-rank worlds of ``cell`` (restricted to ``cond``)."""
        s = cell if cond is None else cell & cond
        r = self.m.ranks(agent, dim)
        out = 0
        for v in _bits(s):
            if all(r[u] <= r[v] for u in _bits(s)):
                out |= 1 << v
        return out

    def worst(self, agent: str, dim: str, cell: int, cond: Optional[int] = None) -> int:
        """Minimal-rank worlds of ``cell`` (restricted to ``cond``)."""
        s = cell if cond is None else cell & cond
        r = self.m.ranks(agent, dim)
        out = 0
        for v in _bits(s):
            if all(r[v] <= r[u] for u in _bits(s)):
                out |= 1 << v
        return out

    def _attitude(self, a: Attitude) -> int:
        i = a.agent
        args = [self.truth(x) for x in a.args]
        out = 0
        for cell in self.m.cells(i):
            if self._attitude_in_cell(a, i, cell, args):
                out |= cell
        return out

    def _attitude_in_cell(self, a: Attitude, i: str, cell: int, args: list) -> bool:
        kind = a.kind
        full = self.m.full
        if kind == "B":
            return not self.best(i, "P", cell) & ~args[0]
        if kind == "CB":
            psi, phi = args
            return not self.best(i, "P", cell, psi) & ~phi
        if kind == "D":
            return not self.worst(i, "D", cell) & args[0]
        if kind == "CD":
            psi, phi = args
            return not self.worst(i, "D", cell, full & ~psi) & phi
        if kind in ("SB", "SD"):
            r = self.m.ranks(i, "P" if kind == "SB" else "D")
            yes, no = cell & args[0], cell & ~args[0]
            return all(r[u] < r[v] for v in _bits(yes) for u in _bits(no))
        # preference family
        if len(args) == 1:
            # monadic: phi strictly better than not-phi
            phi = args[0]
            return not self._weak_pref(kind, i, cell, phi, full & ~phi)
        worse, better = args
        if a.strict:
            return not self._weak_pref(kind, i, cell, better, worse)
        return self._weak_pref(kind, i, cell, worse, better)

    def _weak_pref(self, kind: str, i: str, cell: int, worse: int, better: int) -> bool:
        """``better`` is at least as good as ``worse`` for ``i`` within ``cell``."""
        scope = self.best(i, "P", cell) if kind.startswith("R") else cell
        rd = self.m.ranks(i, "D")
        low, high = scope & worse, scope & better
        if kind.endswith("opt"):
            return all(any(rd[u] <= rd[v] for v in _bits(high)) for u in _bits(low))
        return all(any(rd[u] <= rd[v] for u in _bits(low)) for v in _bits(high))

    def wishful_thinking(self, i: str) -> bool:
        for cell in self.m.cells(i):
            bp = self.best(i, "P", cell)
            if bp & ~self.best(i, "D", cell) and bp & ~self.worst(i, "D", cell):
                return False
        return True


@lru_cache(maxsize=32)
def session(m: Model) -> Checker:
    """Shared static checking session for ``m``."""
    return Checker(m)


# ---------------------------------------------------------------- functional API


def rel(m: Model, p: Union[str, Program]) -> frozenset:
    return session(m).rel(p)


def evaluate(m: Model, w: str, f: Union[str, Formula]) -> bool:
    """Whether static formula ``f`` holds at world ``w`` of ``m``."""
    if w not in m.index:
        raise KeyError(f"unknown world {w!r}")
    return session(m).holds(w, f)


def truth_set(m: Model, f: Union[str, Formula]) -> frozenset:
    return session(m).truth_set(f)


def truth_set_agent(m: Model, i: str, w: str, f: Union[str, Formula]) -> frozenset:
    """Worlds satisfying ``f`` that agent ``i`` cannot tell apart from ``w``."""
    c = session(m)
    return m.world_set(c.truth(_formula(f)) & m.cell_of(i)[m.index[w]])


def valid_on(m: Model, f: Union[str, Formula]) -> bool:
    return session(m).valid(f)


def best_p(m: Model, i: str, w: str, cond: Union[str, Formula, None] = None) -> frozenset:
    c = session(m)
    mask = None if cond is None else c.truth(_formula(cond))
    return m.world_set(c.best(i, "P", m.cell_of(i)[m.index[w]], mask))


def worst_d(m: Model, i: str, w: str, cond: Union[str, Formula, None] = None) -> frozenset:
    c = session(m)
    mask = None if cond is None else c.truth(_formula(cond))
    return m.world_set(c.worst(i, "D", m.cell_of(i)[m.index[w]], mask))


def best_d(m: Model, i: str, w: str) -> frozenset:
    c = session(m)
    return m.world_set(c.best(i, "D", m.cell_of(i)[m.index[w]]))


def _att(m, w, kind, i, args, strict=False) -> bool:
    return evaluate(m, w, Attitude(kind, i, tuple(_formula(x) for x in args), strict))


def believes(m, w, i, phi) -> bool:
    return _att(m, w, "B", i, [phi])


def strong_believes(m, w, i, phi) -> bool:
    return _att(m, w, "SB", i, [phi])


def cond_believes(m, w, i, psi, phi) -> bool:
    """Agent ``i`` would believe ``phi`` on learning ``psi``."""
    return _att(m, w, "CB", i, [psi, phi])


def desires(m, w, i, phi) -> bool:
    return _att(m, w, "D", i, [phi])


def strong_desires(m, w, i, phi) -> bool:
    return _att(m, w, "SD", i, [phi])


def cond_desires(m, w, i, psi, phi) -> bool:
    return _att(m, w, "CD", i, [psi, phi])


def pref(m, w, i, mode: str, worse, better=None, strict: bool = False) -> bool:
    """Optimistic/pessimistic preference; monadic when ``better`` is omitted."""
    kind = "Popt" if mode.lower().startswith("opt") else "Ppes"
    args = [worse] if better is None else [worse, better]
    return _att(m, w, kind, i, args, strict)


def rpref(m, w, i, mode: str, worse, better=None, strict: bool = False) -> bool:
    """Realistic preference: compares only the agent's most plausible worlds."""
    kind = "RPopt" if mode.lower().startswith("opt") else "RPpes"
    args = [worse] if better is None else [worse, better]
    return _att(m, w, kind, i, args, strict)


def check_wt(m: Model, i: str) -> bool:
    """Wishful-thinking constraint for ``i`` at every world."""
    if i not in m.agents:
        raise UnknownAgentError(i)
    return session(m).wishful_thinking(i)
