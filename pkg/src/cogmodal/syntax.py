"""Abstract syntax, concrete surface language, and attitude macro expansion.

Two mutually recursive trees: cognitive programs and formulas. Nodes are
immutable, hashable values with cached hashes so that large rewritten
formulas can be used as memo keys cheaply.

Surface syntax (see ``docs/grammar.md``)::

    programs   eq(i)  le(i,P)  le(i,D)  nle(i,P)  nle(i,D)
               a;b  a|b  a&b  -a  ?(f)         sugar: ge lt gt nge sim
    formulas   true false p @x play(i,a) !f f&g f|g f->g f<->g
               [prog]f  <prog>f  B{i}f  SB{i}f  CB{i}(psi, phi)  D SD CD
               Popt{i}(g <= f)  Popt{i}(g < f)  Popt{i} f   (Ppes RPopt RPpes)
               [radB{i} g]f  [radD{i} g]f  [conB{i} g]f  [conD{i} g]f
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

DIMS = ("P", "D")


class Node:
    """Shared value semantics for AST nodes (cached structural hash)."""

    __slots__ = ()

    def _key(self) -> tuple:
        return tuple(getattr(self, name) for name in self.__dataclass_fields__)

    def __hash__(self) -> int:
        try:
            return self.__dict__["_h"]
        except KeyError:
            h = hash((type(self).__name__,) + self._key())
            self.__dict__["_h"] = h
            return h

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if type(self) is not type(other) or hash(self) != hash(other):
            return False
        return self._key() == other._key()

    def __ne__(self, other) -> bool:
        return not self == other

    def __str__(self) -> str:
        return render(self)

    @property
    def size(self) -> int:
        """Number of tree nodes (formulas and programs), cached."""
        try:
            return self.__dict__["_n"]
        except KeyError:
            n = 1 + sum(c.size for c in _children(self))
            self.__dict__["_n"] = n
            return n


def _node(cls):
    return dataclass(frozen=True, eq=False, repr=True)(cls)


def _children(node: Node) -> Iterator[Node]:
    for name in node.__dataclass_fields__:
        v = getattr(node, name)
        if isinstance(v, Node):
            yield v
        elif isinstance(v, RevisionOp):
            yield v.input
        elif isinstance(v, tuple):
            for x in v:
                if isinstance(x, Node):
                    yield x


# ---------------------------------------------------------------- programs


class Program(Node):
    __slots__ = ()


@_node
class Eq(Program):
    agent: str


@_node
class Le(Program):
    agent: str
    dim: str


@_node
class Nle(Program):
    agent: str
    dim: str


@_node
class Seq(Program):
    left: Program
    right: Program


@_node
class Union_(Program):
    left: Program
    right: Program


@_node
class Inter(Program):
    left: Program
    right: Program


@_node
class Conv(Program):
    arg: Program


@_node
class Test(Program):
    formula: "Formula"


# sugar constructors: they only ever produce core programs


def ge(agent: str, dim: str) -> Program:
    """At most as plausible/desirable as: converse of ``le``."""
    return Conv(Le(agent, dim))


def nge(agent: str, dim: str) -> Program:
    return Conv(Nle(agent, dim))


def gt(agent: str, dim: str) -> Program:
    """Strictly less plausible/desirable than the current world."""
    return Inter(Conv(Le(agent, dim)), Nle(agent, dim))


def lt(agent: str, dim: str) -> Program:
    """Strictly more plausible/desirable than the current world."""
    return Inter(Le(agent, dim), Conv(Nle(agent, dim)))


def sim(agent: str, dim: str) -> Program:
    return Inter(Le(agent, dim), Conv(Le(agent, dim)))


SUGAR = {"ge": ge, "nge": nge, "gt": gt, "lt": lt, "sim": sim}


def seq(*progs: Program) -> Program:
    out = progs[0]
    for p in progs[1:]:
        out = Seq(out, p)
    return out


def union(*progs: Program) -> Program:
    out = progs[0]
    for p in progs[1:]:
        out = Union_(out, p)
    return out


# ---------------------------------------------------------------- formulas


class Formula(Node):
    __slots__ = ()


@_node
class Top(Formula):
    pass


@_node
class Bot(Formula):
    pass


@_node
class Atom(Formula):
    name: str


@_node
class Nominal(Formula):
    name: str


@_node
class Play(Formula):
    agent: str
    action: str


@_node
class Not(Formula):
    arg: Formula


@_node
class And(Formula):
    left: Formula
    right: Formula


@_node
class Or(Formula):
    left: Formula
    right: Formula


@_node
class Implies(Formula):
    left: Formula
    right: Formula


@_node
class Iff(Formula):
    left: Formula
    right: Formula


@_node
class Box(Formula):
    program: Program
    body: Formula


@_node
class Diamond(Formula):
    program: Program
    body: Formula


BELIEF_KINDS = ("B", "SB", "CB")
DESIRE_KINDS = ("D", "SD", "CD")
PREF_KINDS = ("Popt", "Ppes", "RPopt", "RPpes")
ATTITUDE_KINDS = BELIEF_KINDS + DESIRE_KINDS + PREF_KINDS


@_node
class Attitude(Formula):
    """A derived cognitive attitude.

    ``args`` is ``(phi,)`` for B/SB/D/SD and monadic preferences,
    ``(psi, phi)`` for CB/CD (condition first), and ``(worse, better)`` for
    dyadic preferences, so ``Popt{i}(g <= f)`` is ``Attitude("Popt", i, (g, f))``.
    ``strict`` only applies to dyadic preferences.
    """

    kind: str
    agent: str
    args: tuple
    strict: bool = False

    def __post_init__(self):
        if self.kind not in ATTITUDE_KINDS:
            raise ValueError(f"unknown attitude kind {self.kind!r}")
        want = {"CB": 2, "CD": 2}.get(self.kind)
        if self.kind in PREF_KINDS:
            if len(self.args) not in (1, 2):
                raise ValueError(f"{self.kind} takes one or two arguments")
        elif len(self.args) != (want or 1):
            raise ValueError(f"{self.kind} takes {want or 1} argument(s)")
        if self.strict and not (self.kind in PREF_KINDS and len(self.args) == 2):
            raise ValueError("strict applies to dyadic preferences only")


@dataclass(frozen=True)
class RevisionOp:
    flavor: str  # "radical" | "conservative"
    dim: str  # "P" | "D"
    agent: str
    input: Formula

    def __post_init__(self):
        if self.flavor not in ("radical", "conservative"):
            raise ValueError(f"unknown revision flavor {self.flavor!r}")
        if self.dim not in DIMS:
            raise ValueError(f"unknown dimension {self.dim!r}")

    @property
    def keyword(self) -> str:
        return ("rad" if self.flavor == "radical" else "con") + ("B" if self.dim == "P" else "D")


OP_KEYWORDS = {
    "radB": ("radical", "P"),
    "radD": ("radical", "D"),
    "conB": ("conservative", "P"),
    "conD": ("conservative", "D"),
}


@_node
class DynBox(Formula):
    op: RevisionOp
    body: Formula


TRUE = Top()
FALSE = Bot()


def conj(*fs: Formula) -> Formula:
    if not fs:
        return TRUE
    out = fs[0]
    for f in fs[1:]:
        out = And(out, f)
    return out


def disj(*fs: Formula) -> Formula:
    if not fs:
        return FALSE
    out = fs[0]
    for f in fs[1:]:
        out = Or(out, f)
    return out


def walk(node: Node) -> Iterator[Node]:
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(_children(n))


def has_dynamic(f: Node) -> bool:
    return any(isinstance(n, DynBox) for n in walk(f))


def is_propositional(f: Formula) -> bool:
    """True for formulas built from atoms and Boolean connectives only."""
    ok = (Top, Bot, Atom, Not, And, Or, Implies, Iff)
    return all(isinstance(n, ok) for n in walk(f))


# ---------------------------------------------------------------- errors


class ParseError(ValueError):
    def __init__(self, message: str, text: str, pos: int, expected=()):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        self.line, self.column = line, col
        self.expected = tuple(sorted(set(expected)))
        exp = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"line {line}, column {col}: {message}{exp}")


# ---------------------------------------------------------------- lexer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<op><->|->|<=|[\[\]<>(){},;|&!?\-])
  | (?P<nom>@[A-Za-z0-9_]+)
  | (?P<name>[A-Za-z0-9_]+)
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str  # "op" | "nom" | "name" | "eof"
    value: str
    pos: int


def _lex(text: str) -> list[_Tok]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        if m.lastgroup != "ws":
            out.append(_Tok(m.lastgroup, m.group(), pos))
        pos = m.end()
    out.append(_Tok("eof", "", len(text)))
    return out


_PROGRAM_ATOMS = ("eq", "le", "nle")


class _Parser:
    def __init__(self, text: str, core_only: bool = False):
        self.text = text
        self.toks = _lex(text)
        self.i = 0
        self.core_only = core_only

    # token helpers
    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, value: str) -> bool:
        t = self.tok
        return t.kind == "op" and t.value == value

    def fail(self, msg: str, expected=()):
        t = self.tok
        got = "end of input" if t.kind == "eof" else repr(t.value)
        raise ParseError(f"{msg}, got {got}", self.text, t.pos, expected)

    def expect(self, value: str) -> _Tok:
        if not self.at(value):
            self.fail(f"expected {value!r}", [value])
        t = self.tok
        self.i += 1
        return t

    def name(self, what: str) -> str:
        t = self.tok
        if t.kind != "name":
            self.fail(f"expected {what}", [what])
        self.i += 1
        return t.value

    def done(self):
        if self.tok.kind != "eof":
            self.fail("unexpected trailing input", ["end of input"])

    # formulas
    def formula(self) -> Formula:
        left = self.implication()
        while self.at("<->"):
            self.i += 1
            left = Iff(left, self.implication())
        return left

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.at("->"):
            self.i += 1
            return Implies(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self.at("|"):
            self.i += 1
            left = Or(left, self.conjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.unary()
        while self.at("&"):
            self.i += 1
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        t = self.tok
        if self.at("!"):
            self.i += 1
            return Not(self.unary())
        if self.at("["):
            self.i += 1
            nxt = self.tok
            if nxt.kind == "name" and nxt.value in OP_KEYWORDS and self.peek().value == "{":
                self.i += 1
                flavor, dim = OP_KEYWORDS[nxt.value]
                agent = self.braced_agent()
                inp = self.formula()
                self.expect("]")
                return DynBox(RevisionOp(flavor, dim, agent, inp), self.unary())
            prog = self.program()
            self.expect("]")
            return Box(prog, self.unary())
        if self.at("<"):
            self.i += 1
            prog = self.program()
            self.expect(">")
            return Diamond(prog, self.unary())
        if t.kind == "name" and t.value in ATTITUDE_KINDS and self.peek().value == "{":
            return self.attitude()
        return self.primary()

    def braced_agent(self) -> str:
        self.expect("{")
        agent = self.name("agent id")
        self.expect("}")
        return agent

    def attitude(self) -> Formula:
        kind = self.name("attitude")
        agent = self.braced_agent()
        if kind in ("CB", "CD"):
            self.expect("(")
            cond = self.formula()
            self.expect(",")
            body = self.formula()
            self.expect(")")
            return Attitude(kind, agent, (cond, body))
        if kind in PREF_KINDS and self.at("("):
            start = self.i
            self.i += 1
            first = self.formula()
            if self.at("<=") or self.at("<"):
                strict = self.tok.value == "<"
                self.i += 1
                second = self.formula()
                self.expect(")")
                return Attitude(kind, agent, (first, second), strict)
            # parenthesised monadic argument: reparse as an ordinary operand
            self.i = start
        return Attitude(kind, agent, (self.unary(),))

    def primary(self) -> Formula:
        t = self.tok
        if self.at("("):
            self.i += 1
            f = self.formula()
            self.expect(")")
            return f
        if t.kind == "nom":
            self.i += 1
            return Nominal(t.value[1:])
        if t.kind == "name":
            if t.value == "true":
                self.i += 1
                return TRUE
            if t.value == "false":
                self.i += 1
                return FALSE
            if t.value == "play" and self.peek().value == "(":
                self.i += 2
                agent = self.name("agent id")
                self.expect(",")
                action = self.name("action")
                self.expect(")")
                return Play(agent, action)
            self.i += 1
            return Atom(t.value)
        self.fail("expected a formula", ["(", "!", "[", "<", "true", "false", "atom", "@nominal"])

    # programs
    def program(self) -> Program:
        left = self.p_inter()
        while self.at("|"):
            self.i += 1
            left = Union_(left, self.p_inter())
        return left

    def p_inter(self) -> Program:
        left = self.p_seq()
        while self.at("&"):
            self.i += 1
            left = Inter(left, self.p_seq())
        return left

    def p_seq(self) -> Program:
        left = self.p_unary()
        while self.at(";"):
            self.i += 1
            left = Seq(left, self.p_unary())
        return left

    def p_unary(self) -> Program:
        if self.at("-"):
            self.i += 1
            return Conv(self.p_unary())
        if self.at("?"):
            self.i += 1
            self.expect("(")
            f = self.formula()
            self.expect(")")
            return Test(f)
        if self.at("("):
            self.i += 1
            p = self.program()
            self.expect(")")
            return p
        t = self.tok
        if t.kind == "name" and (t.value in _PROGRAM_ATOMS or t.value in SUGAR):
            if t.value in SUGAR and self.core_only:
                self.fail("sugar program not allowed in core-only mode", _PROGRAM_ATOMS)
            self.i += 1
            self.expect("(")
            agent = self.name("agent id")
            if t.value == "eq":
                self.expect(")")
                return Eq(agent)
            self.expect(",")
            dim = self.name("dimension")
            if dim not in DIMS:
                self.i -= 1
                self.fail("dimension must be P or D", DIMS)
            self.expect(")")
            if t.value == "le":
                return Le(agent, dim)
            if t.value == "nle":
                return Nle(agent, dim)
            return SUGAR[t.value](agent, dim)
        self.fail("expected a program", ("eq", "le", "nle", "-", "?", "(") + tuple(SUGAR))


def parse_formula(text: str, core_only: bool = False) -> Formula:
    """Parse the surface syntax of a formula. Sugar programs are desugared."""
    p = _Parser(text, core_only)
    f = p.formula()
    p.done()
    return f


def parse_program(text: str, core_only: bool = False) -> Program:
    p = _Parser(text, core_only)
    prog = p.program()
    p.done()
    return prog


# ---------------------------------------------------------------- rendering

_P_PREC = {Union_: 1, Inter: 2, Seq: 3}
_P_SYM = {Union_: " | ", Inter: " & ", Seq: ";"}
_F_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4}
_F_SYM = {Iff: " <-> ", Implies: " -> ", Or: " | ", And: " & "}


def _render_program(p: Program) -> str:
    if isinstance(p, Eq):
        return f"eq({p.agent})"
    if isinstance(p, Le):
        return f"le({p.agent},{p.dim})"
    if isinstance(p, Nle):
        return f"nle({p.agent},{p.dim})"
    if isinstance(p, Test):
        return f"?({_render_formula(p.formula)})"
    if isinstance(p, Conv):
        inner = _render_program(p.arg)
        return f"-({inner})" if type(p.arg) in _P_PREC else f"-{inner}"
    cls = type(p)
    left = _render_program(p.left)
    right = _render_program(p.right)
    # binary children of a different operator are always bracketed for legibility
    if type(p.left) in _P_PREC and type(p.left) is not cls:
        left = f"({left})"
    if type(p.right) in _P_PREC:
        right = f"({right})"
    return left + _P_SYM[cls] + right


def _operand(f: Formula) -> str:
    s = _render_formula(f)
    return f"({s})" if type(f) in _F_PREC else s


def _render_formula(f: Formula) -> str:
    cls = type(f)
    if cls in _F_PREC:
        prec = _F_PREC[cls]
        left = _render_formula(f.left)
        right = _render_formula(f.right)
        lp = _F_PREC.get(type(f.left), 9)
        rp = _F_PREC.get(type(f.right), 9)
        right_assoc = cls is Implies
        if lp < prec or (lp == prec and right_assoc):
            left = f"({left})"
        if rp < prec or (rp == prec and not right_assoc):
            right = f"({right})"
        return left + _F_SYM[cls] + right
    if cls is Top:
        return "true"
    if cls is Bot:
        return "false"
    if cls is Atom:
        return f.name
    if cls is Nominal:
        return f"@{f.name}"
    if cls is Play:
        return f"play({f.agent},{f.action})"
    if cls is Not:
        return "!" + _operand(f.arg)
    if cls is Box:
        return f"[{_render_program(f.program)}] {_operand(f.body)}"
    if cls is Diamond:
        return f"<{_render_program(f.program)}> {_operand(f.body)}"
    if cls is DynBox:
        op = f.op
        return f"[{op.keyword}{{{op.agent}}} {_render_formula(op.input)}] {_operand(f.body)}"
    if cls is Attitude:
        head = f"{f.kind}{{{f.agent}}}"
        if f.kind in ("CB", "CD"):
            return f"{head}({_render_formula(f.args[0])}, {_render_formula(f.args[1])})"
        if len(f.args) == 2:
            rel = "<" if f.strict else "<="
            return f"{head}({_render_formula(f.args[0])} {rel} {_render_formula(f.args[1])})"
        return f"{head} {_operand(f.args[0])}"
    raise TypeError(f"not a formula: {f!r}")


def render(node: Union[Formula, Program, RevisionOp]) -> str:
    """Render an AST back to surface syntax; ``parse(render(x)) == x``."""
    if isinstance(node, Program):
        return _render_program(node)
    if isinstance(node, RevisionOp):
        return f"{node.keyword}{{{node.agent}}} {_render_formula(node.input)}"
    return _render_formula(node)


# ---------------------------------------------------------------- attitudes


class DynamicOperatorError(ValueError):
    pass


def _best_test(i: str) -> Program:
    return Test(Box(lt(i, "P"), FALSE))


def encode_attitude(a: Attitude) -> Formula:
    """One-step program encoding of an attitude whose arguments are already expanded."""
    kind, i = a.kind, a.agent
    eq = Eq(i)
    if kind == "B":
        return Box(Seq(eq, _best_test(i)), a.args[0])
    if kind == "SB":
        (phi,) = a.args
        return Box(seq(eq, Test(phi), Le(i, "P")), phi)
    if kind == "CB":
        psi, phi = a.args
        return Box(Seq(eq, Test(And(psi, Box(lt(i, "P"), Not(psi))))), phi)
    if kind == "D":
        return Box(Seq(eq, Test(Box(gt(i, "D"), FALSE))), Not(a.args[0]))
    if kind == "SD":
        (phi,) = a.args
        return Box(seq(eq, Test(phi), Le(i, "D")), phi)
    if kind == "CD":
        psi, phi = a.args
        return Box(Seq(eq, Test(And(Not(psi), Box(gt(i, "D"), psi)))), Not(phi))
    # preference family
    if len(a.args) == 1:
        (phi,) = a.args
        return encode_attitude(Attitude(kind, i, (Not(phi), phi), strict=True))
    worse, better = a.args
    if a.strict:
        return Not(encode_attitude(Attitude(kind, i, (better, worse))))
    if kind == "Popt":
        return Box(Seq(eq, Test(worse)), Diamond(Le(i, "D"), better))
    if kind == "Ppes":
        return Box(Seq(eq, Test(better)), Diamond(ge(i, "D"), worse))
    believed = Seq(eq, _best_test(i))
    if kind == "RPopt":
        return Box(seq(eq, _best_test(i), Test(worse)), Diamond(Inter(Le(i, "D"), believed), better))
    if kind == "RPpes":
        return Box(seq(eq, _best_test(i), Test(better)), Diamond(Inter(ge(i, "D"), believed), worse))
    raise AssertionError(kind)


def expand_attitudes(f: Node) -> Node:
    """Replace every attitude by its program encoding, recursively.

    Raises DynamicOperatorError on dynamic operators; reduce them first.
    """
    memo: dict = {}

    def go(n):
        try:
            return memo[n]
        except KeyError:
            pass
        if isinstance(n, DynBox):
            raise DynamicOperatorError("expand_attitudes needs a static formula; call reduce first")
        if isinstance(n, Attitude):
            out = encode_attitude(Attitude(n.kind, n.agent, tuple(go(x) for x in n.args), n.strict))
        else:
            out = map_children(n, go)
        memo[n] = out
        return out

    return go(f)


def map_children(n: Node, fn) -> Node:
    """Rebuild ``n`` with ``fn`` applied to each direct sub-node (identity-preserving)."""
    if isinstance(n, (Top, Bot, Atom, Nominal, Play, Eq, Le, Nle)):
        return n
    if isinstance(n, (Not,)):
        a = fn(n.arg)
        return n if a is n.arg else Not(a)
    if isinstance(n, Conv):
        a = fn(n.arg)
        return n if a is n.arg else Conv(a)
    if isinstance(n, Test):
        a = fn(n.formula)
        return n if a is n.formula else Test(a)
    if isinstance(n, (And, Or, Implies, Iff, Seq, Union_, Inter)):
        l, r = fn(n.left), fn(n.right)
        return n if (l is n.left and r is n.right) else type(n)(l, r)
    if isinstance(n, (Box, Diamond)):
        p, b = fn(n.program), fn(n.body)
        return n if (p is n.program and b is n.body) else type(n)(p, b)
    if isinstance(n, Attitude):
        args = tuple(fn(x) for x in n.args)
        return n if all(a is b for a, b in zip(args, n.args)) else Attitude(n.kind, n.agent, args, n.strict)
    if isinstance(n, DynBox):
        inp, b = fn(n.op.input), fn(n.body)
        if inp is n.op.input and b is n.body:
            return n
        op = n.op
        return DynBox(RevisionOp(op.flavor, op.dim, op.agent, inp), b)
    raise TypeError(f"unknown node {n!r}")


def to_core(f: Node) -> Node:
    """Rewrite Boolean sugar and diamonds into the not/and/box core."""

    def go(n):
        n = map_children(n, go)
        if isinstance(n, Or):
            return Not(And(Not(n.left), Not(n.right)))
        if isinstance(n, Implies):
            return Not(And(n.left, Not(n.right)))
        if isinstance(n, Iff):
            return And(Not(And(n.left, Not(n.right))), Not(And(n.right, Not(n.left))))
        if isinstance(n, Diamond):
            return Not(Box(n.program, Not(n.body)))
        return n

    return go(f)
