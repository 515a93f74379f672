"""Hypothesis strategies for ASTs and generated models."""

from __future__ import annotations

import random

from hypothesis import strategies as st

from cogmodal.genfuzz import FormulaGen, GenSpec, gen_model
from cogmodal.syntax import (
    ATTITUDE_KINDS, PREF_KINDS, And, Atom, Attitude, Bot, Box, Conv, Diamond, DynBox, Eq,
    Iff, Implies, Inter, Le, Nle, Nominal, Not, Or, Play, RevisionOp, Seq, Test, Top, Union_,
)

agents = st.sampled_from(["1", "2", "a"])
dims = st.sampled_from(["P", "D"])

leaves = st.one_of(
    st.just(Top()), st.just(Bot()),
    st.sampled_from(["p", "q", "lo1", "co"]).map(Atom),
    st.sampled_from(["x1", "w2"]).map(Nominal),
    st.builds(Play, agents, st.sampled_from(["C", "S"])),
)


def _programs(formulas):
    base = st.one_of(st.builds(Eq, agents), st.builds(Le, agents, dims), st.builds(Nle, agents, dims))
    return st.recursive(base, lambda p: st.one_of(
        st.builds(Seq, p, p), st.builds(Union_, p, p), st.builds(Inter, p, p),
        st.builds(Conv, p), st.builds(Test, formulas),
    ), max_leaves=4)


def _attitude(f):
    @st.composite
    def build(draw):
        kind = draw(st.sampled_from(ATTITUDE_KINDS))
        i = draw(agents)
        if kind in ("CB", "CD"):
            return Attitude(kind, i, (draw(f), draw(f)))
        if kind in PREF_KINDS and draw(st.booleans()):
            return Attitude(kind, i, (draw(f), draw(f)), draw(st.booleans()))
        return Attitude(kind, i, (draw(f),))
    return build()


def _extend(f):
    p = _programs(leaves)
    op = st.builds(RevisionOp, st.sampled_from(["radical", "conservative"]), dims, agents, f)
    return st.one_of(
        st.builds(Not, f),
        st.builds(And, f, f), st.builds(Or, f, f), st.builds(Implies, f, f), st.builds(Iff, f, f),
        st.builds(Box, p, f), st.builds(Diamond, p, f),
        _attitude(f),
        st.builds(DynBox, op, f),
    )


formulas = st.recursive(leaves, _extend, max_leaves=8)
programs = _programs(formulas)


@st.composite
def models(draw, choices: bool = False, **kw):
    seed = draw(st.integers(0, 2**63 - 1))
    return gen_model(GenSpec(seed=seed, with_choices=choices, **kw))


@st.composite
def model_and_gen(draw, choices: bool = False, **kw):
    """A generated model and a formula generator over its vocabulary."""
    m = draw(models(choices, **kw))
    rng = random.Random(draw(st.integers(0, 2**32)))
    return m, FormulaGen.for_model(rng, m)
