"""Hypothesis generators for terms, values and types."""

from __future__ import annotations

from hypothesis import strategies as st

from systemfr.syntax import (
    App, EitherMatch, Fls, Fold, Fst, If, Inl, Inr, Lam, Let, Match, Pair, Size, Snd, Succ,
    TBool, TNat, TSum, TUnit, Tru, Unit, Var, Zero, bind, build_nat, list_n, refine,
    stream_n, times,
)

NAMES = ("x", "y", "z")

nats = st.integers(min_value=0, max_value=4).map(build_nat)

atoms = st.sampled_from([Zero(), Unit(), Tru(), Fls()]) | nats


def _const_lam(v):
    return Lam(None, bind("u", v))


values = st.recursive(
    atoms,
    lambda inner: st.one_of(
        inner.map(Succ),
        inner.map(lambda v: Fold(None, v)),
        inner.map(Inl),
        inner.map(Inr),
        st.tuples(inner, inner).map(lambda p: Pair(*p)),
        inner.map(_const_lam),
    ),
    max_leaves=6,
)


def open_terms(names: tuple[str, ...] = ()):
    """Terms whose free variables are drawn from `names`."""
    leaves = atoms | st.sampled_from([Var(x) for x in names]) if names else atoms

    def extend(inner):
        binder = st.sampled_from(NAMES)
        return st.one_of(
            st.tuples(inner, inner).map(lambda p: App(*p)),
            st.tuples(inner, inner).map(lambda p: Pair(*p)),
            inner.map(Fst), inner.map(Snd), inner.map(Succ), inner.map(Inl),
            inner.map(Inr), inner.map(Size), inner.map(lambda t: Fold(None, t)),
            st.tuples(inner, inner, inner).map(lambda p: If(*p)),
            st.tuples(binder, inner).map(lambda p: Lam(None, bind(p[0], p[1]))),
            st.tuples(inner, binder, inner).map(lambda p: Let(p[0], bind(p[1], p[2]))),
            st.tuples(inner, inner, binder, inner).map(
                lambda p: Match(p[0], p[1], bind(p[2], p[3]))),
            st.tuples(inner, binder, inner, inner).map(
                lambda p: EitherMatch(p[0], bind(p[1], p[2]), bind(p[1], p[3]))),
        )

    return st.recursive(leaves, extend, max_leaves=8)


closed_terms = open_terms()

# types whose bounded denotation is enumerable
base_types = st.sampled_from([TUnit(), TBool(), TNat()])

enumerable_types = st.recursive(
    base_types,
    lambda inner: st.one_of(
        st.tuples(inner, inner).map(lambda p: TSum(*p)),
        st.tuples(inner, inner).map(lambda p: times(*p)),
    ),
    max_leaves=3,
)

list_indices = st.integers(min_value=0, max_value=3)


def encode_list(items) -> Fold:
    out = Fold(None, Inl(Unit()))
    for n in reversed(items):
        out = Fold(None, Inr(Pair(build_nat(n), out)))
    return out


lists = st.lists(st.integers(min_value=0, max_value=2), max_size=3)
