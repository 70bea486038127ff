"""Deterministic sample sets for the reducibility agreement suites."""

from __future__ import annotations

import itertools

from systemfr.reducibility import (
    Budget, EMPTY, FiniteCandidate, Interpretation, TypeCandidate, Verdict, in_red_values, values,
)
from systemfr.sexpr import parse_term
from systemfr.syntax import (
    Err, Fix, Fls, Fold, Inl, Inr, Lam, Match, Pair, TBool, TNat, TSum, TUnit, TVar, Tru, Unit,
    Var, Zero, arrow, bind, build_nat, forall, list_n, refine, stream_n, substitute_type, times,
)

from .strategies import encode_list

LOOP = parse_term("(fix y (app y unit))")


def thunk(t):
    return Lam(None, bind("u", t))


def all_lists(max_len: int = 3, max_item: int = 2):
    for k in range(max_len + 1):
        yield from (list(p) for p in itertools.product(range(max_item + 1), repeat=k))


def stream_prefix(heads, tail):
    """fold(pair(h1, () => ... fold(pair(hk, () => tail))))"""
    out = tail
    for h in reversed(heads):
        out = Fold(None, Pair(build_nat(h), thunk(out)))
    return out


def stream_samples(constant_stream):
    """Streams that agree with a constant stream for a while, then go wrong."""
    tails = (constant_stream, Err(), Zero(), LOOP, Fold(None, Zero()))
    out = [constant_stream]
    for k in range(4):
        for heads in itertools.product((0, 1), repeat=k):
            for tail in tails:
                if k == 0 and tail is not constant_stream:
                    continue
                out.append(stream_prefix(list(heads), tail))
    # a finite prefix ending in a non-thunk second component
    out += [Fold(None, Pair(Zero(), Zero())), Fold(None, Zero()), Zero()]
    return out


POOL = [
    Unit(), Tru(), Fls(), *(build_nat(k) for k in range(6)),
    Inl(Unit()), Inr(Zero()), Inl(Tru()), Inr(Pair(Zero(), Tru())),
    Pair(Zero(), Fls()), Pair(Unit(), Unit()), Pair(Tru(), build_nat(2)),
    thunk(Zero()), thunk(Tru()), thunk(Unit()), thunk(Err()), thunk(LOOP),
    Lam(None, bind("b", Var("b"))),
    encode_list([]), encode_list([1]), Fold(None, Zero()),
]

ALPHA = TVar("a")
T1 = [
    ALPHA, TSum(TUnit(), ALPHA), times(ALPHA, TBool()), times(TNat(), ALPHA),
    arrow(TUnit(), ALPHA), arrow(TBool(), ALPHA), TSum(ALPHA, times(ALPHA, ALPHA)),
    arrow(TUnit(), TSum(ALPHA, TNat())),
]
T2 = [TUnit(), TBool(), TNat(), TSum(TUnit(), TBool()), times(TBool(), TBool()), list_n(build_nat(1))]
FINITE_T2 = (TUnit(), TBool(), TSum(TUnit(), TBool()), times(TBool(), TBool()))


def disagree(a: Verdict, b: Verdict) -> bool:
    return {a, b} == {Verdict.YES, Verdict.NO}


def substitution_verdicts(v, t1, t2, b: Budget):
    """Membership after substituting versus under the interpretation; each pair must agree."""
    direct = in_red_values(v, substitute_type(t1, "a", t2), EMPTY, b)
    out = [(direct, in_red_values(v, t1, Interpretation.of({"a": TypeCandidate(t2, EMPTY)}), b))]
    if t2 in FINITE_T2:
        c = FiniteCandidate.of(*values(t2, EMPTY, b))
        out.append((direct, in_red_values(v, t1, Interpretation.of({"a": c}), b)))
    return out


def substitution_samples(b: Budget):
    """Members of each instantiated type plus the shared pool of near misses."""
    for t1, t2 in itertools.product(T1, T2):
        members = values(substitute_type(t1, "a", t2), EMPTY, b) or []
        for v in members[:3] + POOL[::3]:
            yield v, t1, t2


def _is_zero(x):
    return Match(Var(x), Tru(), bind("m", Fls()))


TAU2 = [
    list_n(Var("x")),
    stream_n(Var("x"), TNat()),
    refine("y", TNat(), _is_zero("x")),
    TSum(TUnit(), list_n(Var("x"))),
    times(TNat(), list_n(Var("x"))),
]


def _tau(alpha_image):
    return times(TNat(), arrow(TUnit(), alpha_image))


def distribute_verdicts(v, t2, b: Budget):
    outside = in_red_values(v, _tau(forall("x", TNat(), t2)), EMPTY, b)
    inside = in_red_values(v, forall("x", TNat(), _tau(t2)), EMPTY, b)
    return outside, inside


def distribute_samples(constant_stream):
    inner = [
        encode_list([]), encode_list([0]), encode_list([1, 2]), Fold(None, Zero()),
        Fold(None, Inr(Pair(Zero(), Zero()))), constant_stream,
        stream_prefix([0], Err()), Zero(), build_nat(1), Unit(), Inl(Unit()),
        Inr(encode_list([])), Pair(Zero(), encode_list([2])), Err(), LOOP,
    ]
    for t2 in TAU2:
        for n, w in itertools.product((0, 2), inner):
            yield Pair(build_nat(n), thunk(w)), t2
        yield Zero(), t2
        yield Pair(Zero(), Zero()), t2
