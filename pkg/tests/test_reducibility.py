import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from systemfr.checker import Context
from systemfr.reducibility import (
    Budget, EMPTY, FiniteCandidate, Interpretation, Verdict, in_red_terms, in_red_values,
    reducible_open, values,
)
from systemfr.semantics import evaluate
from systemfr.sexpr import parse_term, parse_type
from systemfr.syntax import (
    Err, Fold, Inl, Inr, Pair, Succ, TNat, Unit, Var, Zero, build_nat, erase, list_n, list_type,
    stream_n,
)

from . import samples
from .strategies import encode_list, lists, values as any_values

YES, NO, UNKNOWN = Verdict.YES, Verdict.NO, Verdict.UNKNOWN
T, Ty = parse_term, parse_type


@pytest.fixture(scope="module")
def constant_stream(stdlib_lib):
    t = stdlib_lib.close(parse_term("(app (tapp constant Nat) zero)"))
    return evaluate(erase(t), 10_000).value


def test_numerals_are_nats():
    assert in_red_values(Succ(Zero()), TNat()) is YES
    assert in_red_values(Unit(), TNat()) is NO


def test_empty_list_in_every_list_index():
    for n in range(3):
        assert in_red_values(encode_list([]), list_n(build_nat(n))) is YES
    assert in_red_values(encode_list([]), list_type()) is YES


def test_fold_zero_is_not_a_list_of_size_one():
    assert in_red_values(Fold(None, Zero()), list_n(build_nat(1))) is NO


def test_list_zero_follows_basetype():
    # base case unfolds to Unit + Nat x Top, so it still inspects the top constructor
    assert in_red_values(Fold(None, Zero()), list_n(Zero())) is NO
    junk = Fold(None, Inr(Pair(Zero(), Zero())))
    assert in_red_values(junk, list_n(Zero())) is YES
    assert in_red_values(junk, list_n(build_nat(1))) is NO


def test_in_red_terms_examples():
    assert in_red_terms(T("(if true zero err)"), TNat()) is YES
    assert in_red_terms(Err(), TNat()) is NO
    assert in_red_terms(samples.LOOP, TNat(), EMPTY, Budget(eval_fuel=500)) is UNKNOWN


def test_reducible_open_examples():
    ctx = Context().bind("x", Ty("Bool"))
    assert reducible_open(ctx, T("(if x zero (succ zero))"), TNat()) is YES
    assert reducible_open(ctx, T("(if x zero err)"), TNat()) is NO
    fctx = Context().bind("f", Ty("(arrow Nat Nat)"))
    assert reducible_open(fctx, T("(app f zero)"), TNat()) is UNKNOWN
    # opt-in sampling of constant functions
    assert reducible_open(fctx, T("(app f zero)"), TNat(), Budget(functions=True)) is YES


def test_polymorphic_identity():
    ident = T("(tlambda (lambda x x))")
    assert in_red_values(ident, Ty("(poly X (arrow X X))")) is YES
    assert in_red_values(T("(tlambda (lambda x zero))"), Ty("(poly X (arrow X X))")) is NO


def test_candidates_hold_values_only():
    with pytest.raises(ValueError):
        FiniteCandidate.of(T("(app (lambda x x) zero)"))


def test_budget_must_be_positive():
    with pytest.raises(ValueError):
        Budget(nat_bound=0)


def test_enumeration_members_are_members():
    b = Budget(nat_bound=2, depth=2)
    for ty in samples.T2:
        for v in values(ty, EMPTY, b):
            assert in_red_values(v, ty, EMPTY, b) is YES


def test_embedded_numerals_are_bounded():
    assert values(Ty("Nat"), EMPTY, Budget(nat_bound=2)) == [build_nat(k) for k in range(3)]
    assert values(Ty("(arrow Nat Nat)")) is None
    consts = values(Ty("(arrow Unit Bool)"), EMPTY, Budget(functions=True))
    assert consts == [T("(lambda u true)"), T("(lambda u false)")]


@pytest.mark.parametrize("items", list(samples.all_lists()), ids=str)
def test_lists_belong_to_small_indices(items):
    for n in range(4):
        assert in_red_values(encode_list(items), list_n(build_nat(n))) is YES


@given(any_values)
@settings(max_examples=100, deadline=None)
def test_non_list_cells_fail_at_one(v):
    shaped = v == Inl(Unit()) or (isinstance(v, Inr) and isinstance(v.t, Pair)
                                  and in_red_values(v.t.a, TNat()) is YES)
    if not shaped:
        assert in_red_values(Fold(None, v), list_n(build_nat(1))) is NO


@given(lists, st.integers(min_value=0, max_value=4))
@settings(max_examples=60, deadline=None)
def test_list_size_bounds_membership(items, n):
    # a list of length k is a member at every index, including beyond its length
    assert in_red_values(encode_list(items), list_n(build_nat(n))) is YES


def test_streams_lose_members_with_depth(constant_stream):
    for v in samples.stream_samples(constant_stream):
        for k in range(4):
            hi = in_red_values(v, stream_n(build_nat(k + 1), TNat()))
            if hi is YES:
                assert in_red_values(v, stream_n(build_nat(k), TNat())) is YES


def test_constant_stream_is_a_stream_at_every_depth(constant_stream):
    for k in range(5):
        assert in_red_values(constant_stream, stream_n(build_nat(k), TNat())) is YES


def test_stream_prefix_depth(constant_stream):
    # S_0 is Nat x Top, so k good cells before err survive up to depth k
    v = samples.stream_prefix([0, 1], Err())
    assert [in_red_values(v, stream_n(build_nat(k), TNat())) for k in range(4)] == [YES, YES, NO, NO]


@given(st.integers(0, 3), st.lists(st.integers(0, 1), max_size=3),
       st.sampled_from(["const", "err", "zero", "fold"]))
@settings(max_examples=60, deadline=None)
def test_stream_anti_monotonicity(constant_stream, k, heads, tail):
    tails = {"const": constant_stream, "err": Err(), "zero": Zero(), "fold": Fold(None, Zero())}
    if not heads and tail == "err":
        return  # err alone is not a value
    v = samples.stream_prefix(heads, tails[tail])
    if in_red_values(v, stream_n(build_nat(k + 1), TNat())) is YES:
        assert in_red_values(v, stream_n(build_nat(k), TNat())) is YES


SUB_BUDGET = Budget()


@given(st.sampled_from(samples.POOL) | any_values, st.sampled_from(samples.T1),
       st.sampled_from(samples.T2))
@settings(max_examples=200, deadline=None)
def test_substitution_lemma(v, t1, t2):
    for direct, interpreted in samples.substitution_verdicts(v, t1, t2, SUB_BUDGET):
        assert not samples.disagree(direct, interpreted)


def test_substitution_lemma_on_members():
    checked = 0
    for v, t1, t2 in samples.substitution_samples(SUB_BUDGET):
        for direct, interpreted in samples.substitution_verdicts(v, t1, t2, SUB_BUDGET):
            assert not samples.disagree(direct, interpreted), (v, t1, t2)
            checked += 1
    assert checked >= 200


DIST_BUDGET = Budget(nat_bound=2)


def test_distribute_on_samples(constant_stream):
    pairs = list(samples.distribute_samples(constant_stream))
    for v, t2 in pairs:
        outside, inside = samples.distribute_verdicts(v, t2, DIST_BUDGET)
        assert not samples.disagree(outside, inside), (v, t2)
    assert len(pairs) >= 100


@given(st.integers(0, 3), any_values, st.sampled_from(samples.TAU2))
@settings(max_examples=100, deadline=None)
def test_distribute(n, w, t2):
    v = Pair(build_nat(n), samples.thunk(w))
    outside, inside = samples.distribute_verdicts(v, t2, DIST_BUDGET)
    assert not samples.disagree(outside, inside)


def test_interpretation_lookup():
    theta = Interpretation.of({"a": FiniteCandidate.of(Zero())})
    assert in_red_values(Zero(), Ty("a"), theta) is YES
    assert in_red_values(Unit(), Ty("a"), theta) is NO
    with pytest.raises(KeyError):
        in_red_values(Zero(), Ty("b"), theta)


def test_open_membership_of_variable():
    ctx = Context().bind("n", TNat())
    assert reducible_open(ctx, Var("n"), TNat(), Budget(nat_bound=3)) is YES
