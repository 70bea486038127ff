from hypothesis import given, settings
from hypothesis import strategies as st

from systemfr.reducibility import Budget, in_red_values, values
from systemfr.sexpr import parse_term, parse_type
from systemfr.syntax import TBool, TIf, TNat, TSum, TTop, TVar, Tru, Fls, Var, arrow, free_type_vars, times
from systemfr.typeops import basetype, simplify, spos, type_eq

from .strategies import enumerable_types

Ty = parse_type
T = parse_term


def test_basetype_examples():
    assert basetype("a", Ty("(times Nat (arrow Unit a))")) == Ty("(times Nat Top)")
    assert basetype("a", Ty("(sum Unit (times Nat a))")) == Ty("(sum Unit (times Nat Top))")
    assert basetype("a", TBool()) == TBool()


def test_spos_examples():
    assert spos("a", Ty("(arrow Nat a)"))
    assert not spos("a", Ty("(arrow a Nat)"))
    assert spos("a", Ty("(sum Unit (times Nat a))"))
    assert spos("a", Ty("(rec-type n b (times a (arrow Unit b)))"))
    assert not spos("a", Ty("(rec-type n b (arrow b a))"))


def test_simplify_examples():
    assert simplify(Ty("(if-type b Nat Nat)")) == TNat()
    let = Ty("(let-type x zero (refine y Nat (app equalNat y x)))")
    assert simplify(let) == Ty("(refine y Nat (let x zero (app equalNat y x)))")
    assert simplify(Ty("(if-type b Nat Bottom)")) == TNat()
    assert simplify(Ty("(if-type b Bottom Bool)")) == TBool()


def test_simplify_keeps_incompatible_skeletons():
    ty = Ty("(if-type b Nat Bool)")
    assert simplify(ty) == ty


def test_simplify_distributes_over_arrows():
    ty = Ty("(if-type b (arrow Nat Nat) (arrow Nat Nat))")
    assert simplify(ty) == Ty("(arrow Nat Nat)")


def test_type_eq_examples():
    assert type_eq(Ty("(pi x Nat Nat)"), Ty("(pi y Nat Nat)"))
    assert not type_eq(Ty("(rec-type n a (times Nat (arrow Unit a)))"),
                       Ty("(rec-type m a (times Nat (arrow Unit a)))"))
    assert type_eq(simplify(Ty("(if-type true Nat Nat)")), TNat())


type_vars = st.sampled_from(["a", "b"])

shapes = st.recursive(
    st.sampled_from([TNat(), TBool(), TTop(), TVar("a"), TVar("b")]),
    lambda inner: st.one_of(
        st.tuples(inner, inner).map(lambda p: times(*p)),
        st.tuples(inner, inner).map(lambda p: TSum(*p)),
        st.tuples(inner, inner).map(lambda p: arrow(*p)),
    ),
    max_leaves=6,
)


@given(type_vars, shapes)
def test_basetype_removes_the_variable(a, ty):
    assert a not in free_type_vars(basetype(a, ty))


@given(type_vars, shapes)
def test_spos_holds_when_variable_absent(a, ty):
    if a not in free_type_vars(ty):
        assert spos(a, ty)


@given(shapes, shapes)
def test_simplify_idempotent(a, b):
    ty = TIf(Var("c"), a, b)
    once = simplify(ty)
    assert simplify(once) == once


@settings(max_examples=40, deadline=None)
@given(enumerable_types, st.booleans())
def test_simplify_preserves_membership(ty, cond):
    wrapped = TIf(Tru() if cond else Fls(), ty, ty)
    b = Budget(nat_bound=2, depth=2, width=64)
    for v in values(ty, b=b)[:12]:
        assert in_red_values(v, wrapped, b=b) == in_red_values(v, simplify(wrapped), b=b)
