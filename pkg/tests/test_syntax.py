from hypothesis import given
from hypothesis import strategies as st

from systemfr.sexpr import parse_term, parse_type, show
from systemfr.syntax import (
    Fresh, Inst, Lam, TNat, TVar, Var, Zero, alpha_eq, bind, build_nat, erase, erase_type,
    free_type_vars, free_vars, is_erased, is_fresh_name, nat_value, substitute,
)

from .strategies import NAMES, closed_terms, open_terms

T = parse_term
Ty = parse_type


def test_substitute_free_occurrence():
    assert substitute(T("(lambda y x)"), "x", Zero()) == T("(lambda y zero)")


def test_substitute_shadowed():
    assert substitute(T("(lambda x x)"), "x", Zero()) == T("(lambda x x)")


def test_substitute_avoids_capture():
    out = substitute(T("(lambda y (y x))"), "x", Var("y"))
    assert out == T("(lambda w (w y))")
    assert free_vars(out) == {"y"}


def test_substitute_reaches_types():
    ty = Ty("(refine v Nat (equal v x))")
    assert substitute(ty, "x", Zero()) == Ty("(refine v Nat (equal v zero))")


def test_free_vars_examples():
    assert free_vars(T("(lambda x (x y))")) == {"y"}
    assert free_vars(Zero()) == set()
    ty = Ty("(arrow X (rec-type k a (times X (arrow Unit a))))")
    assert free_type_vars(ty) == {"X"}
    assert free_vars(ty) == {"k"}


def test_alpha_eq_examples():
    assert alpha_eq(T("(lambda x x)"), T("(lambda y y)"))
    assert not alpha_eq(T("(lambda x (lambda y x))"), T("(lambda x (lambda y y))"))
    assert alpha_eq(Ty("(pi x Nat (refine y Nat (equal x y)))"),
                    Ty("(pi z Nat (refine w Nat (equal z w)))"))


def test_build_nat():
    assert build_nat(0) == Zero()
    assert build_nat(1) == T("(succ zero)")
    assert build_nat(2) == T("(succ (succ zero))")
    assert nat_value(build_nat(7)) == 7


def test_erase_examples():
    assert erase(T("(lambda (x Nat) x)")) == T("(lambda x x)")
    assert erase(Inst(Var("f"), T("(pred n)"))) == Var("f")
    assert erase(Zero()) == Zero()
    assert erase(T("(err Nat)")) == T("err")
    assert erase(T("(refl zero zero)")) == T("refl")
    fix = T("(fix (n Nat) (n y) (lambda (x Nat) x))")
    assert erase(fix) == T("(fix y (lambda x x))")


def test_erase_type_examples():
    ty = Ty("(refine x Nat (app (lambda (a Nat) a) x))")
    assert erase_type(ty) == Ty("(refine x Nat (app (lambda a a) x))")
    assert erase_type(TNat()) == TNat()
    assert erase_type(Ty("(equal (inst f zero) zero)")) == Ty("(equal f zero)")


def test_fresh_names_are_distinct_and_unreadable():
    f = Fresh()
    a, b = f.name("x"), f.name("x")
    assert a != b and is_fresh_name(a) and not is_fresh_name("x")


def test_show_round_trips():
    for text in ["(lambda x (succ x))", "(fix y (app y unit))", "(unfold s x (fst x))"]:
        assert T(show(T(text))) == T(text)


@given(closed_terms)
def test_erase_idempotent(t):
    assert erase(t) == t and is_erased(t)


@given(open_terms(NAMES), st.sampled_from(NAMES), closed_terms)
def test_substitution_free_vars(t, x, v):
    assert free_vars(substitute(t, x, v)) <= (free_vars(t) - {x}) | free_vars(v)


@given(open_terms(NAMES), open_terms(NAMES), open_terms(NAMES))
def test_alpha_eq_is_an_equivalence(a, b, c):
    assert alpha_eq(a, a)
    assert alpha_eq(a, b) == alpha_eq(b, a)
    if alpha_eq(a, b) and alpha_eq(b, c):
        assert alpha_eq(a, c)


@given(open_terms(NAMES), st.sampled_from(NAMES), st.sampled_from(["p", "q"]))
def test_renaming_a_binder_keeps_alpha_class(t, x, y):
    # closing over x or over a fresh name gives the same binder body
    renamed = substitute(t, x, Var(y)) if y not in free_vars(t) else t
    if y not in free_vars(t):
        assert Lam(None, bind(x, t)) == Lam(None, bind(y, renamed))


def test_corpus_erasures_are_closed(stdlib_lib):
    for name, term in stdlib_lib.erased.items():
        assert free_vars(term) == set(), name
