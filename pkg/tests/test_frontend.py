import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from systemfr.driver import callees, check_defs, load_source
from systemfr.frontend.desugar import desugar, desugar_lex, translate_expr
from systemfr.frontend.stdlib import corpus_text, stdlib
from systemfr.frontend.surface import SIf, SLocalDef, SRecCall, SurfaceError, parse_expr, parse_surface
from systemfr.semantics import Normalized, evaluate
from systemfr.sexpr import parse_term
from systemfr.syntax import (
    App, BVar, Fix, Fls, Lam, Tru, Unit, alpha_eq, build_nat, erase, nat_value, walk,
)

from .strategies import encode_list

TEMPLATE = """
def f(x: Nat): Nat = {
  require(x <= 5)
  decreases(x)
  if (x == 0) 0 else {
    val r = f(x - 1)
    r
  }
} ensuring { res => res == 0 }
"""


def _run(lib, text):
    t = lib.close(erase(translate_expr(parse_expr(text), callees(lib))))
    out = evaluate(t, 1_000_000)
    assert isinstance(out, Normalized), out
    return out.value


def test_template_populates_every_field():
    (d,) = parse_surface(TEMPLATE).defs
    assert d.pre is not None and len(d.measure) == 1 and d.post is not None
    assert d.post[0] == "res"
    assert [p.name for p in d.params] == ["x"]


def test_plain_definition_has_no_contracts():
    (d,) = parse_surface("def id(x: Nat): Nat = { x }").defs
    assert (d.pre, d.measure, d.post) == (None, (), None)


def test_plain_definition_desugars_to_lambda():
    (d,) = parse_surface("def id(x: Nat): Nat = { x }").defs
    t = desugar(d)
    assert isinstance(t, Lam)
    assert alpha_eq(erase(t), parse_term("(lambda x x)"))


def test_unbalanced_brace_reports_position():
    with pytest.raises(SurfaceError) as e:
        parse_surface("def id(x: Nat): Nat = { x")
    assert (e.value.line, e.value.col) == (1, 26)
    with pytest.raises(SurfaceError) as e:
        parse_surface("def id(x: Nat): Nat = {\n  x\n}}")
    assert (e.value.line, e.value.col) == (3, 2)


def test_recursive_calls_go_through_the_thunk(prelude_lib):
    (d,) = parse_surface(TEMPLATE).defs
    t = desugar(d, callees(prelude_lib))
    assert isinstance(t, Fix)
    erased = erase(t)
    # f a is now y () a where y is the recursion variable
    calls = [n for n in walk(erased)
             if isinstance(n, App) and isinstance(n.fn, App)
             and isinstance(n.fn.fn, BVar) and n.fn.arg == Unit()]
    assert calls


def test_template_checks(prelude_lib):
    defs, _ = load_source(TEMPLATE, "t.sfr", prelude_lib.copy())
    (r,), _ = check_defs(defs, prelude_lib.copy())
    assert r.discharged


def test_count_discharges(corpus_results):
    (r,) = [r for r in corpus_results["lists.sfr"] if r.name == "count"]
    assert r.discharged and r.vcs


def test_self_reference_in_contracts_is_rejected():
    src = "def f(x: Nat): Nat = {\n  require(f(x) == 0)\n  x\n}"
    with pytest.raises(SurfaceError, match="cannot refer to f"):
        desugar(parse_surface(src).defs[0])


def test_more_than_two_measures_are_rejected():
    src = "def f(x: Nat): Nat = {\n  decreases(x, x, x)\n  x\n}"
    with pytest.raises(SurfaceError, match="at most two"):
        desugar(parse_surface(src).defs[0])


def test_unbound_and_duplicate_names(prelude_lib):
    with pytest.raises(SurfaceError, match="unbound name g"):
        load_source("def f(x: Nat): Nat = { g(x) }", "t.sfr", prelude_lib.copy())
    dup = "def f(x: Nat): Nat = { x }\ndef f(x: Nat): Nat = { x }"
    with pytest.raises(SurfaceError, match="duplicate definition f"):
        load_source(dup, "t.sfr", prelude_lib.copy())


def test_lex_produces_guarded_inner_definition():
    src = "def g(m: Nat, n: Nat): Nat = {\n  decreases(m, n)\n  if (m == 0) n else g(m - 1, n)\n}"
    d = desugar_lex(parse_surface(src).defs[0])
    assert len(d.measure) == 1 and isinstance(d.body, SLocalDef)
    inner = d.body.d
    assert inner.name == "g#lex" and len(inner.measure) == 1 and inner.pre is not None
    guards = [n for n in _surface_nodes(inner.body) if isinstance(n, SIf)
              and isinstance(n.a, SRecCall) and isinstance(n.b, SRecCall)]
    assert [(n.a.target, n.b.target) for n in guards] == [("g", "g#lex")]


def _surface_nodes(e):
    yield e
    for v in vars(e).values():
        for x in v if isinstance(v, tuple) else (v,):
            if hasattr(x, "__dataclass_fields__") and not isinstance(x, str):
                yield from _surface_nodes(x)


def _ack(m, n):
    if m == 0:
        return n + 1
    if n == 0:
        return _ack(m - 1, 1)
    return _ack(m - 1, _ack(m, n - 1))


def test_ackermann_checks_and_evaluates(corpus_results, prelude_lib):
    (r,) = corpus_results["ackermann.sfr"]
    assert r.discharged
    defs, exprs = load_source(corpus_text("ackermann.sfr"), "ackermann.sfr", prelude_lib.copy())
    _, lib = check_defs(defs, prelude_lib.copy())
    got = [nat_value(evaluate(lib.close(erase(e)), 1_000_000).value) for e in exprs]
    assert got == [_ack(2, 2), _ack(1, 3)] == [7, 5]


CONSTANT_GOLDEN = parse_term(
    "(fix constant (tlambda (lambda x (fold (pair x (lambda u (app (tapp (app constant unit)) x)))))))")


def test_erased_constant_is_golden():
    assert alpha_eq(erase(stdlib()["constant"]), CONSTANT_GOLDEN)


OPS = {"lessThan": lambda a, b: a < b, "lessEqual": lambda a, b: a <= b,
       "equalNat": lambda a, b: a == b}


def test_natops_agree_with_integers(stdlib_lib):
    for (name, op), a, b in itertools.product(OPS.items(), range(5), range(5)):
        assert _run(stdlib_lib, f"{name} {a} {b}") == (Tru() if op(a, b) else Fls()), (name, a, b)


@given(st.sampled_from(sorted(OPS)), st.integers(0, 7), st.integers(0, 7))
@settings(max_examples=60, deadline=None)
def test_natops_property(stdlib_lib, name, a, b):
    assert _run(stdlib_lib, f"{name} {a} {b}") == (Tru() if OPS[name](a, b) else Fls())


@given(st.integers(0, 6), st.integers(0, 6))
@settings(max_examples=40, deadline=None)
def test_surface_arithmetic(stdlib_lib, a, b):
    assert nat_value(_run(stdlib_lib, f"{a} + {b}")) == a + b
    assert _run(stdlib_lib, f"{a} < {b}") == (Tru() if a < b else Fls())


def test_cons_builds_the_list_encoding(stdlib_lib):
    assert _run(stdlib_lib, "cons 1 nil") == encode_list([1])


def test_fib_fourth_element(stdlib_lib):
    assert _run(stdlib_lib, "nth 3 fib") == build_nat(2)


def test_subtraction_is_predecessor_only(stdlib_lib):
    assert nat_value(_run(stdlib_lib, "3 - 1")) == 2
    with pytest.raises(SurfaceError, match="n - 1"):
        translate_expr(parse_expr("3 - 2"), callees(stdlib_lib))
