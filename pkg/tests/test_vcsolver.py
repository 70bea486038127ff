import io
import json

from hypothesis import given, settings
from hypothesis import strategies as st

from systemfr.checker import VC, Context, infer
from systemfr.driver import hypothesis_name
from systemfr.reducibility import Budget, Verdict, reducible_open
from systemfr.sexpr import parse_term, parse_type
from systemfr.syntax import TEqual, TNat, Refl, Var, build_nat, erase, erase_type, free_vars
from systemfr.vcsolver import Unknown, Valid, export_vcs, solve

T = parse_term
Ty = parse_type


def vc(ctx, lhs, rhs, origin="test"):
    return VC(ctx, T(lhs) if isinstance(lhs, str) else lhs, T(rhs) if isinstance(rhs, str) else rhs, origin)


def test_reflexivity():
    assert isinstance(solve(vc(Context(), "zero", "zero")), Valid)


def test_rewrites_with_hypotheses(prelude_lib):
    ctx = prelude_lib.context().bind("x", TNat()).bind("p", Ty("(equal x (succ zero))"))
    assert isinstance(solve(vc(ctx, "(app lessThan zero x)", "true")), Valid)


def test_open_comparison(prelude_lib):
    ctx = prelude_lib.context().bind("n", TNat())
    # true for every n, closed by arithmetic
    assert isinstance(solve(vc(ctx, "(app lessThan n n)", "false")), Valid)
    # false for n = 1, so it must stay open
    assert isinstance(solve(vc(ctx, "(app lessThan n (succ zero))", "true")), Unknown)


def test_false_closed_vc_is_unknown():
    assert isinstance(solve(vc(Context(), "zero", "(succ zero)")), Unknown)


def test_bounded_enumeration(prelude_lib):
    ctx = prelude_lib.context().bind("b", Ty("Bool"))
    assert isinstance(solve(vc(ctx, "(if b (if b true false) true)", "true")), Valid)


def test_export_of_refl_vc():
    r = infer(Context(), T("(refl zero zero)"))
    buf = io.StringIO()
    assert export_vcs(r.vcs, buf) == 1
    rec = json.loads(buf.getvalue())
    assert rec == {"origin": "Infer Refl", "theta": [], "gamma": [], "lhs": "zero", "rhs": "zero"}


def test_export_empty_and_stable(corpus_results):
    assert export_vcs([], io.StringIO()) == 0
    vcs = [v for rs in corpus_results.values() for r in rs for v in r.vcs]
    a, b = io.StringIO(), io.StringIO()
    export_vcs(vcs, a)
    export_vcs(vcs, b)
    assert a.getvalue() == b.getvalue() and a.getvalue().count("\n") == len(vcs)


def _sampling_context(v: VC, lib):
    """The VC with library definitions inlined and irrelevant bindings dropped."""
    hidden = lib.names() | {hypothesis_name(n) for n in lib.names()}
    gamma = [(x, lib.close(erase_type(ty))) for x, ty in v.context.gamma if x not in hidden]
    lhs, rhs = lib.close(erase(v.lhs)), lib.close(erase(v.rhs))
    # hypotheses carry contradictions, so seed with everything they mention
    needed = free_vars(lhs) | free_vars(rhs)
    needed |= {x for x, ty in gamma if isinstance(ty, TEqual)}
    while True:
        keep = [(x, ty) for x, ty in gamma if x in needed or free_vars(ty) & needed]
        grown = needed | {x for x, _ in keep} | set().union(*(free_vars(ty) for _, ty in keep))
        if grown == needed:
            break
        needed = grown
    return Context(v.context.theta, tuple(keep)), lhs, rhs


SAMPLE = Budget(eval_fuel=20_000, nat_bound=3, depth=2, width=100)


def test_valid_vcs_hold_on_samples(corpus_results, prelude_lib):
    from systemfr.driver import check_defs, load_source
    from systemfr.frontend.stdlib import corpus_text

    tally = {v: 0 for v in Verdict}
    for name, results in corpus_results.items():
        _, lib = check_defs(load_source(corpus_text(name), name, prelude_lib.copy())[0], prelude_lib.copy())
        for r in results:
            for v, verdict in zip(r.vcs, r.verdicts):
                if not isinstance(verdict, Valid):
                    continue
                ctx, lhs, rhs = _sampling_context(v, lib)
                out = reducible_open(ctx, Refl(None, None), TEqual(lhs, rhs), SAMPLE)
                assert out is not Verdict.NO, (r.name, str(v))
                tally[out] += 1
    assert tally[Verdict.YES] > 0


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=6), st.integers(min_value=0, max_value=6))
def test_closed_comparisons_match_integers(prelude_lib, a, b):
    ctx = prelude_lib.context()
    out = solve(vc(ctx, T(f"(app lessThan {a} {b})"), "true" if a < b else "false"))
    assert isinstance(out, Valid)
    assert isinstance(solve(vc(ctx, T(f"(app lessThan {a} {b})"), "false" if a < b else "true")),
                      Unknown)


def test_budget_monotonicity(corpus_results):
    for results in corpus_results.values():
        for r in results:
            for v in r.vcs:
                small = solve(v, 800)
                if isinstance(small, Valid):
                    assert isinstance(solve(v, 4000), Valid), str(v)
