"""Bidirectional inference and checking over annotated terms, emitting VCs."""

from __future__ import annotations

from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional

from .semantics import is_value
from .sexpr import show
from .syntax import (
    App, BVar, Bind, EitherMatch, Err, Fix, Fls, Fold, Fresh, Fst, If, Inl, Inr,
    Inst, Lam, Let, Match, Node, Pair, Rec, Refl, Size, Snd, Succ, TBool, TBot,
    TEitherMatch, TEqual, TForall, TIf, TLet, TMatch, TNat, TPi, TPoly, TRec, TRefine, TSigma, TSum, TTop, TUnit,
    TVar, Tru, TyAbs, TyApp, Unfold, Unit, Var, Zero, close, erase, free_vars,
    open_bind, rec_inf_body, vacuous, weaken,
)
from .typeops import basetype, simplify, spos, tidy_term, tidy_type, type_eq


@dataclass(frozen=True)
class Context:
    theta: tuple[str, ...] = ()
    gamma: tuple[tuple[str, Node], ...] = ()

    def bind(self, x: str, ty: Node) -> "Context":
        if any(y == x for y, _ in self.gamma):
            raise ValueError(f"variable {x} already bound")
        return Context(self.theta, self.gamma + ((x, ty),))

    def add_tvar(self, a: str) -> "Context":
        return Context(self.theta + (a,), self.gamma)

    def lookup(self, x: str) -> Optional[Node]:
        for y, ty in reversed(self.gamma):
            if y == x:
                return ty
        return None

    def domain(self) -> set[str]:
        return {x for x, _ in self.gamma}


@dataclass(frozen=True)
class VC:
    context: Context
    lhs: Node
    rhs: Node
    origin: str

    def __str__(self) -> str:
        hyps = ", ".join(f"{x}: {show(t)}" for x, t in self.context.gamma)
        return f"[{self.origin}] {hyps} |- {show(self.lhs)} == {show(self.rhs)}"


@dataclass
class Derivation:
    rule: str
    judgement: str
    children: list["Derivation"] = field(default_factory=list)

    def render(self, indent: int = 0) -> str:
        pad = "  " * indent
        lines = [f'{pad}("{self.rule}" {self.judgement}']
        lines += [c.render(indent + 1) for c in self.children]
        return "\n".join(lines) + ")"

    def rules(self) -> Iterator[str]:
        yield self.rule
        for c in self.children:
            yield from c.rules()


class CheckFailure(Exception):
    def __init__(self, path: list[str], msg: str):
        super().__init__(f"{' > '.join(path)}: {msg}" if path else msg)
        self.path = path
        self.msg = msg


@dataclass
class CheckReport:
    ok: bool
    type: Optional[Node]
    vcs: list[VC]
    error: Optional[str] = None
    derivation: Optional[Derivation] = None


# Inference rules per head constructor, in the order they are attempted.
# Drop Refinement is the low-priority fallback: it is applied whenever a rule
# needs a particular type shape and the inferred type is a refinement of it.
INFER_RULES: dict[type, tuple[str, ...]] = {
    Var: ("Infer Var",), Tru: ("Infer True",), Fls: ("Infer False",),
    Unit: ("Infer Unit",), Zero: ("Infer Zero",), Succ: ("Infer Succ",),
    If: ("Infer If",), Inl: ("Infer Left",), Inr: ("Infer Right",),
    Size: ("Infer Size",), Match: ("Infer Match",), EitherMatch: ("Infer Either Match",),
    Rec: ("Infer Rec",), Fix: ("Infer Fix",), Pair: ("Infer Pair",), Let: ("Infer Let",),
    Fst: ("Infer Proj1",), Snd: ("Infer Proj2",), Lam: ("Infer Lambda",),
    App: ("Infer App",), TyAbs: ("Infer Type Abs",), TyApp: ("Infer Type App",),
    Inst: ("Infer Forall Instantiation",), Fold: ("Infer Fold Gen", "Infer Fold"),
    Unfold: ("Infer Unfold Gen", "Infer Unfold"), Err: ("Infer Err",), Refl: ("Infer Refl",),
}
INFER_FALLBACK = "Infer Drop Refinement"


def _is_rec(ty: Node) -> bool:
    return isinstance(ty, TRec)


# Checking rules in priority order with their applicability tests.
CHECK_RULES: tuple[tuple[str, Callable[[Node, Node], bool]], ...] = (
    ("Check If", lambda t, ty: isinstance(t, If)),
    ("Check Match", lambda t, ty: isinstance(t, Match)),
    ("Check Either Match", lambda t, ty: isinstance(t, EitherMatch)),
    ("Check Let", lambda t, ty: isinstance(t, Let)),
    ("Check Unfold", lambda t, ty: isinstance(t, Unfold)),
    ("Check Forall", lambda t, ty: isinstance(ty, TForall) and isinstance(ty.dom, TNat)),
    ("Check Pi", lambda t, ty: isinstance(ty, TPi)),
    ("Check Sigma", lambda t, ty: isinstance(ty, TSigma)),
    ("Check Refinement", lambda t, ty: isinstance(ty, TRefine)),
    ("Check Type Abs", lambda t, ty: isinstance(ty, TPoly)),
    ("Check Recursive", lambda t, ty: isinstance(ty, TRec)),
    ("Check Left", lambda t, ty: isinstance(t, Inl) and isinstance(ty, TSum)),
    ("Check Right", lambda t, ty: isinstance(t, Inr) and isinstance(ty, TSum)),
    ("Check Top 1", lambda t, ty: isinstance(ty, TTop) and is_value(t)),
    ("Check Top 2", lambda t, ty: isinstance(ty, TTop)),
    ("Check Reflexive", lambda t, ty: True),
)
CHECK_PRIORITY = tuple(name for name, _ in CHECK_RULES)
# term-directed rules: their failure is final
_COMMITTED = {"Check If", "Check Match", "Check Either Match", "Check Let", "Check Unfold"}


def method_name(rule: str) -> str:
    return "_" + rule.lower().replace(" ", "_")


Refuter = Callable[[Context], bool]


class Checker:
    """One checking session: owns the fresh-name supply and the VC log.

    `refute`, when given, is asked whether a case-split context is
    contradictory; provably dead fold/unfold cases are then skipped and the
    refutation is logged as a VC.
    """

    def __init__(self, refute: Optional[Refuter] = None, fresh: Optional[Fresh] = None):
        self.fresh = fresh or Fresh()
        self.refute = refute
        self.vcs: list[VC] = []
        self.root = Derivation("Session", "")
        self._stack = [self.root]
        self._path: list[str] = []
        self._lt: Optional[Node] = None

    # ------------------------------------------------------------ plumbing

    def fresh_hypothesis(self, ctx: Context, ty: Node, base: str = "p") -> tuple[str, Context]:
        p = self.fresh.name(base)
        return p, ctx.bind(p, ty)

    def _open(self, b: Bind, ctor: Callable[[str], Node] = Var) -> tuple[str, Node]:
        x = self.fresh.name(b.hint)
        return x, open_bind(b, ctor(x))

    def emit(self, ctx: Context, lhs: Node, rhs: Node, rule: str) -> VC:
        vc = VC(ctx, tidy_term(lhs), tidy_term(rhs), rule)
        self.vcs.append(vc)
        self._stack[-1].children.append(Derivation("VC", f"{show(vc.lhs)} == {show(vc.rhs)}"))
        return vc

    def fail(self, msg: str) -> CheckFailure:
        return CheckFailure(list(self._path), msg)

    @contextmanager
    def _rule(self, rule: str, judgement: str) -> Iterator[None]:
        node = Derivation(rule, judgement)
        parent = self._stack[-1]
        self._stack.append(node)
        self._path.append(rule)
        try:
            yield
        except CheckFailure:
            raise
        else:
            parent.children.append(node)
        finally:
            self._stack.pop()
            self._path.pop()

    def _mark(self) -> tuple[int, int]:
        return len(self.vcs), len(self._stack[-1].children)

    def _rollback(self, mark: tuple[int, int]) -> None:
        del self.vcs[mark[0]:]
        del self._stack[-1].children[mark[1]:]

    def less_than(self) -> Node:
        if self._lt is None:
            from .frontend.stdlib import natop

            self._lt = natop("lessThan")
        return self._lt

    def dead(self, ctx: Context, rule: str) -> bool:
        if self.refute is None or not self.refute(ctx):
            return False
        self.emit(ctx, Tru(), Fls(), f"{rule}: unreachable case")
        return True

    # --------------------------------------------------------------- shapes

    def expect(self, ty: Node, shape: type | tuple[type, ...], what: str) -> Node:
        """Return `ty` in the requested shape, dropping outer refinements."""
        ty = simplify(ty)
        while not isinstance(ty, shape) and isinstance(ty, TRefine):
            ty = ty.ty
        if not isinstance(ty, shape):
            raise self.fail(f"expected {what}, inferred {show(ty)}")
        return ty

    # ---------------------------------------------------------------- infer

    def infer(self, ctx: Context, t: Node) -> Node:
        rules = INFER_RULES.get(type(t))
        if rules is None:
            raise self.fail(f"no inference rule for {type(t).__name__}")
        first: Optional[CheckFailure] = None
        for rule in rules:
            if rule == "Infer Fold Gen" and not self._fold_gen_applies(t):
                continue
            if rule == "Infer Unfold Gen":
                continue  # decided inside Infer Unfold once t1's type is known
            mark = self._mark()
            try:
                with self._rule(rule, show(t)):
                    return tidy_type(simplify(getattr(self, method_name(rule))(ctx, t)))
            except CheckFailure as e:
                self._rollback(mark)
                first = first or e
        assert first is not None
        raise first

    def _infer_var(self, ctx: Context, t: Var) -> Node:
        ty = ctx.lookup(t.name)
        if ty is None:
            raise self.fail(f"unbound variable {t.name}")
        return ty

    def _infer_true(self, ctx: Context, t: Node) -> Node:
        return TBool()

    _infer_false = _infer_true

    def _infer_unit(self, ctx: Context, t: Node) -> Node:
        return TUnit()

    def _infer_zero(self, ctx: Context, t: Node) -> Node:
        return TNat()

    def _infer_succ(self, ctx: Context, t: Succ) -> Node:
        self.check(ctx, t.t, TNat())
        return TNat()

    def _infer_if(self, ctx: Context, t: If) -> Node:
        self.check(ctx, t.c, TBool())
        _, c1 = self.fresh_hypothesis(ctx, TEqual(t.c, Tru()))
        ta = self.infer(c1, t.a)
        _, c2 = self.fresh_hypothesis(ctx, TEqual(t.c, Fls()))
        tb = self.infer(c2, t.b)
        return TIf(t.c, ta, tb)

    def _infer_left(self, ctx: Context, t: Inl) -> Node:
        return TSum(self.infer(ctx, t.t), TBot())

    def _infer_right(self, ctx: Context, t: Inr) -> Node:
        return TSum(TBot(), self.infer(ctx, t.t))

    def _infer_size(self, ctx: Context, t: Size) -> Node:
        self.infer(ctx, t.t)
        return TNat()

    def _infer_match(self, ctx: Context, t: Match) -> Node:
        self.check(ctx, t.tn, TNat())
        _, c0 = self.fresh_hypothesis(ctx, TEqual(t.tn, Zero()))
        t0 = self.infer(c0, t.t0)
        n, ts = self._open(t.ts)
        c1 = ctx.bind(n, TNat())
        _, c1 = self.fresh_hypothesis(c1, TEqual(t.tn, Succ(Var(n))))
        tys = self.infer(c1, ts)
        return TMatch(t.tn, t0, close(Var(n), tys, t.ts.hint))

    def _infer_either_match(self, ctx: Context, t: EitherMatch) -> Node:
        sum_ty = self.expect(self.infer(ctx, t.t), TSum, "a sum type")
        out = []
        for b, side, inj in ((t.left, sum_ty.a, Inl), (t.right, sum_ty.b, Inr)):
            x, body = self._open(b)
            c = ctx.bind(x, side)
            _, c = self.fresh_hypothesis(c, TEqual(t.t, inj(Var(x))))
            out.append(close(Var(x), self.infer(c, body), b.hint))
        return TEitherMatch(t.t, out[0], out[1])

    def _infer_rec(self, ctx: Context, t: Rec) -> Node:
        if t.ann is None:
            raise self.fail("rec needs a type annotation")
        self.check(ctx, t.tn, TNat())
        self.check(ctx, t.t0, open_bind(t.ann, Zero()))
        n = self.fresh.name(t.step.hint)
        step_n = open_bind(t.step, Var(n))
        y = self.fresh.name(step_n.hint)
        ts = open_bind(step_n, Var(y))
        c = ctx.bind(n, TNat())
        c = c.bind(y, TPi(TUnit(), weaken(open_bind(t.ann, Var(n)))))
        again = Lam(TUnit(), weaken(Rec(t.ann, Var(n), t.t0, t.step)))
        _, c = self.fresh_hypothesis(c, TEqual(Var(y), again))
        self.check(c, ts, open_bind(t.ann, Succ(Var(n))))
        return TLet(t.tn, t.ann)

    def _infer_fix(self, ctx: Context, t: Fix) -> Node:
        if t.ann is None:
            raise self.fail("fix needs a type annotation")
        erased = erase(t)
        if not vacuous(erased.body):
            raise self.fail("the fix index occurs in the erased body")
        n = self.fresh.name(t.body.hint)
        inner = open_bind(t.body, Var(n))
        y = self.fresh.name(inner.hint)
        body = open_bind(inner, Var(y))
        m = self.fresh.name("m")
        bound = TRefine(TNat(), Bind(App(App(self.less_than(), BVar(0)), Var(n)), m))
        y_ty = TForall(bound, close(Var(m), TPi(TUnit(), weaken(open_bind(t.ann, Var(m)))), m))
        c = ctx.bind(n, TNat()).bind(y, y_ty)
        _, c = self.fresh_hypothesis(c, TEqual(Var(y), Lam(TUnit(), weaken(t))))
        self.check(c, body, open_bind(t.ann, Var(n)))
        return TForall(TNat(), t.ann)

    def _infer_pair(self, ctx: Context, t: Pair) -> Node:
        a = self.infer(ctx, t.a)
        b = self.infer(ctx, t.b)
        return TSigma(a, weaken(b))

    def _infer_let(self, ctx: Context, t: Let) -> Node:
        t1 = self.infer(ctx, t.t)
        x, body = self._open(t.body)
        c = ctx.bind(x, t1)
        _, c = self.fresh_hypothesis(c, TEqual(Var(x), t.t))
        t2 = self.infer(c, body)
        return TLet(t.t, close(Var(x), t2, t.body.hint))

    def _infer_proj1(self, ctx: Context, t: Fst) -> Node:
        return self.expect(self.infer(ctx, t.t), TSigma, "a pair type").dom

    def _infer_proj2(self, ctx: Context, t: Snd) -> Node:
        sig = self.expect(self.infer(ctx, t.t), TSigma, "a pair type")
        return TLet(Fst(t.t), sig.body)

    def _infer_lambda(self, ctx: Context, t: Lam) -> Node:
        if t.ty is None:
            raise self.fail("cannot infer the type of an unannotated lambda")
        x, body = self._open(t.body)
        cod = self.infer(ctx.bind(x, t.ty), body)
        return TPi(t.ty, close(Var(x), cod, t.body.hint))

    def _infer_app(self, ctx: Context, t: App) -> Node:
        fn = self.expect(self.infer(ctx, t.fn), TPi, "a function type")
        self.check(ctx, t.arg, fn.dom)
        return TLet(t.arg, fn.body)

    def _infer_type_abs(self, ctx: Context, t: TyAbs) -> Node:
        a, body = self._open(t.body, TVar)
        ty = self.infer(ctx.add_tvar(a), body)
        return TPoly(close(TVar(a), ty, t.body.hint))

    def _infer_type_app(self, ctx: Context, t: TyApp) -> Node:
        if t.ty is None:
            raise self.fail("type application needs a type argument")
        p = self.expect(self.infer(ctx, t.t), TPoly, "a polymorphic type")
        return open_bind(p.body, t.ty)

    def _infer_forall_instantiation(self, ctx: Context, t: Inst) -> Node:
        fa = self.expect(self.infer(ctx, t.t), TForall, "a forall type")
        self.check(ctx, t.arg, fa.dom)
        return TLet(t.arg, fa.body)

    def _fold_gen_applies(self, t: Fold) -> bool:
        if t.ty is None:
            return False
        alpha = rec_inf_body(simplify(t.ty))
        if alpha is None:
            return False
        a = self.fresh.name(alpha.hint)
        return spos(a, open_bind(alpha, TVar(a)))

    def _infer_fold_gen(self, ctx: Context, t: Fold) -> Node:
        ty = simplify(t.ty)
        alpha = rec_inf_body(ty)
        self.check(ctx, t.t, open_bind(alpha, ty))
        return ty

    def _infer_fold(self, ctx: Context, t: Fold) -> Node:
        if t.ty is None:
            raise self.fail("fold needs a type annotation")
        rec = self.expect(t.ty, TRec, "an indexed recursive type")
        self.check(ctx, rec.index, TNat())
        a = self.fresh.name(rec.body.hint)
        body = open_bind(rec.body, TVar(a))
        _, c0 = self.fresh_hypothesis(ctx, TEqual(rec.index, Zero()))
        if not self.dead(c0, "Infer Fold"):
            self.check(c0, t.t, basetype(a, body))
        k = self.fresh.name("n")
        c1 = ctx.bind(k, TNat())
        _, c1 = self.fresh_hypothesis(c1, TEqual(rec.index, Succ(Var(k))))
        if not self.dead(c1, "Infer Fold"):
            self.check(c1, t.t, open_bind(rec.body, TRec(Var(k), rec.body)))
        return rec

    def _infer_unfold(self, ctx: Context, t: Unfold) -> Node:
        scrut = simplify(self.infer(ctx, t.t))
        while isinstance(scrut, TRefine):
            scrut = scrut.ty
        alpha = rec_inf_body(scrut)
        if alpha is not None:
            a = self.fresh.name(alpha.hint)
            if spos(a, open_bind(alpha, TVar(a))):
                with self._rule("Infer Unfold Gen", show(t)):
                    return self._unfold_gen(ctx, t, scrut, alpha)
        if not isinstance(scrut, TRec):
            raise self.fail(f"unfold expects a recursive type, inferred {show(scrut)}")
        x, body = self._open(t.body)
        a = self.fresh.name(scrut.body.hint)
        inner = open_bind(scrut.body, TVar(a))
        results: list[Node] = []
        c0 = ctx.bind(x, basetype(a, inner))
        _, c0 = self.fresh_hypothesis(c0, TEqual(t.t, Fold(None, Var(x))))
        _, c0 = self.fresh_hypothesis(c0, TEqual(scrut.index, Zero()))
        if not self.dead(c0, "Infer Unfold"):
            results.append(self.infer(c0, body))
        pn = self.fresh.name("n")
        c1 = ctx.bind(pn, TNat())
        c1 = c1.bind(x, open_bind(scrut.body, TRec(Var(pn), scrut.body)))
        _, c1 = self.fresh_hypothesis(c1, TEqual(t.t, Fold(None, Var(x))))
        _, c1 = self.fresh_hypothesis(c1, TEqual(scrut.index, Succ(Var(pn))))
        if not self.dead(c1, "Infer Unfold"):
            results.append(self.infer(c1, body))
        if not results:
            return TBot()
        if len(results) == 2 and not type_eq(results[0], results[1]):
            raise self.fail(
                f"unfold branches disagree: {show(results[0])} vs {show(results[1])}"
            )
        out = results[-1] if len(results) == 1 else results[0]
        if free_vars(out) & {x, pn}:
            raise self.fail("the unfold result type mentions a case variable")
        return out

    def _unfold_gen(self, ctx: Context, t: Unfold, scrut: Node, alpha: Bind) -> Node:
        x, body = self._open(t.body)
        c = ctx.bind(x, open_bind(alpha, scrut))
        _, c = self.fresh_hypothesis(c, TEqual(t.t, Fold(None, Var(x))))
        out = self.infer(c, body)
        if x in free_vars(out):
            raise self.fail(f"the unfold result type mentions the unfolded variable: {show(out)}")
        return out

    def _infer_err(self, ctx: Context, t: Err) -> Node:
        if t.ty is None:
            raise self.fail("err needs a type annotation")
        self.emit(ctx, Tru(), Fls(), "Infer Err")
        return t.ty

    def _infer_refl(self, ctx: Context, t: Refl) -> Node:
        if t.a is None or t.b is None:
            raise self.fail("refl needs both terms")
        self.emit(ctx, t.a, t.b, "Infer Refl")
        return TEqual(t.a, t.b)

    # ---------------------------------------------------------------- check

    def check(self, ctx: Context, t: Node, ty: Node) -> Node:
        """Check `t` against `ty`; returns the most precise type established for `t`."""
        ty = simplify(ty)
        first: Optional[CheckFailure] = None
        for rule, applies in CHECK_RULES:
            if not applies(t, ty):
                continue
            mark = self._mark()
            try:
                with self._rule(rule, f"{show(t)} : {show(ty)}"):
                    return getattr(self, method_name(rule))(ctx, t, ty)
            except CheckFailure as e:
                self._rollback(mark)
                first = first or e
                if rule in _COMMITTED:
                    break
        assert first is not None
        raise first

    def _check_if(self, ctx: Context, t: If, ty: Node) -> Node:
        self.check(ctx, t.c, TBool())
        _, c1 = self.fresh_hypothesis(ctx, TEqual(t.c, Tru()))
        self.check(c1, t.a, ty)
        _, c2 = self.fresh_hypothesis(ctx, TEqual(t.c, Fls()))
        self.check(c2, t.b, ty)
        return ty

    def _check_match(self, ctx: Context, t: Match, ty: Node) -> Node:
        self.check(ctx, t.tn, TNat())
        _, c0 = self.fresh_hypothesis(ctx, TEqual(t.tn, Zero()))
        self.check(c0, t.t0, ty)
        n, ts = self._open(t.ts)
        c1 = ctx.bind(n, TNat())
        _, c1 = self.fresh_hypothesis(c1, TEqual(t.tn, Succ(Var(n))))
        self.check(c1, ts, ty)
        return ty

    def _check_either_match(self, ctx: Context, t: EitherMatch, ty: Node) -> Node:
        sum_ty = self.expect(self.infer(ctx, t.t), TSum, "a sum type")
        for b, side, inj in ((t.left, sum_ty.a, Inl), (t.right, sum_ty.b, Inr)):
            x, body = self._open(b)
            c = ctx.bind(x, side)
            _, c = self.fresh_hypothesis(c, TEqual(t.t, inj(Var(x))))
            self.check(c, body, ty)
        return ty

    def _check_unfold(self, ctx: Context, t: Unfold, ty: Node) -> Node:
        # the expected type is pushed into the branches, so it never mentions x
        scrut = simplify(self.infer(ctx, t.t))
        while isinstance(scrut, TRefine):
            scrut = scrut.ty
        x, body = self._open(t.body)
        alpha = rec_inf_body(scrut)
        if alpha is not None and spos(x, open_bind(alpha, TVar(x))):
            c = ctx.bind(x, open_bind(alpha, scrut))
            _, c = self.fresh_hypothesis(c, TEqual(t.t, Fold(None, Var(x))))
            self.check(c, body, ty)
            return ty
        if not isinstance(scrut, TRec):
            raise self.fail(f"unfold expects a recursive type, inferred {show(scrut)}")
        a = self.fresh.name(scrut.body.hint)
        c0 = ctx.bind(x, basetype(a, open_bind(scrut.body, TVar(a))))
        _, c0 = self.fresh_hypothesis(c0, TEqual(t.t, Fold(None, Var(x))))
        _, c0 = self.fresh_hypothesis(c0, TEqual(scrut.index, Zero()))
        if not self.dead(c0, "Check Unfold"):
            self.check(c0, body, ty)
        pn = self.fresh.name("n")
        c1 = ctx.bind(pn, TNat())
        c1 = c1.bind(x, open_bind(scrut.body, TRec(Var(pn), scrut.body)))
        _, c1 = self.fresh_hypothesis(c1, TEqual(t.t, Fold(None, Var(x))))
        _, c1 = self.fresh_hypothesis(c1, TEqual(scrut.index, Succ(Var(pn))))
        if not self.dead(c1, "Check Unfold"):
            self.check(c1, body, ty)
        return ty

    def _check_let(self, ctx: Context, t: Let, ty: Node) -> Node:
        t1 = self.infer(ctx, t.t)
        x, body = self._open(t.body)
        c = ctx.bind(x, t1)
        _, c = self.fresh_hypothesis(c, TEqual(Var(x), t.t))
        self.check(c, body, ty)
        return ty

    def _check_forall(self, ctx: Context, t: Node, ty: TForall) -> Node:
        x, body = self._open(ty.body)
        self.check(ctx.bind(x, TNat()), t, body)
        return ty

    def _check_pi(self, ctx: Context, t: Node, ty: TPi) -> Node:
        x, cod = self._open(ty.body)
        c = ctx.bind(x, ty.dom)
        if isinstance(t, Lam):
            # (lambda y:T. b) x reduces to b[y := x]; check x against T and b in checking mode
            if t.ty is not None and not type_eq(t.ty, ty.dom):
                self.check(c, Var(x), t.ty)
            self.check(c, open_bind(t.body, Var(x)), cod)
        else:
            self.check(c, App(t, Var(x)), cod)
        return ty

    def _check_sigma(self, ctx: Context, t: Node, ty: TSigma) -> Node:
        if isinstance(t, Pair):
            first, second = t.a, t.b
        else:
            first, second = Fst(t), Snd(t)
        self.check(ctx, first, ty.dom)
        x, cod = self._open(ty.body)
        c = ctx.bind(x, ty.dom)
        _, c = self.fresh_hypothesis(c, TEqual(Var(x), first))
        self.check(c, second, cod)
        return ty

    def _check_refinement(self, ctx: Context, t: Node, ty: TRefine) -> Node:
        witness = self.check(ctx, t, ty.ty)
        x, b = self._open(ty.body)
        c = ctx.bind(x, witness)
        _, c = self.fresh_hypothesis(c, TEqual(Var(x), t))
        self.emit(c, b, Tru(), "Check Refinement")
        return ty

    def _check_type_abs(self, ctx: Context, t: Node, ty: TPoly) -> Node:
        a, body = self._open(ty.body, TVar)
        c = ctx.add_tvar(a)
        if isinstance(t, TyAbs):
            self.check(c, open_bind(t.body, TVar(a)), body)
        else:
            self.check(c, TyApp(t, TVar(a)), body)
        return ty

    def _check_recursive(self, ctx: Context, t: Node, ty: TRec) -> Node:
        got = self.expect(self.infer(ctx, t), TRec, "a recursive type")
        if not type_eq(TRec(ty.index, got.body), ty):
            raise self.fail(f"recursive types differ: {show(got)} vs {show(ty)}")
        self.emit(ctx, ty.index, got.index, "Check Recursive")
        return got

    def _check_left(self, ctx: Context, t: Inl, ty: TSum) -> Node:
        self.check(ctx, t.t, ty.a)
        return ty

    def _check_right(self, ctx: Context, t: Inr, ty: TSum) -> Node:
        self.check(ctx, t.t, ty.b)
        return ty

    def _check_top_1(self, ctx: Context, t: Node, ty: Node) -> Node:
        return ty

    def _check_top_2(self, ctx: Context, t: Node, ty: Node) -> Node:
        return self.infer(ctx, t)

    def _check_reflexive(self, ctx: Context, t: Node, ty: Node) -> Node:
        got = self.infer(ctx, t)
        cur = got
        while True:
            if type_eq(cur, ty):
                return got
            if isinstance(cur, TRefine):
                cur = simplify(cur.ty)
                continue
            raise self.fail(f"inferred {show(got)}, expected {show(ty)}")


# ------------------------------------------------------------------ API


def infer(ctx: Context, t: Node, refute: Optional[Refuter] = None) -> CheckReport:
    ck = Checker(refute)
    try:
        ty = ck.infer(ctx, t)
    except CheckFailure as e:
        return CheckReport(False, None, ck.vcs, str(e), ck.root)
    return CheckReport(True, ty, ck.vcs, None, ck.root)


def check(ctx: Context, t: Node, ty: Node, refute: Optional[Refuter] = None) -> CheckReport:
    ck = Checker(refute)
    try:
        ck.check(ctx, t, ty)
    except CheckFailure as e:
        return CheckReport(False, None, ck.vcs, str(e), ck.root)
    return CheckReport(True, ty, ck.vcs, None, ck.root)


def fresh_hypothesis(ctx: Context, ty: Node, fresh: Optional[Fresh] = None) -> tuple[str, Context]:
    fresh = fresh or Fresh()
    p = fresh.name("p")
    while p in ctx.domain():
        p = fresh.name("p")
    return p, ctx.bind(p, ty)
