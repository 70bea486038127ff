"""Translate surface definitions to annotated core terms.

A recursive definition with measure `m` becomes

    fix[n => Pi x: {x: {x: T | pre} | m <= n}. {res: R | post}](
      (n, f) => \\x. E[x, f a := ((inst f (pred n)) ()) a])

and a definition without recursion becomes an annotated lambda checked
against the same type.  Parameters are curried; the precondition and
the measure refinement sit on the last parameter, where every parameter
is in scope.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from ..syntax import (
    App, Bind, Err, Fix, Fls, Fold, Fresh, Fst, If, Inl, Inr, Inst, Lam, Let,
    Match, Node, Pair, Size, Snd, Succ, TBool, TForall, TNat, TPi, TPoly, TRefine,
    TSigma, TSum, TTop, TUnit, TVar, Tru, TyAbs, TyApp, Unfold, Unit, Var, Zero,
    EitherMatch, bind, build_nat, close, list_type, rec_inf_body, stream,
    stream_n, tbind, weaken,
)
from .stdlib import CoreDef
from .surface import (
    DefSpec, Param, Pattern, SApp, SBin, SCase, SConst, SCtor, SExpr, SField, SIf,
    SLam, SLet, SLocalDef, SMatch, SNot, SNum, SRecCall, STuple, STyApp, SType,
    SUnfold, SVar, SurfaceError, SurfaceModule, TyApp_, TyArrow, TyName,
    TyRefine, TyTuple,
)

BUILTIN_ARITY = {"succ": 1, "size": 1, "fst": 1, "snd": 1, "Left": 1, "Right": 1,
                 "Cons": 2, "Stream": 2}
_BASE_TYPES = {"Nat": TNat(), "Bool": TBool(), "Unit": TUnit(), "Top": TTop()}


@dataclass(frozen=True)
class Callee:
    """How to call a definition: `plain` functions, `fix` (measure), `ghost` (explicit index)."""

    kind: str
    arity: int
    tparams: tuple[str, ...] = ()
    params: tuple[str, ...] = ()
    measure: Optional[SExpr] = None


def callee_of_type(ty: Node) -> Callee:
    kind = "plain"
    if isinstance(ty, TForall) and isinstance(ty.dom, TNat) and rec_inf_body(ty) is None:
        kind, ty = "ghost", ty.body.body
    tps = []
    while isinstance(ty, TPoly):
        tps.append(ty.body.hint)
        ty = ty.body.body
    arity = 0
    while isinstance(ty, TPi):
        arity += 1
        ty = ty.body.body
    return Callee(kind, arity + (kind == "ghost"), tuple(tps))


@dataclass(frozen=True)
class Frame:
    """An enclosing recursive definition: its recursion variable and fix index."""

    y: str
    n: str
    spec: DefSpec


@dataclass(frozen=True)
class Scope:
    locals: Mapping[str, Node] = field(default_factory=dict)
    tvars: frozenset[str] = frozenset()
    frames: Mapping[str, Frame] = field(default_factory=dict)
    callees: Mapping[str, Callee] = field(default_factory=dict)

    def bind(self, x: str, v: Optional[Node] = None) -> "Scope":
        return dataclasses.replace(
            self, locals={**self.locals, x: v if v is not None else Var(x)},
            frames={k: f for k, f in self.frames.items() if k != x},
            callees={k: c for k, c in self.callees.items() if k != x})


def _spine(e: SExpr) -> tuple[SExpr, list[SExpr]]:
    args: list[SExpr] = []
    while isinstance(e, SApp):
        args.append(e.arg)
        e = e.fn
    return e, args[::-1]


def _flatten(args: list[SExpr], arity: int) -> list[SExpr]:
    if len(args) == 1 and arity >= 2 and isinstance(args[0], STuple) and len(args[0].items) == arity:
        return list(args[0].items)
    return args


def _pos_of(e: object) -> tuple[int, int]:
    p = getattr(e, "pos", None)
    return (p.line, p.col) if p is not None else (0, 0)


def _err(e: object, msg: str) -> SurfaceError:
    return SurfaceError(msg, *_pos_of(e))


def _strip(ty: Optional[Node]) -> Optional[Node]:
    while isinstance(ty, TRefine):
        ty = ty.ty
    return ty


# ------------------------------------------------------------ surface rewriting


def _mentions(e: object, name: str) -> bool:
    """Whether `name` is referenced anywhere below `e` (binders are ignored)."""
    match e:
        case SVar(x):
            return x == name
        case SRecCall(target, _) if target == name:
            return True
    if dataclasses.is_dataclass(e) and not isinstance(e, type):
        return any(_mentions(getattr(e, f.name), name) for f in dataclasses.fields(e))
    if isinstance(e, tuple):
        return any(_mentions(x, name) for x in e)
    return False


def _pattern_names(p: Pattern) -> set[str]:
    return set(p.names)


def rename(e: SExpr, mapping: Mapping[str, SExpr]) -> SExpr:
    """Replace free variables of `e`; shadowing binders stop the replacement."""
    if not mapping:
        return e

    def drop(names: Iterable[str]) -> Mapping[str, SExpr]:
        names = set(names)
        return {k: v for k, v in mapping.items() if k not in names}

    match e:
        case SVar(x):
            return mapping.get(x, e)
        case SLam(x, ty, body):
            return SLam(x, ty, rename(body, drop([x])))
        case SLet(names, value, body):
            return SLet(names, rename(value, mapping), rename(body, drop(names)))
        case SUnfold(s, x, body):
            return SUnfold(rename(s, mapping), x, rename(body, drop([x])))
        case SMatch(s, cases, pos):
            return SMatch(rename(s, mapping),
                          tuple(SCase(c.pat, rename(c.body, drop(_pattern_names(c.pat))), c.pos) for c in cases),
                          pos)
        case SLocalDef(d, body):
            inner = drop([p.name for p in d.params])
            d2 = dataclasses.replace(
                d, body=rename(d.body, inner),
                pre=None if d.pre is None else rename(d.pre, inner),
                measure=tuple(rename(m, inner) for m in d.measure),
                post=None if d.post is None else (d.post[0], rename(d.post[1], drop([p.name for p in d.params] + [d.post[0]]))))
            return SLocalDef(d2, rename(body, drop([d.name])))
    if dataclasses.is_dataclass(e):
        changes = {}
        for f in dataclasses.fields(e):
            v = getattr(e, f.name)
            if isinstance(v, SExpr):
                changes[f.name] = rename(v, mapping)
            elif isinstance(v, tuple) and v and all(isinstance(x, SExpr) for x in v):
                changes[f.name] = tuple(rename(x, mapping) for x in v)
        return dataclasses.replace(e, **changes) if changes else e
    return e


def replace_calls(e: SExpr, name: str, fn) -> SExpr:
    """Rewrite every saturated call `name(args)` bottom-up with `fn(args)`."""
    head, args = _spine(e)
    if isinstance(head, SVar) and head.name == name and args:
        return fn([replace_calls(a, name, fn) for a in args])
    if isinstance(e, SVar):
        return e
    if dataclasses.is_dataclass(e):
        changes = {}
        for f in dataclasses.fields(e):
            v = getattr(e, f.name)
            if isinstance(v, SExpr):
                changes[f.name] = replace_calls(v, name, fn)
            elif isinstance(v, tuple) and v and all(isinstance(x, (SExpr, SCase)) for x in v):
                changes[f.name] = tuple(
                    SCase(x.pat, replace_calls(x.body, name, fn), x.pos) if isinstance(x, SCase)
                    else replace_calls(x, name, fn) for x in v)
        return dataclasses.replace(e, **changes) if changes else e
    return e


def desugar_lex(d: DefSpec) -> DefSpec:
    """Encode a lexicographic measure (m1, m2) with an inner definition decreasing on m2."""
    if len(d.measure) != 2:
        raise _err(d, f"{d.name}: desugar_lex expects exactly two measures")
    if any(p.ghost for p in d.params):
        raise _err(d, f"{d.name}: @ghost parameters cannot be combined with a lexicographic measure")
    m1, m2 = d.measure
    g = f"{d.name}#lex"
    params = [p.name for p in d.params]
    ys = {p: SVar(f"{p}#y") for p in params}
    counter = iter(range(1 << 30))

    def guard(args: list[SExpr]) -> SExpr:
        args = _flatten(args, len(params))
        if len(args) != len(params):
            raise _err(d, f"{d.name} expects {len(params)} argument(s)")
        zs = [f"z#{next(counter)}" for _ in args]
        m1z = rename(m1, {p: SVar(z) for p, z in zip(params, zs)})
        call: SExpr = SIf(SBin("<", m1z, m1),
                          SRecCall(d.name, tuple(SVar(z) for z in zs)),
                          SRecCall(g, tuple(SVar(z) for z in zs)))
        for z, a in reversed(list(zip(zs, args))):
            call = SLet((z,), a, call)
        return call

    body = rename(replace_calls(d.body, d.name, guard), ys)
    same = SBin("==", rename(m1, ys), m1)
    pre = same if d.pre is None else SBin("&&", same, rename(d.pre, ys))
    post = None if d.post is None else (d.post[0], rename(d.post[1], ys))
    inner = DefSpec(g, tuple(Param(f"{p.name}#y", p.ty) for p in d.params), d.ret, body,
                    pre, (rename(m2, ys),), post, (), d.pos)
    outer_body = SLocalDef(inner, SApp(SVar(g), STuple(tuple(SVar(p) for p in params)))
                           if len(params) > 1 else SApp(SVar(g), SVar(params[0])))
    return dataclasses.replace(d, measure=(m1,), body=outer_body)


# ------------------------------------------------------------ translation


class Desugarer:
    def __init__(self, callees: Mapping[str, Callee], untyped: bool = False):
        self.callees = dict(callees)
        self.untyped = untyped
        self.fresh = Fresh()

    # types
    def type(self, t: SType, sc: Scope) -> Node:
        match t:
            case TyName(name):
                if name in sc.tvars:
                    return TVar(name)
                if name in _BASE_TYPES:
                    return _BASE_TYPES[name]
                if name == "List":
                    return list_type()
                raise SurfaceError(f"unknown type {name}", 0, 0)
            case TyApp_("Stream", (elem,)):
                return stream(self.type(elem, sc))
            case TyApp_("Stream", (index, elem)):
                return stream_n(self.term(index, sc), self.type(elem, sc))
            case TyApp_("Either", (a, b)):
                return TSum(self.type(a, sc), self.type(b, sc))
            case TyArrow(x, dom, cod):
                d = self.type(dom, sc)
                if x is None:
                    return TPi(d, weaken(self.type(cod, sc)))
                return TPi(d, bind(x, self.type(cod, sc.bind(x))))
            case TyTuple(items):
                out = self.type(items[-1], sc)
                for it in reversed(items[:-1]):
                    out = TSigma(self.type(it, sc), weaken(out))
                return out
            case TyRefine(x, base, pred):
                return TRefine(self.type(base, sc), bind(x, self.term(pred, sc.bind(x))))
        raise SurfaceError(f"unsupported type {t}", 0, 0)

    # terms
    def term(self, e: SExpr, sc: Scope, expect: Optional[Node] = None) -> Node:
        match e:
            case SNum(k):
                return build_nat(k)
            case SConst(name):
                return {"true": Tru(), "false": Fls(), "()": Unit(), "zero": Zero(), "err": Err(),
                        "Nil": Fold(list_type(), Inl(Unit()))}[name]
            case SVar(x) if x in sc.locals:
                return sc.locals[x]
            case SVar() | SApp() | STyApp():
                return self.call(e, sc, expect)
            case STuple(items):
                out = self.term(items[-1], sc)
                for it in reversed(items[:-1]):
                    out = Pair(self.term(it, sc), out)
                return out
            case SCtor("fold", (arg,), ty):
                return Fold(self.type(ty, sc), self.term(arg, sc))
            case SCtor("Cons", (h, t)):
                return self.builtin("Cons", [h, t], sc, expect, e)
            case SLam(x, ty, body):
                dom = None if ty is None else self.type(ty, sc)
                return Lam(dom, bind(x, self.term(body, sc.bind(x))))
            case SIf(c, a, b):
                return If(self.term(c, sc), self.term(a, sc, expect), self.term(b, sc, expect))
            case SLet((x,), value, body):
                return Let(self.term(value, sc), bind(x, self.term(body, sc.bind(x), expect)))
            case SLet((a, b), value, body):
                p = self.fresh.name("p")
                inner = sc.bind(a).bind(b)
                rest = Let(Snd(Var(p)), bind(b, self.term(body, inner, expect)))
                return Let(self.term(value, sc), bind(p, Let(Fst(Var(p)), bind(a, rest))))
            case SBin(op, a, b):
                return self.binary(e, op, a, b, sc)
            case SNot(a):
                return If(self.term(a, sc), Fls(), Tru())
            case SField(a, "_1"):
                return Fst(self.term(a, sc))
            case SField(a, "_2"):
                return Snd(self.term(a, sc))
            case SField(a, "head"):
                x = self.fresh.name("s")
                return Unfold(self.term(a, sc), bind(x, Fst(Var(x))))
            case SField(a, "tail"):
                x = self.fresh.name("s")
                return Unfold(self.term(a, sc), bind(x, App(Snd(Var(x)), Unit())))
            case SUnfold(a, x, body):
                return Unfold(self.term(a, sc), bind(x, self.term(body, sc.bind(x), expect)))
            case SMatch():
                return self.match(e, sc, expect)
            case SLocalDef(d, body):
                term, _, callee = self.definition(d, sc)
                inner = dataclasses.replace(sc.bind(d.name), callees={**sc.callees, d.name: callee})
                return Let(term, bind(d.name, self.term(body, inner, expect)))
            case SRecCall(target, args):
                return self.recursive_call(sc.frames[target], list(args), (), sc)
        raise _err(e, f"cannot translate {type(e).__name__}")

    def binary(self, e: SExpr, op: str, a: SExpr, b: SExpr, sc: Scope) -> Node:
        if op == "-":
            if b != SNum(1):
                raise _err(e, "subtraction is only supported as `n - 1`")
            return App(Var("pred"), self.term(a, sc))
        if op == "&&":
            return If(self.term(a, sc), self.term(b, sc), Fls())
        if op == "||":
            return If(self.term(a, sc), Tru(), self.term(b, sc))
        if op == "!=":
            return If(self.binary(e, "==", a, b, sc), Fls(), Tru())
        fn, swap = {"+": ("plus", False), "==": ("equalNat", False), "<": ("lessThan", False),
                    "<=": ("lessEqual", False), ">": ("lessThan", True), ">=": ("lessEqual", True)}[op]
        x, y = self.term(a, sc), self.term(b, sc)
        if swap:
            x, y = y, x
        return App(App(Var(fn), x), y)

    # calls
    def call(self, e: SExpr, sc: Scope, expect: Optional[Node]) -> Node:
        head, args = _spine(e)
        tys: tuple[SType, ...] = ()
        if isinstance(head, STyApp):
            head, tys = head.fn, head.types
        if not isinstance(head, SVar) or (head.name in sc.locals and head.name not in sc.callees):
            if tys:
                raise _err(e, "type arguments apply to definitions only")
            out = self.term(head, sc)
            for a in args:
                out = App(out, self.term(a, sc))
            return out
        name = head.name
        if name in sc.frames:
            return self.recursive_call(sc.frames[name], args, tys, sc, head)
        if name in BUILTIN_ARITY:
            if tys:
                raise _err(head, f"{name} takes no type arguments")
            return self.builtin(name, args, sc, expect, head)
        c = sc.callees.get(name, self.callees.get(name))
        if c is None:
            raise _err(head, f"unbound name {name}")
        if c.kind != "plain":
            args = _flatten(args, c.arity)
            if len(args) < c.arity:
                raise _err(head, f"{name} must be applied to {c.arity} argument(s)")
        elif c.arity >= 2:
            args = _flatten(args, c.arity)
        out: Node = Var(name)
        rest = args
        if c.kind == "ghost":
            out, rest = Inst(out, self.term(args[0], sc)), args[1:]
        elif c.kind == "fix":
            actual = {p: self.term(a, sc) for p, a in zip(c.params, args)}
            measure_scope = dataclasses.replace(sc, locals={**sc.locals, **actual})
            out = Inst(out, self.term(c.measure, measure_scope))
        out = self.type_args(out, c.tparams, tys, head)
        for a in rest:
            out = App(out, self.term(a, sc))
        return out

    def type_args(self, out: Node, tparams: tuple[str, ...], tys: tuple[SType, ...], where: object,
                  sc: Optional[Scope] = None, default: Optional[list[Node]] = None) -> Node:
        if tys and len(tys) != len(tparams):
            raise _err(where, f"expected {len(tparams)} type argument(s), got {len(tys)}")
        if tys:
            scope = sc if sc is not None else Scope()
            return _apply_types(out, [self.type(t, scope) for t in tys])
        if default is not None:
            return _apply_types(out, default)
        if tparams and not self.untyped:
            name = getattr(where, "name", "definition")
            raise _err(where, f"{name} needs {len(tparams)} type argument(s)")
        return _apply_types(out, [None] * len(tparams))

    def recursive_call(self, fr: Frame, args: list[SExpr], tys: tuple[SType, ...], sc: Scope,
                       where: object = None) -> Node:
        d = fr.spec
        args = _flatten(args, len(d.params))
        if len(args) < len(d.params):
            raise _err(where or d, f"recursive call to {d.name} must be applied to {len(d.params)} argument(s)")
        if d.params and d.params[0].ghost:
            index, rest = self.term(args[0], sc), args[1:]
        else:
            index, rest = App(Var("pred"), Var(fr.n)), args
        out: Node = App(Inst(Var(fr.y), index), Unit())
        out = self.type_args(out, d.tparams, tys, where or d, sc, [TVar(a) for a in d.tparams])
        for a in rest:
            out = App(out, self.term(a, sc))
        return out

    def builtin(self, name: str, args: list[SExpr], sc: Scope, expect: Optional[Node], where: object) -> Node:
        k = BUILTIN_ARITY[name]
        args = _flatten(args, k)
        if len(args) != k:
            raise _err(where, f"{name} takes {k} argument(s)")
        xs = [self.term(a, sc) for a in args]
        match name:
            case "succ":
                return Succ(xs[0])
            case "size":
                return Size(xs[0])
            case "fst":
                return Fst(xs[0])
            case "snd":
                return Snd(xs[0])
            case "Left":
                return Inl(xs[0])
            case "Right":
                return Inr(xs[0])
            case "Cons":
                return Fold(list_type(), Inr(Pair(xs[0], xs[1])))
            case "Stream":
                ty = _strip(expect)
                if ty is None:
                    raise _err(where, "Stream(h, t) needs a known stream type (use it in result position)")
                return Fold(ty, Pair(xs[0], Lam(TUnit(), weaken(xs[1]))))
        raise AssertionError(name)

    # matching
    def match(self, e: SMatch, sc: Scope, expect: Optional[Node]) -> Node:
        kinds = {c.pat.kind for c in e.cases} - {"var"}
        families = [("list", {"Nil", "Cons"}), ("nat", {"zero", "succ"}), ("sum", {"Left", "Right"}),
                    ("bool", {"true", "false"}), ("pair", {"pair"})]
        fam = next((f for f, ks in families if kinds and kinds <= ks), None)
        if kinds and fam is None:
            raise _err(e, f"patterns of different types in one match: {sorted(kinds)}")
        scrut = self.term(e.scrut, sc)
        if not isinstance(scrut, Var):
            tmp = self.fresh.name("m")
            return Let(scrut, bind(tmp, self._match_on(Var(tmp), fam, e, sc.bind(tmp), expect)))
        return self._match_on(scrut, fam, e, sc, expect)

    def _match_on(self, s: Node, fam: Optional[str], e: SMatch, sc: Scope, expect: Optional[Node]) -> Node:
        table: dict[str, SCase] = {}
        default: Optional[SCase] = None
        for c in e.cases:
            key = c.pat.kind
            if key == "var":
                if default is None:
                    default = c
                continue
            if key in table:
                raise _err(c, f"duplicate case {key}")
            table[key] = c

        def branch(kind: str, fields: list[Node]) -> Node:
            c = table.get(kind)
            if c is not None:
                names = list(c.pat.names)
                return self._bind_fields(names, fields, c.body, sc, expect)
            if default is None:
                raise _err(e, f"non-exhaustive match: missing case {kind}")
            return self._bind_fields(list(default.pat.names), [s], default.body, sc, expect)

        match fam:
            case None:
                assert default is not None
                return branch("var", [])
            case "nat":
                k = self.fresh.name("k")
                return Match(s, branch("zero", []), bind(k, branch("succ", [Var(k)])))
            case "bool":
                return If(s, branch("true", []), branch("false", []))
            case "sum":
                x, y = self.fresh.name("l"), self.fresh.name("r")
                return EitherMatch(s, bind(x, branch("Left", [Var(x)])), bind(y, branch("Right", [Var(y)])))
            case "pair":
                return branch("pair", [Fst(s), Snd(s)])
            case "list":
                u, w, p = self.fresh.name("u"), self.fresh.name("w"), self.fresh.name("p")
                nil = branch("Nil", [])
                cons = branch("Cons", [Fst(Var(p)), Snd(Var(p))])
                return Unfold(s, bind(u, EitherMatch(Var(u), bind(w, nil), bind(p, cons))))
        raise AssertionError(fam)

    def _bind_fields(self, names: list[str], fields: list[Node], body: SExpr, sc: Scope,
                     expect: Optional[Node]) -> Node:
        if len(names) > len(fields):
            names = names[: len(fields)]
        bound: list[tuple[str, Node]] = []
        inner = sc
        for x, v in zip(names, fields):
            if x == "_":
                continue
            if isinstance(v, Var):
                inner = inner.bind(x, v)
            else:
                bound.append((x, v))
                inner = inner.bind(x)
        out = self.term(body, inner, expect)
        for x, v in reversed(bound):
            out = Let(v, bind(x, out))
        return out

    # definitions
    def definition(self, d: DefSpec, sc: Scope) -> tuple[Node, Optional[Node], Callee]:
        """Core term, expected type (None for fixpoints, whose type is inferred), call info."""
        if len(d.measure) > 2:
            raise _err(d, f"{d.name}: at most two measures are supported")
        if len(d.measure) == 2:
            d = desugar_lex(d)
        for part in [d.pre, d.post[1] if d.post else None, *d.measure]:
            if part is not None and _mentions(part, d.name):
                raise _err(d, f"{d.name}: contracts and measures cannot refer to {d.name} itself")
        ghosts = [i for i, p in enumerate(d.params) if p.ghost]
        if ghosts:
            if ghosts != [0] or d.params[0].ty != TyName("Nat") or d.measure != (SVar(d.params[0].name),):
                raise _err(d, f"{d.name}: @ghost is only allowed on a first Nat parameter that is the measure")
        recursive = _mentions(d.body, d.name)
        if recursive and not d.measure:
            raise _err(d, f"{d.name} is recursive but has no decreases clause")
        sc = dataclasses.replace(sc, tvars=sc.tvars | set(d.tparams))
        arity = len(d.params)
        if not recursive:
            ty, term = self._abstraction(d, sc, None)
            return term, ty, Callee("plain", arity, d.tparams)
        n, y = self.fresh.name("n"), self.fresh.name(d.name)
        frame = Frame(y, n, d)
        inner = dataclasses.replace(sc, frames={**sc.frames, d.name: frame})
        ann, body = self._abstraction(d, inner, n)
        term = Fix(close(Var(n), ann, "n"), close(Var(n), close(Var(y), body, d.name), "n"))
        if ghosts:
            return term, None, Callee("ghost", arity, d.tparams)
        return term, None, Callee("fix", arity, d.tparams, tuple(p.name for p in d.params), d.measure[0])

    def _abstraction(self, d: DefSpec, sc: Scope, index: Optional[str]) -> tuple[Node, Node]:
        """The function type and the lambda nest for `d`; `index` is the fix index, if any."""
        params = list(d.params)
        if params and params[0].ghost:
            assert index is not None
            sc = sc.bind(params[0].name, Var(index))
            params = params[1:]
        doms: list[tuple[str, Node]] = []
        for i, p in enumerate(params):
            ty = self.type(p.ty, sc)
            last = i == len(params) - 1
            if last and d.pre is not None:
                ty = TRefine(ty, bind(p.name, self.term(d.pre, sc.bind(p.name))))
            if last and index is not None and not d.params[0].ghost:
                m = self.term(d.measure[0], sc.bind(p.name))
                ty = TRefine(ty, bind(p.name, App(App(Var("lessEqual"), m), Var(index))))
            doms.append((p.name, ty))
            sc = sc.bind(p.name)
        if not params and (d.pre is not None):
            raise _err(d, f"{d.name}: a precondition needs a parameter")
        ret = self.type(d.ret, sc)
        if d.post is not None:
            res, post = d.post
            ret = TRefine(ret, bind(res, self.term(post, sc.bind(res))))
        body = self.term(d.body, sc, ret)
        ty, term = ret, body
        for x, dom in reversed(doms):
            ty = TPi(dom, bind(x, ty))
            term = Lam(dom, bind(x, term))
        for a in reversed(d.tparams):
            ty = TPoly(tbind(a, ty))
            term = TyAbs(tbind(a, term))
        return ty, term


def _apply_types(t: Node, tys: list[Optional[Node]]) -> Node:
    for ty in tys:
        t = TyApp(t, ty)
    return t


def desugar(d: DefSpec, callees: Optional[Mapping[str, Callee]] = None) -> Node:
    """The annotated core term of a single definition."""
    term, _, _ = Desugarer(callees or {}).definition(d, _scope(callees or {}))
    return term


def _scope(callees: Mapping[str, Callee]) -> Scope:
    return Scope(callees=dict(callees))


def desugar_module(mod: SurfaceModule, callees: Mapping[str, Callee],
                   untyped: bool = False) -> tuple[list[CoreDef], list[Node]]:
    """Core definitions in order, then the translated top-level expressions."""
    ds = Desugarer(callees, untyped)
    out: list[CoreDef] = []
    for d in mod.defs:
        if d.name in ds.callees:
            raise _err(d, f"{d.name} is already defined")
        term, expected, callee = ds.definition(d, Scope())
        ds.callees[d.name] = callee
        out.append(CoreDef(d.name, term, expected, d.pos.line))
    ds.untyped = True
    exprs = [ds.term(e, Scope()) for e in mod.exprs]
    return out, exprs


def translate_expr(e: SExpr, callees: Mapping[str, Callee]) -> Node:
    return Desugarer(callees, untyped=True).term(e, Scope())
