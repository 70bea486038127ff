"""Canonical S-expression text for terms and types.

Terms::

    x  unit  true  false  zero  err  refl  3
    (lambda x t)            (lambda (x T) t)
    (app f a ...)           (f a ...)            ; any non-keyword head
    (pair a b) (fst t) (snd t) (left t) (right t) (succ t) (size t)
    (either-match t x t1 y t2)  (if c a b)  (match tn t0 n ts)
    (rec tn t0 (n y) ts)    (rec (n T) tn t0 (n y) ts)
    (fix y t)               (fix (n T) (n y) t)
    (fold t) (fold T t)     (unfold t x body)
    (tlambda t) (tlambda X t)   (tapp t) (tapp t T)
    (err T) (refl a b) (let x t1 t2) (let (x T) t1 t2) (inst t a)

Types::

    Unit Bool Nat Top Bottom List X
    (pi x T U) (arrow T U ...) (sigma x T U) (times T U) (sum T U)
    (forall x T U) (poly X T) (rec-type n a T) (rec-inf a T)
    (refine x T b) (equal a b) (stream T) (stream-n n T) (list-n n)
    (let-type x t T) (if-type c T U) (match-type t T n U)
    (either-match-type t x T y U)

`(let (x T) t1 t2)` is read as `(app (lambda (x T) t2) t1)`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Union

from .syntax import (
    App, BVar, Bind, EitherMatch, Err, Fix, Fls, Fold, Fst, If, Inl, Inr, Inst,
    Lam, Let, Match, Node, Pair, Rec, Refl, Size, Snd, Succ, TBool, TBot,
    TEitherMatch, TEqual, TForall, TIf, TLet, TMatch, TNat, TPi, TPoly, TRec,
    TRefine, TSigma, TSum, TTop, TUnit, TVar, Tru, TyAbs, TyApp, Unfold, Unit,
    Var, Zero, arrow, bind, build_nat, free_type_vars, free_vars, list_n,
    list_type, nat_value, open_bind, rec_inf_body, stream, stream_n, tbind,
    times, vacuous, weaken, walk,
)


class SexprError(ValueError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {msg}" if line else msg)
        self.line, self.col = line, col


@dataclass
class Atom:
    text: str
    line: int
    col: int


@dataclass
class SList:
    items: list
    line: int
    col: int


SExp = Union[Atom, SList]

_TOKEN = re.compile(r"\s+|;[^\n]*|\(|\)|[^\s();]+")
IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_'\-?!*+<=>/]*$")


def read_all(text: str) -> list[SExp]:
    out: list[SExp] = []
    stack: list[SList] = []
    line, col = 1, 1
    for m in _TOKEN.finditer(text):
        tok = m.group()
        here = (line, col)
        nl = tok.count("\n")
        if nl:
            line += nl
            col = len(tok) - tok.rfind("\n")
        else:
            col += len(tok)
        if tok[0].isspace() or tok[0] == ";":
            continue
        if tok == "(":
            stack.append(SList([], *here))
        elif tok == ")":
            if not stack:
                raise SexprError("unexpected ')'", *here)
            done = stack.pop()
            (stack[-1].items if stack else out).append(done)
        else:
            (stack[-1].items if stack else out).append(Atom(tok, *here))
    if stack:
        raise SexprError("unclosed '('", stack[-1].line, stack[-1].col)
    return out


def read_one(text: str) -> SExp:
    forms = read_all(text)
    if len(forms) != 1:
        raise SexprError(f"expected one expression, found {len(forms)}")
    return forms[0]


# --------------------------------------------------------------- reading

TERM_KEYWORDS = {
    "lambda", "app", "pair", "fst", "snd", "left", "right", "succ", "size",
    "either-match", "if", "match", "rec", "fix", "fold", "unfold", "tlambda",
    "tapp", "err", "refl", "let", "inst",
}
TERM_ATOMS = {"unit", "true", "false", "zero", "err", "refl"}
TYPE_ATOMS = {"Unit": TUnit, "Bool": TBool, "Nat": TNat, "Top": TTop, "Bottom": TBot}


def _err(e: SExp, msg: str) -> SexprError:
    return SexprError(msg, e.line, e.col)


def _name(e: SExp) -> str:
    if not isinstance(e, Atom) or not IDENT.match(e.text) or e.text in TERM_KEYWORDS | TERM_ATOMS:
        raise _err(e, f"expected a variable name, got {_brief(e)}")
    return e.text


def _brief(e: SExp) -> str:
    return e.text if isinstance(e, Atom) else "(...)"


def _arity(e: SList, *counts: int) -> None:
    if len(e.items) - 1 not in counts:
        want = " or ".join(map(str, counts))
        raise _err(e, f"'{e.items[0].text}' expects {want} arguments, got {len(e.items) - 1}")


def term_of(e: SExp) -> Node:
    if isinstance(e, Atom):
        t = e.text
        if t.isdigit():
            return build_nat(int(t))
        match t:
            case "unit":
                return Unit()
            case "true":
                return Tru()
            case "false":
                return Fls()
            case "zero":
                return Zero()
            case "err":
                return Err(None)
            case "refl":
                return Refl(None, None)
        return Var(_name(e))
    if not e.items:
        return Unit()
    head = e.items[0]
    args = e.items[1:]
    kw = head.text if isinstance(head, Atom) else None
    if kw not in TERM_KEYWORDS:
        if not args:
            raise _err(e, "application needs an argument")
        return _apps(term_of(head), [term_of(a) for a in args])
    match kw:
        case "lambda":
            _arity(e, 2)
            if isinstance(args[0], SList):
                x, ty = _typed_binder(args[0])
                return Lam(ty, bind(x, term_of(args[1])))
            return Lam(None, bind(_name(args[0]), term_of(args[1])))
        case "app":
            if len(args) < 2:
                raise _err(e, "'app' expects a function and at least one argument")
            return _apps(term_of(args[0]), [term_of(a) for a in args[1:]])
        case "pair":
            _arity(e, 2)
            return Pair(term_of(args[0]), term_of(args[1]))
        case "fst" | "snd" | "left" | "right" | "succ" | "size":
            _arity(e, 1)
            cls = {"fst": Fst, "snd": Snd, "left": Inl, "right": Inr, "succ": Succ, "size": Size}[kw]
            return cls(term_of(args[0]))
        case "either-match":
            _arity(e, 5)
            return EitherMatch(
                term_of(args[0]),
                bind(_name(args[1]), term_of(args[2])),
                bind(_name(args[3]), term_of(args[4])),
            )
        case "if":
            _arity(e, 3)
            return If(*(term_of(a) for a in args))
        case "match":
            _arity(e, 4)
            return Match(term_of(args[0]), term_of(args[1]), bind(_name(args[2]), term_of(args[3])))
        case "rec":
            _arity(e, 4, 5)
            ann = None
            if len(args) == 5:
                n, ty = _typed_binder(args[0])
                ann = bind(n, ty)
                args = args[1:]
            n, y = _pair_binder(args[2])
            return Rec(ann, term_of(args[0]), term_of(args[1]), bind(n, bind(y, term_of(args[3]))))
        case "fix":
            _arity(e, 2, 3)
            if len(args) == 2:
                y = _name(args[0])
                return Fix(None, Bind(bind(y, term_of(args[1])), "_"))
            n, ty = _typed_binder(args[0])
            n2, y = _pair_binder(args[1])
            return Fix(bind(n, ty), bind(n2, bind(y, term_of(args[2]))))
        case "fold":
            _arity(e, 1, 2)
            if len(args) == 1:
                return Fold(None, term_of(args[0]))
            return Fold(type_of(args[0]), term_of(args[1]))
        case "unfold":
            _arity(e, 3)
            return Unfold(term_of(args[0]), bind(_name(args[1]), term_of(args[2])))
        case "tlambda":
            _arity(e, 1, 2)
            if len(args) == 1:
                return TyAbs(Bind(term_of(args[0]), "_"))
            return TyAbs(tbind(_name(args[0]), term_of(args[1])))
        case "tapp":
            _arity(e, 1, 2)
            return TyApp(term_of(args[0]), type_of(args[1]) if len(args) == 2 else None)
        case "err":
            _arity(e, 1)
            return Err(type_of(args[0]))
        case "refl":
            _arity(e, 2)
            return Refl(term_of(args[0]), term_of(args[1]))
        case "let":
            _arity(e, 3)
            if isinstance(args[0], SList):
                x, ty = _typed_binder(args[0])
                return App(Lam(ty, bind(x, term_of(args[2]))), term_of(args[1]))
            return Let(term_of(args[1]), bind(_name(args[0]), term_of(args[2])))
        case "inst":
            _arity(e, 2)
            return Inst(term_of(args[0]), term_of(args[1]))
    raise _err(e, f"unknown form {kw}")  # pragma: no cover


def _apps(f: Node, args: list[Node]) -> Node:
    for a in args:
        f = App(f, a)
    return f


def _typed_binder(e: SExp) -> tuple[str, Node]:
    if not isinstance(e, SList) or len(e.items) != 2:
        raise _err(e, "expected (name Type)")
    return _name(e.items[0]), type_of(e.items[1])


def _pair_binder(e: SExp) -> tuple[str, str]:
    if not isinstance(e, SList) or len(e.items) != 2:
        raise _err(e, "expected (n y)")
    return _name(e.items[0]), _name(e.items[1])


def type_of(e: SExp) -> Node:
    if isinstance(e, Atom):
        if e.text in TYPE_ATOMS:
            return TYPE_ATOMS[e.text]()
        if e.text == "List":
            return list_type()
        return TVar(_name(e))
    if not e.items or not isinstance(e.items[0], Atom):
        raise _err(e, "expected a type")
    kw = e.items[0].text
    args = e.items[1:]
    match kw:
        case "pi" | "sigma" | "forall":
            _arity(e, 3)
            cls = {"pi": TPi, "sigma": TSigma, "forall": TForall}[kw]
            return cls(type_of(args[1]), bind(_name(args[0]), type_of(args[2])))
        case "arrow":
            if len(args) < 2:
                raise _err(e, "'arrow' expects at least two types")
            tys = [type_of(a) for a in args]
            out = tys[-1]
            for t in reversed(tys[:-1]):
                out = arrow(t, out)
            return out
        case "times":
            _arity(e, 2)
            return times(type_of(args[0]), type_of(args[1]))
        case "sum":
            _arity(e, 2)
            return TSum(type_of(args[0]), type_of(args[1]))
        case "poly":
            _arity(e, 2)
            return TPoly(tbind(_name(args[0]), type_of(args[1])))
        case "rec-type":
            _arity(e, 3)
            return TRec(term_of(args[0]), tbind(_name(args[1]), type_of(args[2])))
        case "rec-inf":
            _arity(e, 2)
            from .syntax import make_rec_inf

            return make_rec_inf(tbind(_name(args[0]), type_of(args[1])))
        case "refine":
            _arity(e, 3)
            return TRefine(type_of(args[1]), bind(_name(args[0]), term_of(args[2])))
        case "equal":
            _arity(e, 2)
            return TEqual(term_of(args[0]), term_of(args[1]))
        case "stream":
            _arity(e, 1)
            return stream(type_of(args[0]))
        case "stream-n":
            _arity(e, 2)
            return stream_n(term_of(args[0]), type_of(args[1]))
        case "list-n":
            _arity(e, 1)
            return list_n(term_of(args[0]))
        case "let-type":
            _arity(e, 3)
            return TLet(term_of(args[1]), bind(_name(args[0]), type_of(args[2])))
        case "if-type":
            _arity(e, 3)
            return TIf(term_of(args[0]), type_of(args[1]), type_of(args[2]))
        case "match-type":
            _arity(e, 4)
            return TMatch(term_of(args[0]), type_of(args[1]), bind(_name(args[2]), type_of(args[3])))
        case "either-match-type":
            _arity(e, 5)
            return TEitherMatch(
                term_of(args[0]),
                bind(_name(args[1]), type_of(args[2])),
                bind(_name(args[3]), type_of(args[4])),
            )
    raise _err(e, f"unknown type form '{kw}'")


def parse_term(text: str) -> Node:
    return term_of(read_one(text))


def parse_type(text: str) -> Node:
    return type_of(read_one(text))


# -------------------------------------------------------------- printing


class _Printer:
    def __init__(self, root: Node, pretty: bool):
        self.pretty = pretty
        self.taken = free_vars(root) | free_type_vars(root)

    def pick(self, hint: str, env: tuple[str, ...]) -> str:
        base = hint.split("#", 1)[0] if hint else ""
        if not base or base == "_":
            base = "x"
        name, k = base, 0
        while name in self.taken or name in env:
            k += 1
            name = f"{base}{k}"
        return name

    def enter(self, b: Bind, env: tuple[str, ...]) -> tuple[str, tuple[str, ...]]:
        x = self.pick(b.hint, env)
        return x, (x,) + env

    def term(self, t: Node, env: tuple[str, ...]) -> str:
        k = nat_value(t)
        if k is not None and (self.pretty or k == 0):
            return str(k) if self.pretty else "zero"
        match t:
            case Var(x):
                return x
            case BVar(i):
                return env[i] if i < len(env) else f"#bvar{i}"
            case Unit():
                return "unit"
            case Tru():
                return "true"
            case Fls():
                return "false"
            case Succ(u):
                return f"(succ {self.term(u, env)})"
            case Lam(ty, b):
                x, env2 = self.enter(b, env)
                head = x if ty is None else f"({x} {self.type(ty, env)})"
                return f"(lambda {head} {self.term(b.body, env2)})"
            case App():
                fn, args = t, []
                while isinstance(fn, App):
                    args.append(fn.arg)
                    fn = fn.fn
                parts = [self.term(fn, env)] + [self.term(a, env) for a in reversed(args)]
                return "(app " + " ".join(parts) + ")"
            case Pair(a, b):
                return f"(pair {self.term(a, env)} {self.term(b, env)})"
            case Fst(u) | Snd(u) | Inl(u) | Inr(u) | Size(u):
                kw = {Fst: "fst", Snd: "snd", Inl: "left", Inr: "right", Size: "size"}[type(t)]
                return f"({kw} {self.term(u, env)})"
            case EitherMatch(s, l, r):
                x, e1 = self.enter(l, env)
                y, e2 = self.enter(r, env)
                return f"(either-match {self.term(s, env)} {x} {self.term(l.body, e1)} {y} {self.term(r.body, e2)})"
            case If(c, a, b):
                return f"(if {self.term(c, env)} {self.term(a, env)} {self.term(b, env)})"
            case Match(tn, t0, ts):
                n, e1 = self.enter(ts, env)
                return f"(match {self.term(tn, env)} {self.term(t0, env)} {n} {self.term(ts.body, e1)})"
            case Rec(ann, tn, t0, step):
                n, e1 = self.enter(step, env)
                y, e2 = self.enter(step.body, e1)
                core = f"{self.term(tn, env)} {self.term(t0, env)} ({n} {y}) {self.term(step.body.body, e2)}"
                if ann is None:
                    return f"(rec {core})"
                m, ea = self.enter(ann, env)
                return f"(rec ({m} {self.type(ann.body, ea)}) {core})"
            case Fix(ann, body):
                n, e1 = self.enter(body, env)
                y, e2 = self.enter(body.body, e1)
                inner = self.term(body.body.body, e2)
                if ann is None:
                    return f"(fix {y} {inner})"
                m, ea = self.enter(ann, env)
                return f"(fix ({m} {self.type(ann.body, ea)}) ({n} {y}) {inner})"
            case Fold(ty, u):
                if ty is None:
                    return f"(fold {self.term(u, env)})"
                return f"(fold {self.type(ty, env)} {self.term(u, env)})"
            case Unfold(u, b):
                x, e1 = self.enter(b, env)
                return f"(unfold {self.term(u, env)} {x} {self.term(b.body, e1)})"
            case TyAbs(b):
                x, e1 = self.enter(b, env)
                if vacuous(b):
                    return f"(tlambda {self.term(b.body, e1)})"
                return f"(tlambda {x} {self.term(b.body, e1)})"
            case TyApp(u, ty):
                if ty is None:
                    return f"(tapp {self.term(u, env)})"
                return f"(tapp {self.term(u, env)} {self.type(ty, env)})"
            case Err(ty):
                return "err" if ty is None else f"(err {self.type(ty, env)})"
            case Refl(a, b):
                if a is None:
                    return "refl"
                return f"(refl {self.term(a, env)} {self.term(b, env)})"
            case Let(u, b):
                x, e1 = self.enter(b, env)
                return f"(let {x} {self.term(u, env)} {self.term(b.body, e1)})"
            case Inst(u, a):
                return f"(inst {self.term(u, env)} {self.term(a, env)})"
        return self.type(t, env)

    def type(self, ty: Node, env: tuple[str, ...]) -> str:
        match ty:
            case TVar(a):
                return a
            case BVar(i):
                return env[i] if i < len(env) else f"#bvar{i}"
            case TUnit():
                return "Unit"
            case TBool():
                return "Bool"
            case TNat():
                return "Nat"
            case TTop():
                return "Top"
            case TBot():
                return "Bottom"
            case TPi(dom, b) | TSigma(dom, b) | TForall(dom, b):
                alpha = rec_inf_body(ty)
                if alpha is not None:
                    a, e1 = self.enter(alpha, env)
                    return f"(rec-inf {a} {self.type(alpha.body, e1)})"
                if vacuous(b) and not isinstance(ty, TForall):
                    kw = "arrow" if isinstance(ty, TPi) else "times"
                    inner = self.type(b.body, ("_",) + env)
                    return f"({kw} {self.type(dom, env)} {inner})"
                kw = {TPi: "pi", TSigma: "sigma", TForall: "forall"}[type(ty)]
                x, e1 = self.enter(b, env)
                return f"({kw} {x} {self.type(dom, env)} {self.type(b.body, e1)})"
            case TSum(a, b):
                return f"(sum {self.type(a, env)} {self.type(b, env)})"
            case TPoly(b):
                x, e1 = self.enter(b, env)
                return f"(poly {x} {self.type(b.body, e1)})"
            case TRec(n, b):
                a, e1 = self.enter(b, env)
                return f"(rec-type {self.term(n, env)} {a} {self.type(b.body, e1)})"
            case TRefine(base, b):
                x, e1 = self.enter(b, env)
                return f"(refine {x} {self.type(base, env)} {self.term(b.body, e1)})"
            case TEqual(a, b):
                return f"(equal {self.term(a, env)} {self.term(b, env)})"
            case TLet(t, b):
                x, e1 = self.enter(b, env)
                return f"(let-type {x} {self.term(t, env)} {self.type(b.body, e1)})"
            case TIf(c, a, b):
                return f"(if-type {self.term(c, env)} {self.type(a, env)} {self.type(b, env)})"
            case TMatch(t, a, b):
                n, e1 = self.enter(b, env)
                return f"(match-type {self.term(t, env)} {self.type(a, env)} {n} {self.type(b.body, e1)})"
            case TEitherMatch(t, l, r):
                x, e1 = self.enter(l, env)
                y, e2 = self.enter(r, env)
                return (
                    f"(either-match-type {self.term(t, env)} {x} {self.type(l.body, e1)} "
                    f"{y} {self.type(r.body, e2)})"
                )
        return self.term(ty, env)


def show(node: Node, pretty: bool = False) -> str:
    from .syntax import TYPE_NODES

    p = _Printer(node, pretty)
    if isinstance(node, TYPE_NODES):
        return p.type(node, ())
    return p.term(node, ())


def show_type(ty: Node, pretty: bool = False) -> str:
    return _Printer(ty, pretty).type(ty, ())
