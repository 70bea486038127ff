"""Type-level algorithms: basetype, strict positivity, simplification, comparison."""

from __future__ import annotations

from typing import Callable, Optional

from .syntax import (
    BVar, Bind, EitherMatch, Fresh, If, Let, Match, Node, TBool, TBot,
    TEitherMatch, TEqual, TForall, TIf, TLet, TMatch, TNat, TPi, TPoly, TRec,
    TRefine, TSigma, TSum, TTop, TUnit, TVar, Var, bind, close, erase_type,
    free_type_vars, free_vars, open_bind, transform, walk,
)

_fresh = Fresh()


def basetype(alpha: str, ty: Node) -> Node:
    match ty:
        case TSigma(a, b):
            return TSigma(basetype(alpha, a), Bind(basetype(alpha, b.body), b.hint))
        case TSum(a, b):
            return TSum(basetype(alpha, a), basetype(alpha, b))
    return TTop() if alpha in free_type_vars(ty) else ty


def spos(alpha: str, ty: Node) -> bool:
    if alpha not in free_type_vars(ty):
        return True
    match ty:
        case TVar(a):
            return a == alpha
        case TRefine(base, _):
            return spos(alpha, base)
        case TPi(dom, b) | TForall(dom, b):
            return alpha not in free_type_vars(dom) and spos(alpha, b.body)
        case TPoly(b):
            return spos(alpha, b.body)
        case TSum(a, b):
            return spos(alpha, a) and spos(alpha, b)
        case TSigma(a, b):
            return spos(alpha, a) and spos(alpha, b.body)
        case TRec(_, b):
            beta = _fresh.name(b.hint)
            body = open_bind(b, TVar(beta))
            return spos(alpha, body) and (alpha not in free_type_vars(body) or spos(beta, body))
    return False


# ------------------------------------------------------------ simplification


class NoJoin(Exception):
    """Branch types have incompatible skeletons."""


def mk_let(t: Node, x: str, e: Node) -> Node:
    return e if x not in free_vars(e) else Let(t, bind(x, e))


def _open_pair(b1: Bind, b2: Bind, ctor: Callable[[str], Node]) -> tuple[str, Node, Node]:
    x = _fresh.name(b1.hint)
    v = ctor(x)
    return x, open_bind(b1, v), open_bind(b2, v)


def join(a: Node, b: Node, comb: Callable[[Node, Node], Node]) -> Node:
    """The two-hole recursion schema: distribute `comb` over the leaf terms."""
    if isinstance(a, TBot):
        return b
    if isinstance(b, TBot):
        return a
    match a, b:
        case (TUnit(), TUnit()) | (TBool(), TBool()) | (TNat(), TNat()) | (TTop(), TTop()):
            return a
        case TVar(x), TVar(y) if x == y:
            return a
        case (TPi(d1, b1), TPi(d2, b2)) | (TForall(d1, b1), TForall(d2, b2)) | (TSigma(d1, b1), TSigma(d2, b2)) if type(a) is type(b):
            x, o1, o2 = _open_pair(b1, b2, Var)
            return type(a)(join(d1, d2, comb), close(Var(x), join(o1, o2, comb), b1.hint))
        case TSum(l1, r1), TSum(l2, r2):
            return TSum(join(l1, l2, comb), join(r1, r2, comb))
        case TPoly(b1), TPoly(b2):
            x, o1, o2 = _open_pair(b1, b2, TVar)
            return TPoly(close(TVar(x), join(o1, o2, comb), b1.hint))
        case TRec(n1, b1), TRec(n2, b2):
            x, o1, o2 = _open_pair(b1, b2, TVar)
            return TRec(comb(n1, n2), close(TVar(x), join(o1, o2, comb), b1.hint))
        case TRefine(t1, b1), TRefine(t2, b2):
            x, o1, o2 = _open_pair(b1, b2, Var)
            return TRefine(join(t1, t2, comb), close(Var(x), comb(o1, o2), b1.hint))
        case TEqual(p1, q1), TEqual(p2, q2):
            return TEqual(comb(p1, p2), comb(q1, q2))
    raise NoJoin(f"{type(a).__name__} vs {type(b).__name__}")


def push(a: Node, f: Callable[[Node], Node]) -> Node:
    """The one-hole schema."""
    return join(a, a, lambda e1, _e2: f(e1))


def _under(b: Bind, ctor: Callable[[str], Node], f: Callable[[Node], Node]) -> Bind:
    x = _fresh.name(b.hint)
    return close(ctor(x), f(open_bind(b, ctor(x))), b.hint)


def simplify(ty: Node) -> Node:
    """Push Let/If/Match/Either_Match wrappers into leaf terms, innermost first.

    A wrapper whose branches do not share a skeleton is left in place.
    Expects a locally closed type.
    """
    match ty:
        case TPi(d, b) | TSigma(d, b) | TForall(d, b):
            return type(ty)(simplify(d), _under(b, Var, simplify))
        case TSum(a, b):
            return TSum(simplify(a), simplify(b))
        case TPoly(b):
            return TPoly(_under(b, TVar, simplify))
        case TRec(n, b):
            return TRec(n, _under(b, TVar, simplify))
        case TRefine(base, b):
            return TRefine(simplify(base), b)
        case TLet(t, b):
            x = _fresh.name(b.hint)
            body = simplify(open_bind(b, Var(x)))
            try:
                return push(body, lambda e: mk_let(t, x, e))
            except NoJoin:
                return TLet(t, close(Var(x), body, b.hint))
        case TIf(c, a, b):
            a, b = simplify(a), simplify(b)
            try:
                return join(a, b, lambda e1, e2: e1 if e1 == e2 else If(c, e1, e2))
            except NoJoin:
                return TIf(c, a, b)
        case TMatch(t, a, b):
            n = _fresh.name(b.hint)
            a, bs = simplify(a), simplify(open_bind(b, Var(n)))

            def comb(e0: Node, es: Node) -> Node:
                return e0 if e0 == es else Match(t, e0, bind(n, es))

            try:
                return join(a, bs, comb)
            except NoJoin:
                return TMatch(t, a, close(Var(n), bs, b.hint))
        case TEitherMatch(t, l, r):
            x = _fresh.name(l.hint)
            lo, ro = simplify(open_bind(l, Var(x))), simplify(open_bind(r, Var(x)))

            def comb2(e1: Node, e2: Node) -> Node:
                if e1 == e2 and x not in free_vars(e1):
                    return e1
                return EitherMatch(t, bind(x, e1), bind(x, e2))

            try:
                return join(lo, ro, comb2)
            except NoJoin:
                return TEitherMatch(t, close(Var(x), lo, l.hint), close(Var(x), ro, r.hint))
    return ty


def has_wrapper(ty: Node) -> bool:
    return any(isinstance(n, (TLet, TIf, TMatch, TEitherMatch)) for n in walk(ty))


# ------------------------------------------------------------- comparison


def tidy_term(t: Node) -> Node:
    """Inline administrative lets in terms carried by types and VCs.

    The bound terms were checked by the rule that introduced the let, so
    inlining them does not change the meaning for well-typed instances.
    """
    import dataclasses

    from .syntax import kids_of, locally_closed, substitute

    if isinstance(t, Let):
        head = tidy_term(t.t)
        x = _fresh.name(t.body.hint)
        body = tidy_term(open_bind(t.body, Var(x)))
        if body == Var(x):
            return head
        if locally_closed(head):
            return substitute(body, x, head)
        return Let(head, close(Var(x), body, t.body.hint))
    changes = {}
    for name in kids_of(type(t)):
        c = getattr(t, name)
        if isinstance(c, Bind):
            x = _fresh.name(c.hint)
            inner = tidy_term(open_bind(c, Var(x)))
            nc = close(Var(x), inner, c.hint)
        elif c is None:
            continue
        else:
            nc = tidy_term(c)
        if nc != c:
            changes[name] = nc
    return dataclasses.replace(t, **changes) if changes else t


tidy_type = tidy_term


def type_eq(a: Node, b: Node) -> bool:
    return erase_type(tidy_type(simplify(a))) == erase_type(tidy_type(simplify(b)))
