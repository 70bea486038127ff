"""Terms, annotated terms and types in a locally nameless representation.

Free variables are names (`Var`, `TVar`); bound occurrences are `BVar(i)`,
a de Bruijn index counting enclosing `Bind` nodes.  A `Bind` keeps the
user's name as a printing hint that takes no part in equality, so the
generated `==` on nodes is alpha-equivalence.

Term and AnnTerm share constructors.  A Term is an AnnTerm whose
annotation slots are all `None`; `erase` produces one.
"""

from __future__ import annotations

import dataclasses
import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterator, Optional


class Node:
    # caches: `_lb` for `loose_bound`, `_fv` for `free_vars`
    __slots__ = ("_lb", "_fv")

    def __str__(self) -> str:
        from .sexpr import show

        return show(self)


@dataclass(frozen=True, slots=True)
class Bind(Node):
    body: Node
    hint: str = field(default="x", compare=False)


# ---------------------------------------------------------------- terms


@dataclass(frozen=True, slots=True)
class Var(Node):
    name: str


@dataclass(frozen=True, slots=True)
class BVar(Node):
    index: int


@dataclass(frozen=True, slots=True)
class Unit(Node):
    pass


@dataclass(frozen=True, slots=True)
class Tru(Node):
    pass


@dataclass(frozen=True, slots=True)
class Fls(Node):
    pass


@dataclass(frozen=True, slots=True)
class Zero(Node):
    pass


@dataclass(frozen=True, slots=True)
class Succ(Node):
    t: Node


@dataclass(frozen=True, slots=True)
class Lam(Node):
    ty: Optional[Node]
    body: Bind


@dataclass(frozen=True, slots=True)
class App(Node):
    fn: Node
    arg: Node


@dataclass(frozen=True, slots=True)
class Pair(Node):
    a: Node
    b: Node


@dataclass(frozen=True, slots=True)
class Fst(Node):
    t: Node


@dataclass(frozen=True, slots=True)
class Snd(Node):
    t: Node


@dataclass(frozen=True, slots=True)
class Inl(Node):
    t: Node


@dataclass(frozen=True, slots=True)
class Inr(Node):
    t: Node


@dataclass(frozen=True, slots=True)
class EitherMatch(Node):
    t: Node
    left: Bind
    right: Bind


@dataclass(frozen=True, slots=True)
class If(Node):
    c: Node
    a: Node
    b: Node


@dataclass(frozen=True, slots=True)
class Rec(Node):
    """rec[n => ty](tn, t0, (n, y) => ts); `step` binds n then y."""

    ann: Optional[Bind]
    tn: Node
    t0: Node
    step: Bind


@dataclass(frozen=True, slots=True)
class Fix(Node):
    """fix[n => ty]((n, y) => t).  Erased fixpoints keep a vacuous n binder."""

    ann: Optional[Bind]
    body: Bind


@dataclass(frozen=True, slots=True)
class Match(Node):
    tn: Node
    t0: Node
    ts: Bind


@dataclass(frozen=True, slots=True)
class Fold(Node):
    ty: Optional[Node]
    t: Node


@dataclass(frozen=True, slots=True)
class Unfold(Node):
    t: Node
    body: Bind


@dataclass(frozen=True, slots=True)
class TyAbs(Node):
    """Type abstraction; the binder ranges over a type variable."""

    body: Bind


@dataclass(frozen=True, slots=True)
class TyApp(Node):
    t: Node
    ty: Optional[Node]


@dataclass(frozen=True, slots=True)
class Err(Node):
    ty: Optional[Node] = None


@dataclass(frozen=True, slots=True)
class Refl(Node):
    a: Optional[Node] = None
    b: Optional[Node] = None


@dataclass(frozen=True, slots=True)
class Let(Node):
    t: Node
    body: Bind


@dataclass(frozen=True, slots=True)
class Size(Node):
    t: Node


@dataclass(frozen=True, slots=True)
class Inst(Node):
    t: Node
    arg: Node


# ---------------------------------------------------------------- types


@dataclass(frozen=True, slots=True)
class TVar(Node):
    name: str


@dataclass(frozen=True, slots=True)
class TUnit(Node):
    pass


@dataclass(frozen=True, slots=True)
class TBool(Node):
    pass


@dataclass(frozen=True, slots=True)
class TNat(Node):
    pass


@dataclass(frozen=True, slots=True)
class TTop(Node):
    pass


@dataclass(frozen=True, slots=True)
class TBot(Node):
    pass


@dataclass(frozen=True, slots=True)
class TPi(Node):
    dom: Node
    body: Bind


@dataclass(frozen=True, slots=True)
class TSigma(Node):
    dom: Node
    body: Bind


@dataclass(frozen=True, slots=True)
class TSum(Node):
    a: Node
    b: Node


@dataclass(frozen=True, slots=True)
class TForall(Node):
    dom: Node
    body: Bind


@dataclass(frozen=True, slots=True)
class TPoly(Node):
    body: Bind


@dataclass(frozen=True, slots=True)
class TRec(Node):
    """Rec(index)(alpha => body)."""

    index: Node
    body: Bind


@dataclass(frozen=True, slots=True)
class TRefine(Node):
    ty: Node
    body: Bind


@dataclass(frozen=True, slots=True)
class TEqual(Node):
    a: Node
    b: Node


@dataclass(frozen=True, slots=True)
class TLet(Node):
    t: Node
    body: Bind


@dataclass(frozen=True, slots=True)
class TIf(Node):
    c: Node
    a: Node
    b: Node


@dataclass(frozen=True, slots=True)
class TMatch(Node):
    t: Node
    a: Node
    b: Bind


@dataclass(frozen=True, slots=True)
class TEitherMatch(Node):
    t: Node
    left: Bind
    right: Bind


TYPE_NODES = (
    TVar, TUnit, TBool, TNat, TTop, TBot, TPi, TSigma, TSum, TForall, TPoly,
    TRec, TRefine, TEqual, TLet, TIf, TMatch, TEitherMatch,
)
WRAPPERS = (TLet, TIf, TMatch, TEitherMatch)

_LEAF_FIELDS = {"name", "hint"}
_KIDS: dict[type, tuple[str, ...]] = {}


def kids_of(cls: type) -> tuple[str, ...]:
    try:
        return _KIDS[cls]
    except KeyError:
        names = tuple(
            f.name for f in dataclasses.fields(cls)
            if f.name not in _LEAF_FIELDS and not (cls is BVar and f.name == "index")
        )
        _KIDS[cls] = names
        return names


def children(node: Node) -> Iterator[tuple[Node, int]]:
    """Yield (child, binder depth increment) pairs."""
    if isinstance(node, Bind):
        yield node.body, 1
        return
    for name in kids_of(type(node)):
        c = getattr(node, name)
        if c is not None:
            yield c, 0


_FIELDS: dict[type, tuple[str, ...]] = {}


def rebuild(node: Node, changes: dict[str, Node]) -> Node:
    cls = type(node)
    names = _FIELDS.get(cls)
    if names is None:
        names = _FIELDS[cls] = tuple(f.name for f in dataclasses.fields(cls))
    return cls(*[changes[n] if n in changes else getattr(node, n) for n in names])


def transform(node: Node, fn: Callable[[Node, int], Optional[Node]], depth: int = 0) -> Node:
    """Rebuild `node` bottom-up; `fn` may short-circuit any subtree."""
    r = fn(node, depth)
    if r is not None:
        return r
    if isinstance(node, Bind):
        b = transform(node.body, fn, depth + 1)
        return node if b is node else Bind(b, node.hint)
    names = kids_of(type(node))
    if not names:
        return node
    changes = {}
    for name in names:
        c = getattr(node, name)
        if c is None:
            continue
        c2 = transform(c, fn, depth)
        if c2 is not c:
            changes[name] = c2
    return rebuild(node, changes) if changes else node


def loose_bound(node: Node) -> int:
    """One more than the largest binder level a `BVar` in `node` escapes to (0: locally closed)."""
    try:
        return node._lb
    except AttributeError:
        pass
    if isinstance(node, BVar):
        lb = node.index + 1
    elif isinstance(node, Bind):
        lb = max(loose_bound(node.body) - 1, 0)
    else:
        lb = 0
        for name in kids_of(type(node)):
            c = getattr(node, name)
            if c is not None:
                lb = max(lb, loose_bound(c))
    object.__setattr__(node, "_lb", lb)
    return lb


def walk(node: Node) -> Iterator[Node]:
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(c for c, _ in children(n))


# ------------------------------------------------------- binding operations


def open_bind(b: Bind, u: Node) -> Node:
    """Instantiate the outermost bound variable of `b` with the locally closed `u`."""

    def fn(n: Node, d: int) -> Optional[Node]:
        if loose_bound(n) <= d:
            return n
        if isinstance(n, BVar) and n.index == d:
            return u
        return None

    return transform(b.body, fn)


def close(target: Node, body: Node, hint: Optional[str] = None) -> Bind:
    """Abstract every occurrence of the free variable `target` (a Var or TVar)."""

    def fn(n: Node, d: int) -> Optional[Node]:
        if n == target:
            return BVar(d)
        return None

    if hint is None:
        hint = target.name  # type: ignore[attr-defined]
    return Bind(transform(body, fn), hint)


def bind(x: str, body: Node) -> Bind:
    return close(Var(x), body, x)


def tbind(a: str, body: Node) -> Bind:
    return close(TVar(a), body, a)


def replace_node(node: Node, target: Node, u: Node) -> Node:
    return transform(node, lambda n, d: u if n == target else None)


def substitute(t: Node, x: str, v: Node) -> Node:
    """Capture-avoiding t[x := v]; reaches terms embedded in types."""
    return replace_node(t, Var(x), v)


def substitute_type(t: Node, a: str, ty: Node) -> Node:
    return replace_node(t, TVar(a), ty)


def vacuous(b: Bind) -> bool:
    """True when the binder's variable does not occur in its body."""
    for n, d in _walk_depth(b.body, 0):
        if isinstance(n, BVar) and n.index == d:
            return False
    return True


def _walk_depth(node: Node, depth: int) -> Iterator[tuple[Node, int]]:
    stack = [(node, depth)]
    while stack:
        n, d = stack.pop()
        yield n, d
        stack.extend((c, d + inc) for c, inc in children(n))


def strengthen(b: Bind) -> Node:
    """Body of a vacuous binder with indices above it shifted down."""

    def fn(n: Node, d: int) -> Optional[Node]:
        if isinstance(n, BVar) and n.index > d:
            return BVar(n.index - 1)
        return None

    return transform(b.body, fn)


def weaken(t: Node) -> Bind:
    """Wrap `t` in a vacuous binder, shifting its dangling indices up."""

    def fn(n: Node, d: int) -> Optional[Node]:
        if isinstance(n, BVar) and n.index >= d:
            return BVar(n.index + 1)
        return None

    return Bind(transform(t, fn), "_")


def _free(node: Node) -> frozenset[str]:
    try:
        return node._fv
    except AttributeError:
        pass
    if isinstance(node, Var):
        fv = frozenset((node.name,))
    else:
        fv = frozenset().union(*(_free(c) for c, _ in children(node)))
    object.__setattr__(node, "_fv", fv)
    return fv


def free_vars(t: Node) -> set[str]:
    return set(_free(t))


def free_type_vars(t: Node) -> set[str]:
    return {n.name for n in walk(t) if isinstance(n, TVar)}


def alpha_eq(a: Node, b: Node) -> bool:
    return a == b


def locally_closed(t: Node) -> bool:
    return all(not (isinstance(n, BVar) and n.index >= d) for n, d in _walk_depth(t, 0))


# ----------------------------------------------------------------- fresh


class Fresh:
    """Per-session name supply.  Generated names contain '#', which no parser accepts."""

    def __init__(self) -> None:
        self._counter = itertools.count()

    def name(self, base: str = "v") -> str:
        base = base.split("#", 1)[0] or "v"
        return f"{base}#{next(self._counter)}"


def is_fresh_name(x: str) -> bool:
    return "#" in x


# ---------------------------------------------------------------- erasure


def erase(t: Node) -> Node:
    match t:
        case Var() | BVar() | Unit() | Tru() | Fls() | Zero():
            return t
        case Lam(_, body):
            return Lam(None, _erase_bind(body))
        case Rec(_, tn, t0, step):
            return Rec(None, erase(tn), erase(t0), _erase_bind(step))
        case Fix(_, body):
            nb = body.body
            return Fix(None, Bind(_erase_bind(nb), body.hint))
        case Inst(t1, _):
            return erase(t1)
        case Fold(_, u):
            return Fold(None, erase(u))
        case TyAbs(body):
            return TyAbs(_erase_bind(body))
        case TyApp(u, _):
            return TyApp(erase(u), None)
        case Err():
            return Err(None)
        case Refl():
            return Refl(None, None)
        case _ if isinstance(t, TYPE_NODES):
            raise TypeError(f"erase expects a term, got type {type(t).__name__}")
        case _:
            return _erase_kids(t)


def _erase_bind(b: Bind) -> Bind:
    return Bind(erase(b.body), b.hint)


def _erase_kids(t: Node) -> Node:
    changes = {}
    for name in kids_of(type(t)):
        c = getattr(t, name)
        if c is not None:
            changes[name] = _erase_bind(c) if isinstance(c, Bind) else erase(c)
    return dataclasses.replace(t, **changes)


# type slots whose content is a term rather than a type
_TERM_SLOTS = {
    TRec: ("index",), TEqual: ("a", "b"), TLet: ("t",), TIf: ("c",),
    TMatch: ("t",), TEitherMatch: ("t",),
}


def erase_type(ty: Node) -> Node:
    if isinstance(ty, Bind):
        return Bind(erase_type(ty.body), ty.hint)
    if isinstance(ty, TRefine):
        return TRefine(erase_type(ty.ty), Bind(erase(ty.body.body), ty.body.hint))
    names = kids_of(type(ty))
    if not names:
        return ty
    term_slots = _TERM_SLOTS.get(type(ty), ())
    changes = {}
    for name in names:
        c = getattr(ty, name)
        changes[name] = erase(c) if name in term_slots else erase_type(c)
    return dataclasses.replace(ty, **changes)


def is_erased(t: Node) -> bool:
    return erase(t) == t


# ---------------------------------------------------------------- numerals


def build_nat(k: int) -> Node:
    if k < 0:
        raise ValueError("build_nat expects a nonnegative integer")
    t: Node = Zero()
    for _ in range(k):
        t = Succ(t)
    return t


def nat_value(t: Node) -> Optional[int]:
    k = 0
    while isinstance(t, Succ):
        t, k = t.t, k + 1
    return k if isinstance(t, Zero) else None


# ------------------------------------------------------------ constructors


def lam(x: str, body: Node, ty: Optional[Node] = None) -> Lam:
    return Lam(ty, bind(x, body))


def app(f: Node, *args: Node) -> Node:
    for a in args:
        f = App(f, a)
    return f


def pi(x: str, dom: Node, cod: Node) -> TPi:
    return TPi(dom, bind(x, cod))


def arrow(dom: Node, cod: Node) -> TPi:
    return TPi(dom, weaken(cod))


def sigma(x: str, dom: Node, cod: Node) -> TSigma:
    return TSigma(dom, bind(x, cod))


def times(a: Node, b: Node) -> TSigma:
    return TSigma(a, weaken(b))


def forall(x: str, dom: Node, body: Node) -> TForall:
    return TForall(dom, bind(x, body))


def poly(a: str, body: Node) -> TPoly:
    return TPoly(tbind(a, body))


def refine(x: str, ty: Node, b: Node) -> TRefine:
    return TRefine(ty, bind(x, b))


def rec_type(n: Node, a: str, body: Node) -> TRec:
    return TRec(n, tbind(a, body))


def rec_inf(a: str, body: Node, n: str = "n") -> TForall:
    """Rec(a => body), the index-free recursive type."""
    return forall(n, TNat(), rec_type(Var(n), a, body))


def stream_n(n: Node, x: Node) -> TRec:
    return rec_type(n, "a", times(x, arrow(TUnit(), TVar("a"))))


def stream(x: Node) -> TForall:
    return rec_inf("a", times(x, arrow(TUnit(), TVar("a"))))


def list_n(n: Node) -> TRec:
    return rec_type(n, "a", TSum(TUnit(), times(TNat(), TVar("a"))))


def list_type() -> TForall:
    return rec_inf("a", TSum(TUnit(), times(TNat(), TVar("a"))))


def rec_inf_body(ty: Node) -> Optional[Bind]:
    """For an index-free Rec type `forall n:Nat. Rec(n)(a => body)` return the a-binder,
    re-indexed to live outside the quantifier."""
    if isinstance(ty, TForall) and isinstance(ty.dom, TNat):
        inner = ty.body.body
        if isinstance(inner, TRec) and inner.index == BVar(0):
            alpha = inner.body
            if not _mentions_index(alpha.body, 1):
                return Bind(_shift_from(alpha.body, 2, -1), alpha.hint)
    return None


def _mentions_index(t: Node, k: int) -> bool:
    return any(isinstance(n, BVar) and n.index == d + k for n, d in _walk_depth(t, 0))


def _shift_from(t: Node, k: int, by: int) -> Node:
    def fn(n: Node, d: int) -> Optional[Node]:
        if isinstance(n, BVar) and n.index >= d + k:
            return BVar(n.index + by)
        return None

    return transform(t, fn)


def make_rec_inf(alpha: Bind, n: str = "n") -> TForall:
    """Inverse of rec_inf_body."""
    return TForall(TNat(), Bind(TRec(BVar(0), Bind(_shift_from(alpha.body, 1, 1), alpha.hint)), n))
