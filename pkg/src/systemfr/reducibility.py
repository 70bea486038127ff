"""Bounded, executable reducibility: which closed values inhabit a type.

Every answer is three-valued.  `yes` means the value passed every test the
budget allows (domains are enumerated only up to `nat_bound` and `depth`),
`no` is a definite counterexample, `unknown` means the budget ran out or a
domain could not be enumerated.
"""

from __future__ import annotations

import enum
import functools
import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Mapping, Optional, Union

from .checker import Context
from .semantics import ErrHit, Normalized, OutOfFuel, Stuck, evaluate, is_value
from .syntax import (
    App, Bind, Fls, Fold, Fresh, Inl, Inr, Lam, Node, Pair, Refl, Succ, TBool, TBot,
    TEitherMatch, TEqual, TForall, TIf, TLet, TMatch, TNat, TPi, TPoly, TRec,
    TRefine, TSigma, TSum, TTop, TUnit, TVar, Tru, TyApp, Unit, Var, Zero,
    build_nat, erase, erase_type, nat_value, open_bind, strengthen, substitute,
    vacuous,
)
from .typeops import basetype, simplify

_fresh = Fresh()


class Verdict(enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"

    def __str__(self) -> str:
        return self.value


YES, NO, UNKNOWN = Verdict.YES, Verdict.NO, Verdict.UNKNOWN


def conj(checks: Iterable[Callable[[], Verdict]]) -> Verdict:
    """All must hold: `no` wins, then `unknown`."""
    out = YES
    for c in checks:
        v = c()
        if v is NO:
            return NO
        if v is UNKNOWN:
            out = UNKNOWN
    return out


def of_bool(b: bool) -> Verdict:
    return YES if b else NO


@dataclass(frozen=True)
class Budget:
    eval_fuel: int = 100_000
    nat_bound: int = 4
    depth: int = 3
    width: int = 512
    # enumerate non-dependent function types by constant functions
    functions: bool = False

    def __post_init__(self) -> None:
        if min(self.eval_fuel, self.nat_bound, self.depth, self.width) <= 0:
            raise ValueError("budget fields must be positive")


@dataclass(frozen=True)
class FiniteCandidate:
    members: frozenset[Node]

    def __post_init__(self) -> None:
        if not all(is_value(v) for v in self.members):
            raise ValueError("candidates contain values only")

    @staticmethod
    def of(*vs: Node) -> "FiniteCandidate":
        return FiniteCandidate(frozenset(vs))


@dataclass(frozen=True)
class TypeCandidate:
    """The (possibly infinite) set of values of `ty` under `theta`."""

    ty: Node
    theta: "Interpretation"


Candidate = Union[FiniteCandidate, TypeCandidate]

CANDIDATES: tuple[FiniteCandidate, ...] = (
    FiniteCandidate.of(),
    FiniteCandidate.of(Unit()),
    FiniteCandidate.of(Zero()),
    FiniteCandidate.of(Tru(), Fls()),
)


@dataclass(frozen=True)
class Interpretation:
    entries: tuple[tuple[str, Candidate], ...] = ()

    @staticmethod
    def of(mapping: Mapping[str, Candidate]) -> "Interpretation":
        return Interpretation(tuple(sorted(mapping.items(), key=lambda kv: kv[0])))

    def extend(self, a: str, c: Candidate) -> "Interpretation":
        return Interpretation(tuple((k, v) for k, v in self.entries if k != a) + ((a, c),))

    def get(self, a: str) -> Candidate:
        for k, v in reversed(self.entries):
            if k == a:
                return v
        raise KeyError(f"type variable {a} is not interpreted")


EMPTY = Interpretation()


# ----------------------------------------------------------- evaluation


@functools.lru_cache(maxsize=4096)
def _run(t: Node, b: Budget) -> Union[Node, Verdict]:
    """The value of `t`, `no` when evaluation goes wrong, `unknown` on fuel exhaustion."""
    match evaluate(t, b.eval_fuel):
        case Normalized(v, _):
            return v
        case OutOfFuel():
            return UNKNOWN
        case Stuck() | ErrHit():
            return NO
    raise AssertionError("unreachable")


def equivalent(t1: Node, t2: Node, b: Budget) -> Verdict:
    """Bounded check of: t1 reaches v iff t2 reaches v, for every value v."""
    r1, r2 = _run(t1, b), _run(t2, b)
    if UNKNOWN in (r1, r2):
        return UNKNOWN
    if isinstance(r1, Verdict) or isinstance(r2, Verdict):
        return of_bool(isinstance(r1, Verdict) and isinstance(r2, Verdict))
    return of_bool(r1 == r2)


def _resolve(ty: Node, b: Budget) -> Union[Node, Verdict]:
    """Eliminate an outermost Let/If/Match/Either_Match type by evaluating its scrutinee."""
    if not isinstance(ty, (TLet, TIf, TMatch, TEitherMatch)):
        return ty
    s = simplify(ty)
    if not isinstance(s, (TLet, TIf, TMatch, TEitherMatch)):
        return s
    r = _run(s.t if not isinstance(s, TIf) else s.c, b)
    if isinstance(r, Verdict):
        return UNKNOWN
    match s, r:
        case TLet(_, body), _:
            return open_bind(body, r)
        case TIf(_, a, _), Tru():
            return a
        case TIf(_, _, e), Fls():
            return e
        case TMatch(_, a, _), Zero():
            return a
        case TMatch(_, _, body), Succ(p):
            return open_bind(body, p)
        case TEitherMatch(_, left, _), Inl(u):
            return open_bind(left, u)
        case TEitherMatch(_, _, right), Inr(u):
            return open_bind(right, u)
    return UNKNOWN


def _index(n: Node, b: Budget) -> Union[int, Verdict]:
    r = _run(n, b)
    if isinstance(r, Verdict):
        return r
    k = nat_value(r)
    return NO if k is None else k


def _open_tvar(body: Bind) -> tuple[str, Node]:
    a = _fresh.name(body.hint)
    return a, open_bind(body, TVar(a))


# ----------------------------------------------------------- membership


def in_red_values(v: Node, ty: Node, theta: Interpretation = EMPTY, b: Budget = Budget()) -> Verdict:
    if not is_value(v):
        raise ValueError("in_red_values expects a value")
    ty = _resolve(ty, b)
    if isinstance(ty, Verdict):
        return ty
    match ty:
        case TVar(a):
            c = theta.get(a)
            if isinstance(c, FiniteCandidate):
                return of_bool(v in c.members)
            return in_red_values(v, c.ty, c.theta, b)
        case TTop():
            return YES
        case TBot():
            return NO
        case TUnit():
            return of_bool(v == Unit())
        case TBool():
            return of_bool(v in (Tru(), Fls()))
        case TNat():
            return of_bool(nat_value(v) is not None)
        case TPi(dom, body):
            args = values(dom, theta, b)
            if args is None:
                return UNKNOWN
            return conj(lambda a=a: in_red_terms(App(v, a), open_bind(body, a), theta, b) for a in args)
        case TForall(dom, body):
            args = values(dom, theta, b)
            if args is None:
                return UNKNOWN
            return conj(lambda a=a: in_red_values(v, open_bind(body, a), theta, b) for a in args)
        case TSigma(dom, body):
            if not isinstance(v, Pair):
                return NO
            return conj([lambda: in_red_values(v.a, dom, theta, b),
                         lambda: in_red_values(v.b, open_bind(body, v.a), theta, b)])
        case TRefine(base, pred):
            def holds() -> Verdict:
                r = _run(open_bind(pred, v), b)
                return r if isinstance(r, Verdict) else of_bool(r == Tru())

            return conj([lambda: in_red_values(v, base, theta, b), holds])
        case TSum(left, right):
            match v:
                case Inl(u):
                    return in_red_values(u, left, theta, b)
                case Inr(u):
                    return in_red_values(u, right, theta, b)
            return NO
        case TEqual(t1, t2):
            return NO if v != Refl() else equivalent(t1, t2, b)
        case TPoly(body):
            a, inner = _open_tvar(body)
            return conj(lambda c=c: in_red_terms(TyApp(v, None), inner, theta.extend(a, c), b)
                        for c in CANDIDATES)
        case TRec(n, body):
            if not isinstance(v, Fold):
                return NO
            k = _index(n, b)
            if isinstance(k, Verdict):
                return k
            a, inner = _open_tvar(body)
            if k == 0:
                return in_red_values(v.t, basetype(a, inner), theta, b)
            smaller = TypeCandidate(TRec(build_nat(k - 1), body), theta)
            return in_red_values(v.t, inner, theta.extend(a, smaller), b)
    raise ValueError(f"no denotation for {type(ty).__name__}")


def in_red_terms(t: Node, ty: Node, theta: Interpretation = EMPTY, b: Budget = Budget()) -> Verdict:
    r = _run(t, b)
    return r if isinstance(r, Verdict) else in_red_values(r, ty, theta, b)


# ----------------------------------------------------------- enumeration


def values(ty: Node, theta: Interpretation = EMPTY, b: Budget = Budget()) -> Optional[list[Node]]:
    """A bounded sample of members of `ty`, or None when the type is not enumerable.

    Every listed value is a definite member; the list is truncated at `b.width`.
    """
    return _values(ty, theta, b, b.depth)


def _take(it: Iterator[Node], b: Budget) -> list[Node]:
    out: list[Node] = []
    for v in it:
        if v not in out:
            out.append(v)
        if len(out) >= b.width:
            break
    return out


def _members(ty: Node, theta: Interpretation, b: Budget, candidates: Iterable[Node]) -> list[Node]:
    return _take((v for v in candidates if in_red_values(v, ty, theta, b) is YES), b)


def _values(ty: Node, theta: Interpretation, b: Budget, depth: int) -> Optional[list[Node]]:
    out = _values_cached(ty, theta, b, depth)
    return None if out is None else list(out)


@functools.lru_cache(maxsize=4096)
def _values_cached(ty: Node, theta: Interpretation, b: Budget, depth: int) -> Optional[tuple[Node, ...]]:
    out = _enumerate(ty, theta, b, depth)
    return None if out is None else tuple(out)


def _enumerate(ty: Node, theta: Interpretation, b: Budget, depth: int) -> Optional[list[Node]]:
    resolved = _resolve(ty, b)
    if isinstance(resolved, Verdict):
        return None
    ty = resolved
    match ty:
        case TUnit():
            return [Unit()]
        case TBool():
            return [Tru(), Fls()]
        case TNat():
            return [build_nat(k) for k in range(b.nat_bound + 1)]
        case TBot():
            return []
        case TVar(a):
            c = theta.get(a)
            if isinstance(c, FiniteCandidate):
                return sorted(c.members, key=str)
            return _values(c.ty, c.theta, b, depth)
        case TSum(left, right):
            ls, rs = _values(left, theta, b, depth), _values(right, theta, b, depth)
            if ls is None or rs is None:
                return None
            return _take(itertools.chain((Inl(u) for u in ls), (Inr(u) for u in rs)), b)
        case TSigma(dom, body):
            firsts = _values(dom, theta, b, depth)
            if firsts is None:
                return None
            pairs = []
            for a in firsts:
                seconds = _values(open_bind(body, a), theta, b, depth)
                if seconds is None:
                    return None
                pairs.extend(Pair(a, s) for s in seconds)
            return _take(iter(pairs), b)
        case TRefine(base, _):
            vs = _values(base, theta, b, depth)
            return None if vs is None else _members(ty, theta, b, vs)
        case TEqual():
            return _members(ty, theta, b, [Refl()])
        case TForall(dom, body):
            args = _values(dom, theta, b, depth)
            if args is None:
                return None
            pool: list[Node] = []
            for a in args:
                vs = _values(open_bind(body, a), theta, b, depth)
                if vs is None:
                    return None
                pool.extend(vs)
            return _members(ty, theta, b, pool) if args else None
        case TPi(dom, body) if b.functions and vacuous(body):
            cods = _values(strengthen(body), theta, b, depth)
            return None if cods is None else [Lam(None, Bind(c, "u")) for c in cods]
        case TRec(_, body):
            shapes = _folds(body, theta, b, depth)
            return None if shapes is None else _members(ty, theta, b, shapes)
    return None


def _folds(body: Bind, theta: Interpretation, b: Budget, depth: int) -> Optional[list[Node]]:
    """Folded values of nesting below `depth`, built from the unrolled body.

    The innermost position holds `()`; shapes are filtered by membership afterwards.
    """
    if depth <= 0:
        return [Unit()]
    below = _folds(body, theta, b, depth - 1)
    if below is None:
        return None
    a, inner = _open_tvar(body)
    vs = _values(inner, theta.extend(a, FiniteCandidate(frozenset(below))), b, depth - 1)
    return None if vs is None else [Fold(None, u) for u in vs]


# ----------------------------------------------------------- open terms


def _instances(ctx: Context, b: Budget) -> Optional[list[tuple[Interpretation, dict[str, Node]]]]:
    out = []
    for cs in itertools.product(CANDIDATES, repeat=len(ctx.theta)):
        theta = Interpretation(tuple(zip(ctx.theta, cs)))
        envs: list[dict[str, Node]] = [{}]
        for x, ty in ctx.gamma:
            nxt = []
            for env in envs:
                vs = values(_close(erase_type(ty), env), theta, b)
                if vs is None:
                    return None
                nxt.extend({**env, x: v} for v in vs)
            envs = nxt[: b.width]
        out.extend((theta, env) for env in envs)
    return out


def _close(t: Node, env: Mapping[str, Node]) -> Node:
    for x, v in env.items():
        t = substitute(t, x, v)
    return t


def reducible_open(ctx: Context, t: Node, ty: Node, b: Budget = Budget()) -> Verdict:
    """Membership of every bounded closing instance of `t` in the matching instance of `ty`."""
    insts = _instances(ctx, b)
    if insts is None:
        return UNKNOWN
    t, ty = erase(t), erase_type(ty)
    return conj(lambda th=th, env=env: in_red_terms(_close(t, env), _close(ty, env), th, b)
                for th, env in insts)
