"""Small-step call-by-value interpreter for erased terms."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

from .syntax import (
    App, BVar, Bind, EitherMatch, Err, Fix, Fls, Fold, Fst, If, Inl, Inr, Lam,
    Let, Match, Node, Pair, Rec, Refl, Size, Snd, Succ, TTop, Tru, TyAbs, TyApp,
    Unfold, Unit, Var, Zero, build_nat, open_bind, rebuild,
)

DEFAULT_FUEL = 1_000_000


@dataclass(frozen=True)
class Stepped:
    next: Node
    rule: str


@dataclass(frozen=True)
class Value:
    term: Node


@dataclass(frozen=True)
class Stuck:
    term: Node
    reason: str


@dataclass(frozen=True)
class ErrHit:
    term: Node


@dataclass(frozen=True)
class Normalized:
    value: Node
    steps: int


@dataclass(frozen=True)
class OutOfFuel:
    last: Node
    steps: int = 0


StepOutcome = Union[Stepped, Value, Stuck, ErrHit]
EvalResult = Union[Normalized, OutOfFuel, Stuck, ErrHit]


def is_value(t: Node) -> bool:
    while True:
        match t:
            case Zero() | Unit() | Tru() | Fls() | Refl() | Var() | Lam() | TyAbs():
                return True
            case Succ(u) | Fold(_, u) | Inl(u) | Inr(u):
                t = u
            case Pair(a, b):
                return is_value(a) and is_value(b)
            case _:
                return False


def size_semantics(v: Node) -> int:
    match v:
        case Zero() | Unit() | Tru() | Fls() | Refl() | Lam() | TyAbs():
            return 0
        case Succ(u) | Fold(_, u) | Inl(u) | Inr(u):
            return 1 + size_semantics(u)
        case Pair(a, b):
            return size_semantics(a) + size_semantics(b)
        case Var(x):
            raise ValueError(f"size of the open value {x} is undefined")
    raise ValueError("size_semantics expects a value")


def _subst(b: Bind, v: Node) -> Node:
    assert is_value(v), "call-by-value substitutes values only"
    return open_bind(b, v)


def _thunk(t: Node) -> Lam:
    return Lam(None, Bind(t, "u"))


def _beta(t: Node) -> Optional[tuple[str, Node]]:
    """The head reduction for a term whose evaluation positions hold values."""
    match t:
        case Fst(Pair(a, _)):
            return "beta1", a
        case Snd(Pair(_, b)):
            return "beta2", b
        case App(Lam(_, body), v):
            return "beta3", _subst(body, v)
        case TyApp(TyAbs(body), _):
            return "beta4", open_bind(body, TTop())
        case If(Tru(), a, _):
            return "beta5", a
        case If(Fls(), _, b):
            return "beta6", b
        case Rec(_, Zero(), t0, _):
            return "beta7", t0
        case Rec(_, Succ(v), t0, step):
            again = _thunk(Rec(None, v, t0, step))
            return "beta8", _subst(open_bind(step, v), again)
        case Fix(_, body):
            inner = open_bind(body, Zero())
            return "beta9", _subst(inner, _thunk(t))
        case Match(Zero(), t0, _):
            return "beta10", t0
        case Match(Succ(v), _, ts):
            return "beta11", _subst(ts, v)
        case EitherMatch(Inl(v), left, _):
            return "beta12", _subst(left, v)
        case EitherMatch(Inr(v), _, right):
            return "beta13", _subst(right, v)
        case Let(v, body):
            return "beta14", _subst(body, v)
        case Unfold(Fold(_, v), body):
            return "beta15", _subst(body, v)
        case Size(v):
            return "beta16", build_nat(size_semantics(v))
    return None


# evaluation positions per constructor, left to right; the rest are inert
_POSITIONS: dict[type, tuple[str, ...]] = {
    App: ("fn", "arg"), Pair: ("a", "b"), Fst: ("t",), Snd: ("t",), Succ: ("t",),
    Rec: ("tn",), Match: ("tn",), If: ("c",), Let: ("t",), Size: ("t",),
    Fold: ("t",), Unfold: ("t",), TyApp: ("t",), Inl: ("t",), Inr: ("t",),
    EitherMatch: ("t",),
}


def step(t: Node) -> StepOutcome:
    if is_value(t):
        return Value(t)
    if isinstance(t, Err):
        return ErrHit(t)
    if isinstance(t, Fix):
        rule, nxt = _beta(t)  # type: ignore[misc]
        return Stepped(nxt, rule)
    positions = _POSITIONS.get(type(t))
    if positions is None:
        if isinstance(t, BVar):
            return Stuck(t, "dangling bound variable")
        return Stuck(t, f"no evaluation rule for {type(t).__name__}")
    for name in positions:
        sub = getattr(t, name)
        if is_value(sub):
            continue
        out = step(sub)
        match out:
            case Stepped(nxt, rule):
                return Stepped(_plug(t, name, nxt), rule)
            case Stuck() | ErrHit():
                return out
    try:
        fired = _beta(t)
    except ValueError as e:
        return Stuck(t, str(e))
    if fired is None:
        return Stuck(t, _why_stuck(t))
    rule, nxt = fired
    return Stepped(nxt, rule)


def _plug(t: Node, name: str, sub: Node) -> Node:
    return rebuild(t, {name: sub})


def _why_stuck(t: Node) -> str:
    from .sexpr import show

    match t:
        case App(f, _):
            return f"cannot apply {show(f)}"
        case Fst(u) | Snd(u):
            return f"projection from non-pair {show(u)}"
        case If(c, _, _):
            return f"if on non-boolean {show(c)}"
        case Rec(_, n, _, _) | Match(n, _, _):
            return f"recursion on non-numeral {show(n)}"
        case EitherMatch(u, _, _):
            return f"either_match on non-injection {show(u)}"
        case Unfold(u, _):
            return f"unfold of non-fold {show(u)}"
        case TyApp(u, _):
            return f"type instantiation of {show(u)}"
    return "no rule applies"


def evaluate(
    t: Node,
    fuel: int = DEFAULT_FUEL,
    trace: Optional[Callable[[Node], None]] = None,
) -> EvalResult:
    if fuel <= 0:
        raise ValueError("fuel must be positive")
    if trace is not None:
        return _evaluate_traced(t, fuel, trace)
    # Same reductions as iterating `step`, but the evaluation context is kept
    # as an explicit stack so each step resumes at the redex.
    stack: list[tuple[Node, str]] = []
    focus = t
    steps = 0
    while True:
        if is_value(focus):
            if not stack:
                return Normalized(focus, steps)
            parent, name = stack.pop()
            focus = rebuild(parent, {name: focus})
            continue
        if isinstance(focus, Err):
            return ErrHit(focus)
        if not isinstance(focus, Fix):
            positions = _POSITIONS.get(type(focus))
            if positions is None:
                if isinstance(focus, BVar):
                    return Stuck(focus, "dangling bound variable")
                return Stuck(focus, f"no evaluation rule for {type(focus).__name__}")
            pending = next((n for n in positions if not is_value(getattr(focus, n))), None)
            if pending is not None:
                stack.append((focus, pending))
                focus = getattr(focus, pending)
                continue
        try:
            fired = _beta(focus)
        except ValueError as e:
            return Stuck(focus, str(e))
        if fired is None:
            return Stuck(focus, _why_stuck(focus))
        if steps >= fuel:
            return OutOfFuel(_unwind(stack, focus), steps)
        focus = fired[1]
        steps += 1


def _unwind(stack: list[tuple[Node, str]], focus: Node) -> Node:
    for parent, name in reversed(stack):
        focus = rebuild(parent, {name: focus})
    return focus


def _evaluate_traced(t: Node, fuel: int, trace: Callable[[Node], None]) -> EvalResult:
    steps = 0
    while True:
        trace(t)
        out = step(t)
        match out:
            case Value(v):
                return Normalized(v, steps)
            case Stuck() | ErrHit():
                return out
            case Stepped(nxt, _):
                if steps >= fuel:
                    return OutOfFuel(t, steps)
                t = nxt
                steps += 1


def normalize(t: Node, fuel: int = DEFAULT_FUEL) -> Optional[Node]:
    """The value of `t`, or None when evaluation does not reach one."""
    out = evaluate(t, fuel)
    return out.value if isinstance(out, Normalized) else None
