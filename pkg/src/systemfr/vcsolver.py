"""Conservative discharge of verification conditions.

Strategies, in order: alpha-equality after erasure; substitution of equality
hypotheses and normalization of open terms; evaluation when closed;
congruence on a shared scrutinee; bounded enumeration; linear arithmetic over
natural-number atoms.  Each strategy runs with its own step budget.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import IO, Iterable, Optional, Union

from .checker import VC
from .semantics import Stepped, Value, is_value, step
from .sexpr import show
from .syntax import (
    App, BVar, Bind, EitherMatch, Fls, Fold, Fresh, If, Inl, Inr, Lam, Match,
    Node, Pair, Rec, Size, Succ, TBool, TEqual, TForall, TNat, TRec, TRefine,
    TSigma, TUnit, Tru, TyAbs, Unit, Var, Zero, build_nat, erase, erase_type,
    free_vars, nat_value, open_bind, rec_inf_body, substitute, transform,
)
from .typeops import basetype

DEFAULT_BUDGET = 10_000


@dataclass(frozen=True)
class Valid:
    evidence: str


@dataclass(frozen=True)
class Unknown:
    reason: str


SolveResult = Union[Valid, Unknown]


class OutOfBudget(Exception):
    pass


class Contradiction(Exception):
    pass


class Meter:
    def __init__(self, budget: int):
        self.left = budget

    def tick(self, k: int = 1) -> None:
        self.left -= k
        if self.left < 0:
            raise OutOfBudget()


# ------------------------------------------------------------ normalization


def whnf(t: Node, meter: Meter) -> Node:
    """Evaluate with variables treated as values; stop at a value or a stuck term."""
    while True:
        out = step(t)
        if not isinstance(out, Stepped):
            return t
        meter.tick()
        t = out.next


def norm(t: Node, meter: Meter) -> Node:
    """Weak normalization, continued into the evaluation positions of stuck terms.

    Binder bodies are left alone, so comparison of functions stays syntactic.
    """
    t = whnf(t, meter)
    match t:
        case Succ(u):
            return Succ(norm(u, meter))
        case Fold(_, u):
            return Fold(None, norm(u, meter))
        case Inl(u):
            return Inl(norm(u, meter))
        case Inr(u):
            return Inr(norm(u, meter))
        case Pair(a, b):
            return Pair(norm(a, meter), norm(b, meter))
    if is_value(t):
        return t
    import dataclasses

    changes = {}
    for name, c in _fields(t):
        if not isinstance(c, Bind) and c is not None:
            n = norm(c, meter)
            if n is not c:
                changes[name] = n
    if not changes:
        return t
    t2 = dataclasses.replace(t, **changes)
    return norm(t2, meter) if not isinstance(step(t2), Value) and _progress(t2) else t2


def _fields(t: Node) -> list[tuple[str, object]]:
    from .syntax import kids_of

    return [(n, getattr(t, n)) for n in kids_of(type(t))]


def _progress(t: Node) -> bool:
    return isinstance(step(t), Stepped)


# ------------------------------------------------------------ recognizers


@lru_cache(maxsize=None)
def _canonical() -> dict[str, Rec]:
    """The rec cores of the bundled nat operations, erased."""
    from .frontend.stdlib import natop

    out = {}
    for name in ("lessThan", "lessEqual", "equalNat", "plus"):
        lam = erase(natop(name))
        assert isinstance(lam, Lam) and isinstance(lam.body.body, Rec)
        out[name] = lam.body.body
    return out


def natop_call(t: Node) -> Optional[tuple[str, Node, Node]]:
    """Recognize a stuck `op a b` for the bundled nat operations."""
    if isinstance(t, App) and isinstance(t.fn, Rec):
        r = t.fn
        for name, core in _canonical().items():
            if r.t0 == core.t0 and r.step == core.step:
                return name, r.tn, t.arg
    # `op a b` with a non-value `a`, where call-by-value cannot beta-reduce yet
    if isinstance(t, App) and isinstance(t.fn, App) and isinstance(t.fn.fn, Lam):
        r = t.fn.fn.body.body
        if isinstance(r, Rec) and r.tn == BVar(0):
            for name, core in _canonical().items():
                if r.t0 == core.t0 and r.step == core.step:
                    return name, t.fn.arg, t.arg
    return None


def _numeral(t: Node) -> bool:
    return nat_value(t) is not None


# ------------------------------------------------------------ knowledge


def _strip(ty: Node) -> Node:
    while isinstance(ty, TRefine):
        ty = ty.ty
    return ty


def _refinement_facts(x: str, ty: Node) -> list[tuple[Node, Node]]:
    out = []
    while isinstance(ty, TRefine):
        out.append((open_bind(ty.body, Var(x)), Tru()))
        ty = ty.ty
    return out


@dataclass
class Knowledge:
    """Facts about the context after substitution and normalization."""

    types: dict[str, Node]
    facts: list[tuple[Node, Node]]
    subst: dict[str, Node] = field(default_factory=dict)
    fresh: Fresh = field(default_factory=Fresh)

    @classmethod
    def of(cls, vc: VC) -> "Knowledge":
        types: dict[str, Node] = {}
        facts: list[tuple[Node, Node]] = []
        for x, ty in vc.context.gamma:
            ety = erase_type(ty)
            types[x] = ety
            if isinstance(ety, TEqual):
                facts.append((ety.a, ety.b))
            facts.extend(_refinement_facts(x, ety))
        return cls(types, facts)

    def apply(self, t: Node) -> Node:
        for x, v in self.subst.items():
            if x in free_vars(t):
                t = substitute(t, x, v)
        return t

    def eliminate(self, x: str, v: Node) -> None:
        self.subst = {y: substitute(u, x, v) if x in free_vars(u) else u for y, u in self.subst.items()}
        self.subst[x] = v
        self.facts = [(self._sub1(a, x, v), self._sub1(b, x, v)) for a, b in self.facts]

    @staticmethod
    def _sub1(t: Node, x: str, v: Node) -> Node:
        return substitute(t, x, v) if x in free_vars(t) else t

    def is_nat_var(self, x: str) -> bool:
        ty = self.types.get(x)
        return ty is not None and isinstance(_strip(ty), TNat)

    def saturate(self, meter: Meter) -> None:
        """Normalize facts, split constructor equations, eliminate variables."""
        while True:
            meter.tick()
            pending = list(self.facts)
            done: list[tuple[Node, Node]] = []
            elim: Optional[tuple[str, Node]] = None
            while pending:
                a, b = pending.pop(0)
                a, b = norm(a, meter), norm(b, meter)
                parts = decompose(a, b)
                if parts is not None:
                    pending[:0] = parts
                    continue
                if a == b:
                    continue
                if elim is None:
                    elim = _eliminable(a, b)
                    if elim is not None:
                        continue
                done.append((a, b))
            self.facts = done
            if elim is None:
                return
            self.eliminate(*elim)

    def expand(self, meter: Meter, mentioned: set[str]) -> bool:
        """Replace pair- and recursive-typed variables by their value shapes."""
        changed = False
        for x in sorted(mentioned):
            if x in self.subst or x not in self.types:
                continue
            shape = self._shape(x, self.types[x])
            if shape is not None:
                self.eliminate(x, shape)
                changed = True
        return changed

    def _shape(self, x: str, ty: Node, depth: int = 0) -> Optional[Node]:
        ty = _strip(ty)
        if depth > 3:
            return None
        if isinstance(ty, TSigma):
            a, b = self.fresh.name(x + "_1"), self.fresh.name(x + "_2")
            self.types[a] = ty.dom
            self.types[b] = open_bind(ty.body, Var(a))
            return Pair(self._shape(a, ty.dom, depth + 1) or Var(a),
                        self._shape(b, self.types[b], depth + 1) or Var(b))
        inner = _unrolled(ty)
        if inner is not None:
            u = self.fresh.name(x + "_u")
            self.types[u] = inner
            return Fold(None, self._shape(u, inner, depth + 1) or Var(u))
        return None


def _unrolled(ty: Node) -> Optional[Node]:
    alpha = rec_inf_body(ty)
    if alpha is not None:
        return open_bind(alpha, ty)
    if isinstance(ty, TRec):
        a = Fresh().name("a")
        from .syntax import TVar

        return basetype(a, open_bind(ty.body, TVar(a)))
    return None


_DATA = (Zero, Succ, Tru, Fls, Unit, Inl, Inr, Pair, Fold)


def decompose(a: Node, b: Node) -> Optional[list[tuple[Node, Node]]]:
    """Split an equation between constructor values; raise on a clash."""
    if not (isinstance(a, _DATA) and isinstance(b, _DATA)):
        return None
    if type(a) is not type(b):
        raise Contradiction(f"{show(a)} vs {show(b)}")
    match a, b:
        case (Succ(x), Succ(y)) | (Inl(x), Inl(y)) | (Inr(x), Inr(y)) | (Fold(_, x), Fold(_, y)):
            return [(x, y)]
        case Pair(x1, x2), Pair(y1, y2):
            return [(x1, y1), (x2, y2)]
    return []


def _eliminable(a: Node, b: Node) -> Optional[tuple[str, Node]]:
    if isinstance(a, Var) and a.name not in free_vars(b):
        return a.name, b
    if isinstance(b, Var) and b.name not in free_vars(a):
        return b.name, a
    return None


# ------------------------------------------------------------ strategies


def solve(vc: VC, budget: int = DEFAULT_BUDGET) -> SolveResult:
    if budget <= 0:
        raise ValueError("budget must be positive")
    lhs, rhs = erase(vc.lhs), erase(vc.rhs)
    if lhs == rhs:
        return Valid("alpha")
    try:
        kn, l, r = _prepare(vc, lhs, rhs, Meter(budget))
    except Contradiction:
        return Valid("contradiction")
    except OutOfBudget:
        return Unknown("budget exhausted while rewriting")
    if l == r:
        closed = not (free_vars(l) | free_vars(r))
        return Valid("evaluate" if closed else "rewrite")
    for name, strategy in _STRATEGIES:
        try:
            if strategy(kn, l, r, Meter(budget)):
                return Valid(name)
        except OutOfBudget:
            continue
        except Contradiction:
            return Valid("contradiction")
    return Unknown(f"no strategy applies to {show(l)} == {show(r)}")


def _prepare(vc: VC, lhs: Node, rhs: Node, meter: Meter) -> tuple[Knowledge, Node, Node]:
    kn = Knowledge.of(vc)
    kn.saturate(meter)
    for _ in range(3):
        mentioned = free_vars(kn.apply(lhs)) | free_vars(kn.apply(rhs))
        for a, b in kn.facts:
            mentioned |= free_vars(a) | free_vars(b)
        if not kn.expand(meter, mentioned):
            break
        kn.saturate(meter)
    l, r = norm(kn.apply(lhs), meter), norm(kn.apply(rhs), meter)
    l, r = _rewrite(kn, l, meter), _rewrite(kn, r, meter)
    return kn, l, r


def _rewrite(kn: Knowledge, t: Node, meter: Meter) -> Node:
    """Rewrite with compound hypotheses oriented left to right, to a fixpoint."""
    rules = [(a, b) for a, b in kn.facts if not is_value(a)]
    for _ in range(len(rules) + 1):
        before = t
        for a, b in rules:
            meter.tick()
            t = transform(t, lambda n, d, a=a, b=b: b if n == a and d == 0 else None)
        t = norm(t, meter)
        if t == before:
            break
    return t


def _congruence(kn: Knowledge, l: Node, r: Node, meter: Meter) -> bool:
    return _congruent(kn, l, r, meter, 0)


def _congruent(kn: Knowledge, l: Node, r: Node, meter: Meter, depth: int) -> bool:
    meter.tick()
    if l == r:
        return True
    if depth > 4:
        return False
    match l, r:
        case If(c1, a1, b1), If(c2, a2, b2) if c1 == c2:
            return _congruent(kn, a1, a2, meter, depth + 1) and _congruent(kn, b1, b2, meter, depth + 1)
        case Match(t1, z1, s1), Match(t2, z2, s2) if t1 == t2:
            k = Var(kn.fresh.name("k"))
            return _congruent(kn, z1, z2, meter, depth + 1) and _congruent(
                kn, norm(open_bind(s1, k), meter), norm(open_bind(s2, k), meter), meter, depth + 1)
        case EitherMatch(t1, x1, y1), EitherMatch(t2, x2, y2) if t1 == t2:
            k = Var(kn.fresh.name("k"))
            return all(
                _congruent(kn, norm(open_bind(p, k), meter), norm(open_bind(q, k), meter), meter, depth + 1)
                for p, q in ((x1, x2), (y1, y2)))
    return False


def _enumerate(kn: Knowledge, l: Node, r: Node, meter: Meter) -> bool:
    fv = sorted(free_vars(l) | free_vars(r))
    if len(fv) != 1:
        return False
    x = fv[0]
    domain = _domain(kn, x)
    if domain is None:
        return False
    for v in domain:
        meter.tick()
        try:
            for a, b in kn.facts:
                if x in free_vars(a) | free_vars(b):
                    parts = decompose(norm(substitute(a, x, v), meter), norm(substitute(b, x, v), meter))
                    del parts
        except Contradiction:
            continue  # this instance violates a hypothesis
        lv, rv = norm(substitute(l, x, v), meter), norm(substitute(r, x, v), meter)
        if lv != rv or free_vars(lv) or free_vars(rv):
            return False
    return True


def _domain(kn: Knowledge, x: str) -> Optional[list[Node]]:
    ty = kn.types.get(x)
    base = _strip(ty) if ty is not None else None
    if isinstance(base, TBool):
        return [Tru(), Fls()]
    if isinstance(base, TUnit):
        return [Unit()]
    if isinstance(base, TNat):
        bound = None
        for a, b in kn.facts:
            call = natop_call(a)
            if call and b == Tru() and call[0] == "lessThan" and call[1] == Var(x) and _numeral(call[2]):
                k = nat_value(call[2])
                bound = k if bound is None else min(bound, k)
        if bound is not None:
            return [build_nat(i) for i in range(bound)]
    return None


def _arith(kn: Knowledge, l: Node, r: Node, meter: Meter) -> bool:
    return Arith(kn, meter).valid(l, r)


_STRATEGIES = (("congruence", _congruence), ("enumerate", _enumerate), ("arith", _arith))


def refute(ctx, budget: int = DEFAULT_BUDGET) -> bool:
    """Whether the hypotheses of `ctx` are contradictory."""
    return isinstance(solve(VC(ctx, Tru(), Fls(), "refute"), budget), Valid)


# ------------------------------------------------------------ arithmetic

# linear expressions: dict atom -> coefficient, with the constant under key None
Lin = dict


def _lin(const: int = 0, **_: int) -> Lin:
    return {None: Fraction(const)} if const else {}


def _add(a: Lin, b: Lin, k: Fraction = Fraction(1)) -> Lin:
    out = dict(a)
    for key, c in b.items():
        v = out.get(key, Fraction(0)) + k * c
        if v:
            out[key] = v
        else:
            out.pop(key, None)
    return out


def _const(a: Lin) -> Fraction:
    return a.get(None, Fraction(0))


# formulas: ("le", lin) means lin <= 0, ("eq", lin) means lin = 0,
# ("and", [..]), ("or", [..]), ("true",), ("false",)
TRUE = ("true",)
FALSE = ("false",)


def _le(a: Lin, b: Lin, strict: bool = False) -> tuple:
    d = _add(a, b, Fraction(-1))
    return ("le", _add(d, {None: Fraction(1)}) if strict else d)


def _eq(a: Lin, b: Lin) -> tuple:
    return ("eq", _add(a, b, Fraction(-1)))


def _and(*fs: tuple) -> tuple:
    return ("and", list(fs))


def _or(*fs: tuple) -> tuple:
    return ("or", list(fs))


MAX_DISJUNCTS = 512


class Arith:
    def __init__(self, kn: Knowledge, meter: Meter):
        self.kn = kn
        self.meter = meter
        self.side: list[tuple] = []
        self.atoms: dict[Node, str] = {}
        self.bools: set[str] = set()
        self.cache: dict[Node, Lin] = {}

    def atom(self, t: Node, boolean: bool = False) -> Lin:
        name = self.atoms.get(t)
        if name is None:
            name = f"a{len(self.atoms)}"
            self.atoms[t] = name
        if boolean:
            self.bools.add(name)
        return {name: Fraction(1)}

    def fresh_atom(self) -> tuple[Node, Lin]:
        v = Var(self.kn.fresh.name("k"))
        return v, self.atom(v)

    # ---- nat terms

    def nat(self, t: Node) -> Optional[Lin]:
        self.meter.tick()
        if t in self.cache:
            return self.cache[t]
        out = self._nat(t)
        if out is not None:
            self.cache[t] = out
        return out

    def _nat(self, t: Node) -> Optional[Lin]:
        match t:
            case Zero():
                return {}
            case Succ(u):
                inner = self.nat(u)
                return None if inner is None else _add(inner, {None: Fraction(1)})
            case Size(u):
                return self.size(u)
            case Var():
                return self.atom(t)
            case Match(s, z, b):
                return self.nat_cases(t, s, z, b)
            case If(c, a, b):
                res = self.atom(t)
                la, lb = self.nat(a), self.nat(b)
                if la is None or lb is None:
                    return res
                self.side.append(_or(_and(self.form(c, True), _eq(res, la)),
                                     _and(self.form(c, False), _eq(res, lb))))
                return res
            case Tru() | Fls() | Unit() | Pair() | Lam() | TyAbs() | Inl() | Inr() | Fold():
                return None
        call = natop_call(t)
        if call is not None:
            if call[0] != "plus":
                return None
            a, b = self.nat(call[1]), self.nat(call[2])
            return None if a is None or b is None else _add(a, b)
        return self.atom(t)

    def nat_cases(self, t: Node, s: Node, z: Node, b: Bind) -> Optional[Lin]:
        ls = self.nat(s)
        if ls is None:
            return None
        res = self.atom(t)
        k, lk = self.fresh_atom()
        lz = self.nat(z)
        lsucc = self.nat(norm(open_bind(b, k), self.meter))
        zero_case = _and(_eq(ls, {}), _eq(res, lz)) if lz is not None else _eq(ls, {})
        succ_case = _and(_eq(ls, _add(lk, {None: Fraction(1)})), _eq(res, lsucc)) if lsucc is not None \
            else _eq(ls, _add(lk, {None: Fraction(1)}))
        self.side.append(_or(zero_case, succ_case))
        return res

    def size(self, t: Node) -> Lin:
        match t:
            case Zero() | Unit() | Tru() | Fls() | Lam() | TyAbs():
                return {}
            case Succ(u) | Fold(_, u) | Inl(u) | Inr(u):
                return _add(self.size(u), {None: Fraction(1)})
            case Pair(a, b):
                return _add(self.size(a), self.size(b))
            case Var(x) if self.kn.is_nat_var(x):
                return self.atom(t)
        return self.atom(Size(t))

    # ---- boolean terms

    def is_bool(self, t: Node) -> bool:
        if isinstance(t, (Tru, Fls)):
            return True
        call = natop_call(t)
        return call is not None and call[0] != "plus"

    def form(self, t: Node, positive: bool) -> tuple:
        self.meter.tick()
        match t:
            case Tru():
                return TRUE if positive else FALSE
            case Fls():
                return FALSE if positive else TRUE
            case If(c, a, b):
                return _or(_and(self.form(c, True), self.form(a, positive)),
                           _and(self.form(c, False), self.form(b, positive)))
            case Match(s, z, b):
                ls = self.nat(s)
                if ls is not None:
                    k, lk = self.fresh_atom()
                    body = norm(open_bind(b, k), self.meter)
                    return _or(_and(_eq(ls, {}), self.form(z, positive)),
                               _and(_eq(ls, _add(lk, {None: Fraction(1)})), self.form(body, positive)))
        call = natop_call(t)
        if call is not None and call[0] != "plus":
            a, b = self.nat(call[1]), self.nat(call[2])
            if a is not None and b is not None:
                op = call[0]
                if op == "lessThan":
                    return _le(a, b, strict=True) if positive else _le(b, a)
                if op == "lessEqual":
                    return _le(a, b) if positive else _le(b, a, strict=True)
                return _eq(a, b) if positive else _or(_le(a, b, strict=True), _le(b, a, strict=True))
        v = self.atom(t, boolean=True)
        return _eq(v, {None: Fraction(1)}) if positive else _eq(v, {})

    def equation(self, a: Node, b: Node, positive: bool) -> Optional[tuple]:
        for x, y in ((a, b), (b, a)):
            if isinstance(y, (Tru, Fls)):
                return self.form(x, positive == isinstance(y, Tru))
        if self.is_bool(a) and self.is_bool(b):
            pa, pb = self.form(a, True), self.form(b, True)
            if positive:
                return _or(_and(pa, pb), _and(self.form(a, False), self.form(b, False)))
            return _or(_and(pa, self.form(b, False)), _and(self.form(a, False), pb))
        if not (self._natlike(a) or self._natlike(b)):
            return None
        la, lb = self.nat(a), self.nat(b)
        if la is None or lb is None:
            return None
        return _eq(la, lb) if positive else _or(_le(la, lb, strict=True), _le(lb, la, strict=True))

    def _natlike(self, t: Node) -> bool:
        if isinstance(t, (Zero, Succ, Size)):
            return True
        if isinstance(t, Var):
            return self.kn.is_nat_var(t.name)
        call = natop_call(t)
        return call is not None and call[0] == "plus" or isinstance(t, Match) and isinstance(t.t0, (Zero, Succ))

    def valid(self, l: Node, r: Node) -> bool:
        goal = self.equation(l, r, False)
        if goal is None:
            return False
        hyps = []
        for a, b in self.kn.facts:
            f = self.equation(a, b, True)
            if f is not None:
                hyps.append(f)
        bounds = []
        for t, name in self.atoms.items():
            bounds.append(("le", {name: Fraction(-1)}))
            if name in self.bools:
                bounds.append(("le", {name: Fraction(1), None: Fraction(-1)}))
        whole = _and(goal, *hyps, *self.side, *bounds)
        for conj in _dnf(whole, self.meter):
            if _satisfiable(conj, self.meter):
                return False
        return True


def _dnf(f: tuple, meter: Meter) -> list[list[tuple]]:
    meter.tick()
    tag = f[0]
    if tag == "true":
        return [[]]
    if tag == "false":
        return []
    if tag in ("le", "eq"):
        return [[f]]
    if tag == "or":
        out: list[list[tuple]] = []
        for g in f[1]:
            out.extend(_dnf(g, meter))
            if len(out) > MAX_DISJUNCTS:
                raise OutOfBudget()
        return out
    acc: list[list[tuple]] = [[]]
    for g in f[1]:
        parts = _dnf(g, meter)
        acc = [a + p for a in acc for p in parts]
        if len(acc) > MAX_DISJUNCTS:
            raise OutOfBudget()
        if not acc:
            return []
    return acc


def _tighten(lin: Lin) -> Lin:
    """For integer atoms, scale to integer coefficients and round the constant."""
    coefs = [c for k, c in lin.items() if k is not None]
    if not coefs:
        return lin
    den = math.lcm(*(c.denominator for c in lin.values()))
    scaled = {k: c * den for k, c in lin.items()}
    g = math.gcd(*(int(c) for k, c in scaled.items() if k is not None))
    out = {k: c / g for k, c in scaled.items() if k is not None}
    const = Fraction(math.ceil(_const(scaled) / g))
    if const:
        out[None] = const
    return out


def _satisfiable(conj: list[tuple], meter: Meter) -> bool:
    """Fourier-Motzkin over the rationals with integer tightening."""
    eqs = [lin for tag, lin in conj if tag == "eq"]
    les = [lin for tag, lin in conj if tag == "le"]
    while eqs:
        meter.tick()
        e = eqs.pop()
        keys = [k for k in e if k is not None]
        if not keys:
            if _const(e) != 0:
                return False
            continue
        x = min(keys)
        c = e[x]
        # x = -(e - c x) / c
        def elim(lin: Lin, x=x, e=e, c=c) -> Lin:
            k = lin.get(x)
            return lin if k is None else _add(lin, e, -k / c)
        eqs = [elim(q) for q in eqs]
        les = [elim(q) for q in les]
    les = [_tighten(q) for q in les]
    while True:
        meter.tick(len(les) + 1)
        for q in les:
            if len(q) == (1 if None in q else 0) and _const(q) > 0:
                return False
        keys = sorted({k for q in les for k in q if k is not None})
        if not keys:
            return True
        x = keys[0]
        pos = [q for q in les if q.get(x, 0) > 0]
        neg = [q for q in les if q.get(x, 0) < 0]
        rest = [q for q in les if x not in q]
        new = []
        for p in pos:
            for n in neg:
                comb = _add(_add({}, p, 1 / p[x]), n, -1 / n[x])
                new.append(_tighten(comb))
        les = _dedupe(rest + new)
        if len(les) > 4000:
            raise OutOfBudget()


def _dedupe(les: list[Lin]) -> list[Lin]:
    seen = set()
    out = []
    for q in les:
        key = tuple(sorted(((k or ""), c) for k, c in q.items()))
        if key not in seen:
            seen.add(key)
            out.append(q)
    return out


# ------------------------------------------------------------ export


def vc_record(vc: VC) -> dict:
    return {
        "origin": vc.origin,
        "theta": list(vc.context.theta),
        "gamma": [[x, show(ty)] for x, ty in vc.context.gamma],
        "lhs": show(vc.lhs),
        "rhs": show(vc.rhs),
    }


def export_vcs(vcs: Iterable[VC], sink: IO[str]) -> int:
    n = 0
    for vc in vcs:
        sink.write(json.dumps(vc_record(vc), ensure_ascii=True, separators=(",", ":")) + "\n")
        n += 1
    return n
