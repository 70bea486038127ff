"""Surface language: lexer, parser and abstract syntax.

Definitions look like

    def count(l: List, x: Nat): Nat = {
      decreases(size(l))
      l match {
        case Nil => 0
        case Cons(h, t) => (if (h == x) 1 else 0) + count(t, x)
      }
    } ensuring { res => res <= size(l) }

Application is juxtaposition (`f x y`); a call `f(a, b)` of a known
definition with two parameters is read as `f a b`.  Inside parentheses and
brackets newlines are insignificant; elsewhere an argument must start on the
same line as the function.
"""

from __future__ import annotations

import contextlib
import re
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union


class SurfaceError(ValueError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {msg}")
        self.msg, self.line, self.col = msg, line, col


# ---------------------------------------------------------------- lexer


@dataclass(frozen=True)
class Tok:
    kind: str  # name, int, sym, eof
    text: str
    line: int
    col: int
    nl: bool  # a newline separates this token from the previous one


_SYMS = ["=>", "==", "!=", "<=", ">=", "&&", "||", "::", "(", ")", "{", "}", "[", "]",
         ",", ":", "=", ".", "\\", "|", "@", ";", "<", ">", "+", "-", "!"]
_TOKEN = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<nl>\n)|(?P<comment>//[^\n]*)|(?P<int>\d+)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_']*)|(?P<sym>" + "|".join(re.escape(s) for s in _SYMS) + ")"
)


def lex(text: str) -> list[Tok]:
    toks: list[Tok] = []
    line, col, nl, i = 1, 1, True, 0
    while i < len(text):
        m = _TOKEN.match(text, i)
        if m is None:
            raise SurfaceError(f"unexpected character {text[i]!r}", line, col)
        kind, s = m.lastgroup, m.group()
        if kind == "nl":
            line, col, nl = line + 1, 1, True
        else:
            if kind in ("int", "name", "sym"):
                toks.append(Tok(kind, s, line, col, nl))
                nl = False
            col += len(s)
        i = m.end()
    toks.append(Tok("eof", "", line, col, True))
    return toks


# ---------------------------------------------------------------- syntax


@dataclass(frozen=True)
class Pos:
    line: int
    col: int


class SExpr:
    __slots__ = ()


@dataclass(frozen=True)
class SVar(SExpr):
    name: str
    pos: Pos = field(compare=False, default=Pos(0, 0))


@dataclass(frozen=True)
class SNum(SExpr):
    value: int


@dataclass(frozen=True)
class SConst(SExpr):
    """true, false, (), zero, Nil, err."""

    name: str


@dataclass(frozen=True)
class SApp(SExpr):
    fn: SExpr
    arg: SExpr
    pos: Pos = field(compare=False, default=Pos(0, 0))


@dataclass(frozen=True)
class STyApp(SExpr):
    fn: SExpr
    types: tuple["SType", ...]


@dataclass(frozen=True)
class STuple(SExpr):
    items: tuple[SExpr, ...]


@dataclass(frozen=True)
class SCtor(SExpr):
    """`fold[T](e)` and `h :: t`."""

    name: str
    args: tuple[SExpr, ...]
    ty: Optional["SType"] = None
    pos: Pos = field(compare=False, default=Pos(0, 0))


@dataclass(frozen=True)
class SLam(SExpr):
    x: str
    ty: Optional["SType"]
    body: SExpr


@dataclass(frozen=True)
class SIf(SExpr):
    c: SExpr
    a: SExpr
    b: SExpr


@dataclass(frozen=True)
class SLet(SExpr):
    names: tuple[str, ...]  # one name, or the components of a tuple pattern
    value: SExpr
    body: SExpr


@dataclass(frozen=True)
class SBin(SExpr):
    op: str
    a: SExpr
    b: SExpr
    pos: Pos = field(compare=False, default=Pos(0, 0))


@dataclass(frozen=True)
class SNot(SExpr):
    e: SExpr


@dataclass(frozen=True)
class SField(SExpr):
    e: SExpr
    name: str  # _1, _2, head, tail


@dataclass(frozen=True)
class SUnfold(SExpr):
    e: SExpr
    x: str
    body: SExpr


@dataclass(frozen=True)
class Pattern:
    kind: str  # Nil, Cons, zero, succ, Left, Right, true, false, pair, var
    names: tuple[str, ...] = ()


@dataclass(frozen=True)
class SCase:
    pat: Pattern
    body: SExpr
    pos: Pos = field(compare=False, default=Pos(0, 0))


@dataclass(frozen=True)
class SMatch(SExpr):
    scrut: SExpr
    cases: tuple[SCase, ...]
    pos: Pos = field(compare=False, default=Pos(0, 0))


@dataclass(frozen=True)
class SLocalDef(SExpr):
    d: "DefSpec"
    body: SExpr


@dataclass(frozen=True)
class SRecCall(SExpr):
    """A recursive call to an enclosing definition, produced by the lexicographic encoding."""

    target: str
    args: tuple[SExpr, ...]


class SType:
    __slots__ = ()


@dataclass(frozen=True)
class TyName(SType):
    name: str


@dataclass(frozen=True)
class TyApp_(SType):
    """Stream[T], Stream[n, T], Either[T, U]."""

    name: str
    args: tuple[Union[SType, SExpr], ...]


@dataclass(frozen=True)
class TyArrow(SType):
    x: Optional[str]
    dom: SType
    cod: SType


@dataclass(frozen=True)
class TyTuple(SType):
    items: tuple[SType, ...]


@dataclass(frozen=True)
class TyRefine(SType):
    x: str
    ty: SType
    pred: SExpr


@dataclass(frozen=True)
class Param:
    name: str
    ty: SType
    ghost: bool = False


@dataclass(frozen=True)
class DefSpec:
    name: str
    params: tuple[Param, ...]
    ret: SType
    body: SExpr
    pre: Optional[SExpr] = None
    measure: tuple[SExpr, ...] = ()
    post: Optional[tuple[str, SExpr]] = None
    tparams: tuple[str, ...] = ()
    pos: Pos = field(compare=False, default=Pos(0, 0))


@dataclass(frozen=True)
class SurfaceModule:
    defs: tuple[DefSpec, ...]
    exprs: tuple[SExpr, ...]


# ---------------------------------------------------------------- parser

KEYWORDS = {"def", "require", "decreases", "ensuring", "match", "case", "if", "else", "val",
            "let", "in", "eval", "true", "false", "unfold", "as", "err"}
_CMP = {"==", "!=", "<", "<=", ">", ">="}


class Parser:
    def __init__(self, text: str):
        self.toks = lex(text)
        self.i = 0
        self.newline_ok: list[bool] = [False]

    # token plumbing
    @property
    def tok(self) -> Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, *texts: str) -> bool:
        t = self.tok
        return t.kind in ("sym", "name") and t.text in texts

    def fail(self, msg: str, tok: Optional[Tok] = None) -> SurfaceError:
        t = tok or self.tok
        return SurfaceError(msg, t.line, t.col)

    def next(self) -> Tok:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> Tok:
        if not self.at(text):
            found = self.tok.text or "end of input"
            raise self.fail(f"expected '{text}', found '{found}'")
        return self.next()

    def name(self) -> str:
        t = self.tok
        if t.kind != "name" or t.text in KEYWORDS:
            raise self.fail(f"expected a name, found '{t.text or 'end of input'}'")
        self.i += 1
        return t.text

    def pos(self) -> Pos:
        return Pos(self.tok.line, self.tok.col)

    @contextlib.contextmanager
    def nested(self, newline_ok: bool) -> Iterator[None]:
        self.newline_ok.append(newline_ok)
        try:
            yield
        finally:
            self.newline_ok.pop()

    # module level
    def module(self) -> SurfaceModule:
        defs, exprs = [], []
        names: set[str] = set()
        while self.tok.kind != "eof":
            if self.at("def"):
                d = self.definition()
                if d.name in names:
                    raise SurfaceError(f"duplicate definition {d.name}", d.pos.line, d.pos.col)
                names.add(d.name)
                defs.append(d)
            elif self.at("eval"):
                self.next()
                exprs.append(self.expr())
            else:
                raise self.fail(f"expected 'def' or 'eval', found '{self.tok.text}'")
            while self.at(";"):
                self.next()
        return SurfaceModule(tuple(defs), tuple(exprs))

    def definition(self) -> DefSpec:
        pos = self.pos()
        self.expect("def")
        name = self.name()
        tparams: list[str] = []
        if self.at("["):
            self.next()
            tparams.append(self.name())
            while self.at(","):
                self.next()
                tparams.append(self.name())
            self.expect("]")
        self.expect("(")
        params: list[Param] = []
        with self.nested(True):
            while not self.at(")"):
                ghost = False
                if self.at("@"):
                    self.next()
                    if self.name() != "ghost":
                        raise self.fail("the only parameter annotation is @ghost", self.toks[self.i - 1])
                    ghost = True
                x = self.name()
                self.expect(":")
                params.append(Param(x, self.type(), ghost))
                if not self.at(")"):
                    self.expect(",")
        self.expect(")")
        if not params:
            raise self.fail("a definition needs at least one parameter")
        self.expect(":")
        ret = self.type()
        self.expect("=")
        self.expect("{")
        with self.nested(False):
            pre = None
            measure: tuple[SExpr, ...] = ()
            if self.at("require"):
                self.next()
                pre = self.paren_expr()
            if self.at("decreases"):
                self.next()
                self.expect("(")
                with self.nested(True):
                    ms = [self.expr()]
                    while self.at(","):
                        self.next()
                        ms.append(self.expr())
                self.expect(")")
                measure = tuple(ms)
            body = self.block()
        self.expect("}")
        post = None
        if self.at("ensuring"):
            self.next()
            close = {"{": "}", "(": ")"}.get(self.tok.text)
            if close is None:
                raise self.fail("expected '{' or '(' after ensuring")
            self.next()
            with self.nested(True):
                res = self.name()
                self.expect("=>")
                post = (res, self.expr())
            self.expect(close)
        return DefSpec(name, tuple(params), ret, body, pre, measure, post, tuple(tparams), pos)

    def paren_expr(self) -> SExpr:
        self.expect("(")
        with self.nested(True):
            e = self.expr()
        self.expect(")")
        return e

    # types
    def type(self) -> SType:
        dom = self.type_atom()
        if self.at("=>"):
            self.next()
            if isinstance(dom, _Binder):
                return TyArrow(dom.x, dom.ty, self.type())
            return TyArrow(None, dom, self.type())
        if isinstance(dom, _Binder):
            raise self.fail("a named parameter type must be followed by '=>'")
        return dom

    def type_atom(self) -> SType:
        t = self.tok
        if self.at("("):
            self.next()
            with self.nested(True):
                if self.at(")"):
                    self.next()
                    return TyName("Unit")
                if self.tok.kind == "name" and self.peek().text == ":":
                    x = self.name()
                    self.next()
                    ty = self.type()
                    self.expect(")")
                    return _Binder(x, ty)
                items = [self.type()]
                while self.at(","):
                    self.next()
                    items.append(self.type())
            self.expect(")")
            return items[0] if len(items) == 1 else TyTuple(tuple(items))
        if self.at("{"):
            self.next()
            with self.nested(True):
                x = self.name()
                self.expect(":")
                ty = self.type()
                self.expect("|")
                pred = self.expr()
            self.expect("}")
            return TyRefine(x, ty, pred)
        if t.kind == "name" and t.text not in KEYWORDS:
            self.next()
            if t.text in ("Stream", "Either"):
                self.expect("[")
                with self.nested(True):
                    args = self.type_args(t.text)
                self.expect("]")
                return TyApp_(t.text, args)
            return TyName(t.text)
        raise self.fail(f"expected a type, found '{t.text or 'end of input'}'")

    def type_args(self, head: str) -> tuple[Union[SType, SExpr], ...]:
        if head == "Either":
            a = self.type()
            self.expect(",")
            return (a, self.type())
        save = self.i
        try:
            ty = self.type()
            if self.at("]"):
                return (ty,)
        except SurfaceError:
            pass
        self.i = save
        index = self.expr()
        self.expect(",")
        return (index, self.type())

    # expressions
    def block(self) -> SExpr:
        if self.at("val"):
            pos = self.next()
            if self.at("("):
                self.next()
                names = [self.name()]
                while self.at(","):
                    self.next()
                    names.append(self.name())
                self.expect(")")
                if len(names) != 2:
                    raise self.fail("tuple patterns have two components", pos)
            else:
                names = [self.name()]
            self.expect("=")
            value = self.expr()
            while self.at(";"):
                self.next()
            return SLet(tuple(names), value, self.block())
        return self.expr()

    def expr(self) -> SExpr:
        if self.at("\\"):
            self.next()
            if self.at("("):
                self.next()
                x = self.name()
                self.expect(":")
                with self.nested(True):
                    ty = self.type()
                self.expect(")")
            else:
                x, ty = self.name(), None
            if not self.at(".", "=>"):
                raise self.fail("expected '.' or '=>' after a lambda parameter")
            self.next()
            return SLam(x, ty, self.expr())
        if self.at("if"):
            self.next()
            c = self.paren_expr()
            a = self.expr()
            self.expect("else")
            return SIf(c, a, self.expr())
        if self.at("let"):
            self.next()
            x = self.name()
            self.expect("=")
            v = self.expr()
            self.expect("in")
            return SLet((x,), v, self.expr())
        if self.at("unfold"):
            self.next()
            e = self.unary()
            self.expect("as")
            x = self.name()
            self.expect("in")
            return SUnfold(e, x, self.expr())
        return self.binary(0)

    _LEVELS = [("||",), ("&&",), tuple(_CMP), ("::",), ("+", "-")]

    def binary(self, level: int) -> SExpr:
        if level == len(self._LEVELS):
            return self.matches()
        ops = self._LEVELS[level]
        lhs = self.binary(level + 1)
        if ops == ("::",):
            if self.at("::"):
                pos = self.pos()
                self.next()
                return SCtor("Cons", (lhs, self.binary(level)), None, pos)
            return lhs
        while self.tok.kind == "sym" and self.tok.text in ops:
            pos = self.pos()
            op = self.next().text
            rhs = self.binary(level + 1)
            lhs = SBin(op, lhs, rhs, pos)
            if op in _CMP and self.tok.kind == "sym" and self.tok.text in _CMP:
                raise self.fail("comparisons do not chain")
        return lhs

    def matches(self) -> SExpr:
        e = self.unary()
        while self.at("match"):
            pos = self.pos()
            self.next()
            self.expect("{")
            cases = []
            with self.nested(False):
                while self.at("case"):
                    cpos = self.pos()
                    self.next()
                    pat = self.pattern()
                    self.expect("=>")
                    cases.append(SCase(pat, self.block(), cpos))
            if not cases:
                raise self.fail("a match needs at least one case")
            self.expect("}")
            e = SMatch(e, tuple(cases), pos)
        return e

    def pattern(self) -> Pattern:
        t = self.tok
        if self.at("("):
            self.next()
            a = self.name()
            self.expect(",")
            b = self.name()
            self.expect(")")
            return Pattern("pair", (a, b))
        if t.kind == "int" and t.text == "0":
            self.next()
            return Pattern("zero")
        if t.kind != "name":
            raise self.fail(f"expected a pattern, found '{t.text}'")
        self.next()
        if t.text in ("Nil", "zero", "true", "false"):
            if self.at("("):
                self.next()
                self.expect(")")
            return Pattern(t.text)
        if t.text in ("Cons", "succ", "Left", "Right"):
            self.expect("(")
            names = [self.name()]
            while self.at(","):
                self.next()
                names.append(self.name())
            self.expect(")")
            if len(names) != (2 if t.text == "Cons" else 1):
                raise self.fail(f"wrong number of fields for {t.text}", t)
            return Pattern(t.text, tuple(names))
        if t.text in KEYWORDS:
            raise self.fail(f"expected a pattern, found '{t.text}'", t)
        if self.at("::"):
            self.next()
            return Pattern("Cons", (t.text, self.name()))
        return Pattern("var", (t.text,))

    def unary(self) -> SExpr:
        if self.at("!"):
            self.next()
            return SNot(self.unary())
        return self.application()

    def _starts_atom(self) -> bool:
        t = self.tok
        if t.kind == "eof" or (t.nl and not self.newline_ok[-1]):
            return False
        if t.kind == "int":
            return True
        if t.kind == "name":
            return t.text not in KEYWORDS or t.text in ("true", "false", "err")
        return t.text in ("(", "{", "\\")

    def application(self) -> SExpr:
        pos = self.pos()
        fn = self.postfix()
        while self._starts_atom():
            if self.at("\\"):
                arg = self.expr()
            else:
                arg = self.postfix()
            fn = SApp(fn, arg, pos)
        return fn

    def postfix(self) -> SExpr:
        e = self.atom()
        while self.at(".") and self.peek().kind == "name" and self.peek().text in ("_1", "_2", "head", "tail") and not self.tok.nl:
            self.next()
            e = SField(e, self.next().text)
        return e

    def atom(self) -> SExpr:
        t = self.tok
        pos = self.pos()
        if t.kind == "int":
            self.next()
            return SNum(int(t.text))
        if self.at("("):
            self.next()
            if self.at(")"):
                self.next()
                return SConst("()")
            with self.nested(True):
                items = [self.expr()]
                while self.at(","):
                    self.next()
                    items.append(self.expr())
            self.expect(")")
            return items[0] if len(items) == 1 else STuple(tuple(items))
        if self.at("{"):
            self.next()
            with self.nested(False):
                e = self.block()
            self.expect("}")
            return e
        if t.kind != "name":
            raise self.fail(f"expected an expression, found '{t.text or 'end of input'}'")
        if t.text in ("true", "false", "err", "Nil", "zero"):
            self.next()
            if t.text == "Nil" and self.at("(") and self.peek().text == ")" and not self.tok.nl:
                self.next()
                self.next()
            return SConst(t.text)
        if t.text == "fold":
            self.next()
            self.expect("[")
            with self.nested(True):
                ty = self.type()
            self.expect("]")
            return SCtor("fold", (self.paren_expr(),), ty, pos)
        x = self.name()
        e: SExpr = SVar(x, pos)
        if self.at("[") and not self.tok.nl:
            self.next()
            with self.nested(True):
                tys = [self.type()]
                while self.at(","):
                    self.next()
                    tys.append(self.type())
            self.expect("]")
            e = STyApp(e, tuple(tys))
        return e


@dataclass(frozen=True)
class _Binder(SType):
    x: str
    ty: SType


def parse_surface(text: str) -> SurfaceModule:
    return Parser(text).module()


def parse_expr(text: str) -> SExpr:
    p = Parser(text)
    with p.nested(True):
        e = p.expr()
    if p.tok.kind != "eof":
        raise p.fail(f"unexpected '{p.tok.text}' after the expression")
    return e
