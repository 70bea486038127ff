"""Checking whole modules: linking earlier definitions, solving every VC."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .checker import Checker, CheckFailure, Context, Derivation, VC
from .frontend.desugar import Callee, callee_of_type, desugar_module
from .frontend.stdlib import CoreDef, corpus_text, load_core, prelude_text
from .frontend.surface import parse_surface
from .syntax import Node, TEqual, Var, erase, free_vars, substitute
from .vcsolver import DEFAULT_BUDGET, SolveResult, Valid, refute, solve


@dataclass
class DefResult:
    name: str
    ok: bool
    type: Optional[Node]
    vcs: list[VC]
    verdicts: list[SolveResult]
    error: Optional[str] = None
    derivation: Optional[Derivation] = None

    @property
    def discharged(self) -> bool:
        return self.ok and all(isinstance(v, Valid) for v in self.verdicts)

    def unknown(self) -> list[VC]:
        return [vc for vc, v in zip(self.vcs, self.verdicts) if not isinstance(v, Valid)]


def hypothesis_name(name: str) -> str:
    return f"p_{name}#def"


@dataclass
class Library:
    """Definitions checked so far, visible to later ones."""

    entries: list[tuple[str, Node, Node]] = field(default_factory=list)
    erased: dict[str, Node] = field(default_factory=dict)

    def context(self) -> Context:
        ctx = Context()
        for name, ty, term in self.entries:
            ctx = ctx.bind(name, ty).bind(hypothesis_name(name), TEqual(Var(name), term))
        return ctx

    def add(self, name: str, ty: Node, term: Node) -> None:
        self.entries.append((name, ty, term))
        self.erased[name] = self.close_erased(term)

    def add_unchecked(self, name: str, term: Node) -> None:
        self.erased[name] = self.close_erased(term)

    def copy(self) -> "Library":
        return Library(list(self.entries), dict(self.erased))

    def names(self) -> set[str]:
        return {n for n, _, _ in self.entries}

    def close_erased(self, term: Node) -> Node:
        """Erase and substitute the erased earlier definitions."""
        t = erase(term)
        return self.close(t)

    def close(self, t: Node) -> Node:
        for x in sorted(free_vars(t) & set(self.erased)):
            t = substitute(t, x, self.erased[x])
        return t


def check_def(lib: Library, d: CoreDef, budget: int = DEFAULT_BUDGET, trace: bool = False) -> DefResult:
    ck = Checker(refute=lambda ctx: refute(ctx, budget))
    ctx = lib.context()
    try:
        if d.expected is not None:
            ck.check(ctx, d.term, d.expected)
            ty = d.expected
        else:
            ty = ck.infer(ctx, d.term)
    except CheckFailure as e:
        return DefResult(d.name, False, None, ck.vcs, [solve(vc, budget) for vc in ck.vcs], str(e),
                         ck.root if trace else None)
    verdicts = [solve(vc, budget) for vc in ck.vcs]
    return DefResult(d.name, True, ty, ck.vcs, verdicts, None, ck.root if trace else None)


def check_defs(defs: Iterable[CoreDef], lib: Optional[Library] = None, budget: int = DEFAULT_BUDGET,
               trace: bool = False) -> tuple[list[DefResult], Library]:
    lib = lib if lib is not None else Library()
    out = []
    for d in defs:
        if d.name in lib.names():
            out.append(DefResult(d.name, False, None, [], [], f"{d.name} is already defined"))
            continue
        r = check_def(lib, d, budget, trace)
        out.append(r)
        if r.ok and r.type is not None:
            lib.add(d.name, r.type, d.term)
    return out, lib


_PRELUDE: dict[tuple[str, int], tuple[list[DefResult], Library]] = {}


def prelude(budget: int = DEFAULT_BUDGET) -> tuple[list[DefResult], Library]:
    """The checked prelude (memoized per text and budget)."""
    text = prelude_text()
    key = (text, budget)
    if key not in _PRELUDE:
        _PRELUDE[key] = check_defs(load_core(text), budget=budget)
    results, lib = _PRELUDE[key]
    return results, lib.copy()


# Corpus definitions whose VCs are inductive facts beyond the bundled solver.
# Their open VCs are exported instead of discharged.
ALLOWLIST = {
    "merge": "sortedness of the merged list needs induction over both inputs",
    "partition": "agreement with filter needs induction over the list",
}

CORPUS = ("streams.sfrc", "lists.sfr", "ackermann.sfr")


def callees(lib: Library) -> dict[str, Callee]:
    return {name: callee_of_type(ty) for name, ty, _ in lib.entries}


def load_source(text: str, path: str, lib: Library) -> tuple[list[CoreDef], list[Node]]:
    """Definitions and top-level expressions of a `.sfr` or `.sfrc` file."""
    if path.endswith(".sfr"):
        return desugar_module(parse_surface(text), callees(lib))
    return load_core(text), []


def stdlib_library(budget: int = DEFAULT_BUDGET) -> Library:
    """Prelude plus the stream corpus, checked."""
    _, lib = prelude(budget)
    _, lib = check_defs(load_core(corpus_text("streams.sfrc")), lib, budget)
    return lib


def check_corpus_libraries(budget: int = DEFAULT_BUDGET) -> dict[str, tuple[list[DefResult], Library]]:
    """Each corpus file checked on top of the prelude, with the resulting library."""
    out = {}
    for name in CORPUS:
        _, lib = prelude(budget)
        defs, _ = load_source(corpus_text(name), name, lib)
        out[name] = check_defs(defs, lib, budget)
    return out


def check_corpus(budget: int = DEFAULT_BUDGET) -> dict[str, list[DefResult]]:
    return {name: rs for name, (rs, _) in check_corpus_libraries(budget).items()}
