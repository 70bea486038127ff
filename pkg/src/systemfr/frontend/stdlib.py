"""Annotated core modules (`.sfrc`) and the bundled library."""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Optional

from ..sexpr import Atom, SexprError, SList, read_all, term_of, type_of
from ..syntax import Node


@dataclass(frozen=True)
class CoreDef:
    name: str
    term: Node
    expected: Optional[Node] = None
    line: int = 0


def load_core(text: str) -> list[CoreDef]:
    """Read `(def name term)` and `(check name type term)` forms."""
    out: list[CoreDef] = []
    seen: set[str] = set()
    for form in read_all(text):
        if not isinstance(form, SList) or not form.items or not isinstance(form.items[0], Atom):
            raise SexprError("expected (def ...) or (check ...)", form.line, form.col)
        head = form.items[0].text
        if head == "def" and len(form.items) == 3:
            name, term, expected = form.items[1], term_of(form.items[2]), None
        elif head == "check" and len(form.items) == 4:
            name, expected, term = form.items[1], type_of(form.items[2]), term_of(form.items[3])
        else:
            raise SexprError(f"malformed top-level form '{head}'", form.line, form.col)
        if not isinstance(name, Atom):
            raise SexprError("definition name must be an atom", name.line, name.col)
        if name.text in seen:
            raise SexprError(f"duplicate definition {name.text}", name.line, name.col)
        seen.add(name.text)
        out.append(CoreDef(name.text, term, expected, form.line))
    return out


def corpus_text(filename: str) -> str:
    return resources.files("systemfr.corpus").joinpath(filename).read_text(encoding="utf-8")


def prelude_text() -> str:
    path = os.environ.get("SFR_STDLIB")
    if path:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    return corpus_text("prelude.sfrc")


@lru_cache(maxsize=None)
def _bundled() -> dict[str, Node]:
    return {d.name: d.term for d in load_core(corpus_text("prelude.sfrc"))}


def natop(name: str) -> Node:
    """A bundled prelude definition, independent of SFR_STDLIB."""
    return _bundled()[name]


def stdlib() -> dict[str, Node]:
    """Prelude followed by the stream corpus, in definition order."""
    env = dict(_bundled())
    env.update((d.name, d.term) for d in load_core(corpus_text("streams.sfrc")))
    return env
