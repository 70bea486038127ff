"""Batch driver: check files, evaluate expressions, export VCs, query the oracle.

Exit codes: 0 success, 1 check or evaluation failure, 2 Unknown VCs left
without --emit-vcs, 3 parse or translation error.
"""

from __future__ import annotations

import argparse
import contextlib
import os
import sys
from importlib import resources
from collections import Counter
from dataclasses import dataclass
from typing import IO, Iterator, Optional, Sequence

from .checker import VC
from .driver import (
    DefResult, Library, callees, check_defs, hypothesis_name, load_source, prelude, stdlib_library,
)
from .frontend.desugar import translate_expr
from .frontend.surface import SurfaceError, parse_expr
from .reducibility import Budget, EMPTY, in_red_terms, in_red_values
from .semantics import DEFAULT_FUEL, ErrHit, Normalized, OutOfFuel, Stuck, evaluate, is_value
from .sexpr import SexprError, parse_term, parse_type, show
from .syntax import erase, erase_type, free_vars
from .vcsolver import DEFAULT_BUDGET, Valid, export_vcs

OK, FAILED, UNKNOWN, BAD_INPUT = 0, 1, 2, 3
INPUT_ERRORS = (SurfaceError, SexprError)


@dataclass(frozen=True)
class RunConfig:
    command: str
    inputs: tuple[str, ...]
    fuel: int = DEFAULT_FUEL
    vc_budget: int = DEFAULT_BUDGET
    nat_bound: int = 4
    trace: bool = False
    emit_derivation: bool = False
    emit_vcs: Optional[str] = None
    pretty: bool = False

    def __post_init__(self) -> None:
        for name in ("fuel", "vc_budget", "nat_bound"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name.replace('_', '-')} must be positive")


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


@contextlib.contextmanager
def _sink(path: Optional[str], out: IO[str]) -> Iterator[IO[str]]:
    if path is None or path == "-":
        yield out
        return
    with open(path, "w", encoding="utf-8") as fh:
        yield fh


def _strategies(r: DefResult) -> str:
    tally = Counter(v.evidence for v in r.verdicts if isinstance(v, Valid))
    return ", ".join(f"{k} {n}" for k, n in sorted(tally.items()))


def _brief(vc: VC, hidden: set[str], pretty: bool) -> str:
    hyps = ", ".join(f"{x}: {show(t, pretty)}" for x, t in vc.context.gamma if x not in hidden)
    return f"[{vc.origin}] {hyps} |- {show(vc.lhs, pretty)} == {show(vc.rhs, pretty)}"


def _report(r: DefResult, cfg: RunConfig, hidden: set[str], out: IO[str]) -> None:
    head = f"  def {r.name}"
    if r.type is not None:
        head += f" : {show(r.type, cfg.pretty)}"
    print(head, file=out)
    unknown = r.unknown()
    valid = len(r.vcs) - len(unknown)
    if r.ok:
        line = f"    ok, {len(r.vcs)} VCs, {valid} valid, {len(unknown)} unknown"
        strategies = _strategies(r)
        print(line + (f" [{strategies}]" if strategies else ""), file=out)
    else:
        print(f"    FAILED: {r.error}", file=out)
    for vc, v in zip(r.vcs, r.verdicts):
        if cfg.trace:
            verdict = v.evidence if isinstance(v, Valid) else "unknown"
            print(f"    {verdict}: {_brief(vc, hidden, cfg.pretty)}", file=out)
        elif not isinstance(v, Valid):
            print(f"    unknown: {_brief(vc, hidden, cfg.pretty)}", file=out)
    if cfg.emit_derivation and r.derivation is not None:
        print(r.derivation.render(2), file=out)


def _is_stdlib(path: str) -> bool:
    candidates = [os.environ.get("SFR_STDLIB"), str(resources.files("systemfr.corpus") / "prelude.sfrc")]
    return any(c and os.path.exists(c) and os.path.samefile(path, c) for c in candidates)


def _base(path: str, budget: int) -> Library:
    """The prelude, or nothing when checking the prelude itself."""
    return Library() if _is_stdlib(path) else prelude(budget)[1]


def _load(path: str, lib: Library):
    return load_source(_read(path), path, lib)


def run_check(cfg: RunConfig, out: IO[str] = sys.stdout, err: IO[str] = sys.stderr) -> int:
    codes = []
    exported = []
    totals = Counter()
    for path in cfg.inputs:
        print(f"file {path}", file=out)
        lib = _base(path, cfg.vc_budget)
        try:
            defs, _ = _load(path, lib)
        except INPUT_ERRORS as e:
            print(f"{path}:{e}", file=err)
            print("  parse error", file=out)
            codes.append(BAD_INPUT)
            continue
        results, lib = check_defs(defs, lib, cfg.vc_budget, trace=cfg.emit_derivation)
        hidden = lib.names() | {hypothesis_name(n) for n in lib.names()}
        for r in results:
            _report(r, cfg, hidden, out)
            unknown = r.unknown()
            totals.update(defs=1, ok=int(r.ok), vcs=len(r.vcs), unknown=len(unknown))
            if not r.ok:
                codes.append(FAILED)
            elif unknown:
                exported.extend(unknown)
                codes.append(OK if cfg.emit_vcs else UNKNOWN)
    if cfg.emit_vcs:
        with _sink(cfg.emit_vcs, out) as fh:
            export_vcs(exported, fh)
    print(f"summary: {totals['defs']} definitions, {totals['ok']} checked, "
          f"{totals['defs'] - totals['ok']} failed, {totals['vcs']} VCs, "
          f"{totals['unknown']} unknown", file=out)
    return _worst(codes)


def _worst(codes: Sequence[int]) -> int:
    for c in (BAD_INPUT, FAILED, UNKNOWN):
        if c in codes:
            return c
    return OK


def run_emit_vcs(cfg: RunConfig, out: IO[str] = sys.stdout, err: IO[str] = sys.stderr) -> int:
    codes = []
    vcs = []
    for path in cfg.inputs:
        lib = _base(path, cfg.vc_budget)
        try:
            defs, _ = _load(path, lib)
        except INPUT_ERRORS as e:
            print(f"{path}:{e}", file=err)
            codes.append(BAD_INPUT)
            continue
        results, _ = check_defs(defs, lib, cfg.vc_budget)
        for r in results:
            vcs.extend(r.vcs)
            if not r.ok:
                print(f"{path}: {r.name}: {r.error}", file=err)
                codes.append(FAILED)
    with _sink(cfg.emit_vcs, out) as fh:
        export_vcs(vcs, fh)
    return _worst(codes)


def run_eval(cfg: RunConfig, out: IO[str] = sys.stdout, err: IO[str] = sys.stderr) -> int:
    (source,) = cfg.inputs
    lib = stdlib_library(cfg.vc_budget)
    try:
        if os.path.isfile(source):
            defs, exprs = _load(source, lib)
            for d in defs:
                lib.add_unchecked(d.name, d.term)
        else:
            exprs = [translate_expr(parse_expr(source), callees(lib))]
    except INPUT_ERRORS as e:
        print(f"parse error: {e}", file=err)
        return BAD_INPUT
    code = OK
    for e in exprs:
        t = lib.close(erase(e))
        if free_vars(t):
            print(f"unbound: {', '.join(sorted(free_vars(t)))}", file=err)
            code = FAILED
            continue
        tracer = (lambda u: print(f"; {show(u, cfg.pretty)}", file=out)) if cfg.trace else None
        match evaluate(t, cfg.fuel, tracer):
            case Normalized(v, _):
                print(show(v, cfg.pretty), file=out)
            case Stuck(term, reason):
                print(f"stuck: {reason}: {show(term, cfg.pretty)}", file=out)
                code = FAILED
            case ErrHit():
                print("error: evaluation reached err", file=out)
                code = FAILED
            case OutOfFuel(_, steps):
                print(f"out of fuel after {steps} steps", file=out)
                code = FAILED
    return code


def run_denote(cfg: RunConfig, out: IO[str] = sys.stdout, err: IO[str] = sys.stderr) -> int:
    value_text, type_text = cfg.inputs
    try:
        v = erase(parse_term(value_text))
        ty = erase_type(parse_type(type_text))
    except INPUT_ERRORS as e:
        print(f"parse error: {e}", file=err)
        return BAD_INPUT
    if free_vars(v) or free_vars(ty):
        print(f"not closed: {', '.join(sorted(free_vars(v) | free_vars(ty)))}", file=err)
        return BAD_INPUT
    b = Budget(eval_fuel=cfg.fuel, nat_bound=cfg.nat_bound)
    verdict = in_red_values(v, ty, EMPTY, b) if is_value(v) else in_red_terms(v, ty, EMPTY, b)
    print(verdict, file=out)
    return OK


COMMANDS = {"check": run_check, "eval": run_eval, "emit-vcs": run_emit_vcs, "denote": run_denote}


def _positive(text: str) -> int:
    n = int(text)
    if n <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return n


def parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--fuel", type=_positive, default=DEFAULT_FUEL)
    common.add_argument("--vc-budget", type=_positive, default=DEFAULT_BUDGET)
    common.add_argument("--nat-bound", type=_positive, default=4)
    common.add_argument("--trace", action="store_true")
    common.add_argument("--emit-derivation", action="store_true")
    common.add_argument("--emit-vcs", metavar="PATH")
    common.add_argument("--pretty", action="store_true")
    p = argparse.ArgumentParser(prog="systemfr", description="System FR checker and interpreter")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("check", parents=[common], help="check .sfr/.sfrc files").add_argument(
        "inputs", nargs="+")
    sub.add_parser("eval", parents=[common], help="evaluate an expression or a file's evals"
                   ).add_argument("inputs", nargs=1)
    sub.add_parser("emit-vcs", parents=[common], help="write every VC as JSON lines"
                   ).add_argument("inputs", nargs="+")
    d = sub.add_parser("denote", parents=[common], help="reducibility verdict for a value and type")
    d.add_argument("inputs", nargs=2, metavar=("VALUE", "TYPE"))
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = parser().parse_args(argv)
    cfg = RunConfig(args.command, tuple(args.inputs), args.fuel, args.vc_budget, args.nat_bound,
                    args.trace, args.emit_derivation, args.emit_vcs, args.pretty)
    try:
        return COMMANDS[cfg.command](cfg, sys.stdout, sys.stderr)
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return FAILED


if __name__ == "__main__":
    sys.exit(main())
