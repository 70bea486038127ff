import json
from importlib import resources

import pytest

from systemfr.cli import BAD_INPUT, FAILED, OK, UNKNOWN, RunConfig, main

CORPUS = resources.files("systemfr.corpus")


def corpus(name):
    return str(CORPUS / name)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return str(p)


def test_check_streams_succeeds(capsys):
    code, out, _ = run(capsys, "check", corpus("streams.sfrc"))
    assert code == OK
    assert "def constant : (forall n Nat (poly X (arrow X (rec-type n a" in out
    for name in ("constant", "zipWith", "fib", "zipWith_fst"):
        assert f"  def {name} : " in out
    assert "0 failed" in out and "0 unknown" in out


def test_false_refl_is_unknown(capsys, tmp_path):
    path = write(tmp_path, "bad.sfrc", "(def bad (refl zero (succ zero)))\n")
    code, out, _ = run(capsys, "check", path)
    assert code == UNKNOWN
    (line,) = [ln for ln in out.splitlines() if ln.strip().startswith("unknown:")]
    assert line.endswith("|- zero == (succ zero)")
    assert "1 unknown" in out


def test_unknown_vcs_can_be_exported(capsys, tmp_path):
    path = write(tmp_path, "bad.sfrc", "(def bad (refl zero (succ zero)))\n")
    dest = tmp_path / "vcs.jsonl"
    code, _, _ = run(capsys, "check", path, "--emit-vcs", str(dest))
    assert code == OK
    (rec,) = [json.loads(ln) for ln in dest.read_text().splitlines()]
    assert (rec["lhs"], rec["rhs"]) == ("zero", "(succ zero)")


def test_empty_file(capsys, tmp_path):
    code, out, _ = run(capsys, "check", write(tmp_path, "empty.sfr", ""))
    assert code == OK
    assert "summary: 0 definitions" in out


def test_failed_definition_does_not_stop_later_ones(capsys, tmp_path):
    src = "(def bad (app true zero))\n(def good zero)\n"
    code, out, _ = run(capsys, "check", write(tmp_path, "mixed.sfrc", src))
    assert code == FAILED
    assert "FAILED" in out and "  def good : Nat" in out


def test_parse_error_exits_3(capsys, tmp_path):
    code, _, err = run(capsys, "check", write(tmp_path, "broken.sfr", "def id(x: Nat): Nat = { x"))
    assert code == BAD_INPUT
    assert "1:26" in err


def test_worst_code_wins(capsys, tmp_path):
    bad = write(tmp_path, "bad.sfrc", "(def bad (refl zero (succ zero)))\n")
    broken = write(tmp_path, "broken.sfr", "def")
    code, _, _ = run(capsys, "check", bad, broken)
    assert code == BAD_INPUT


def test_trace_lists_every_vc(capsys):
    _, quiet, _ = run(capsys, "check", corpus("streams.sfrc"))
    _, loud, _ = run(capsys, "check", corpus("streams.sfrc"), "--trace")
    assert loud.count("|-") > quiet.count("|-") == 0


def test_check_is_deterministic(capsys):
    paths = [corpus(n) for n in ("streams.sfrc", "lists.sfr")]
    first = run(capsys, "check", *paths)
    second = run(capsys, "check", *paths)
    assert first == second


def test_emit_vcs_exports_everything(capsys):
    code, out, _ = run(capsys, "emit-vcs", corpus("streams.sfrc"))
    assert code == OK
    recs = [json.loads(ln) for ln in out.splitlines()]
    assert recs and all({"origin", "lhs", "rhs"} <= set(r) for r in recs)


@pytest.mark.parametrize("expr, shown", [
    ("nth 3 fib", "2"),
    ("size (succ zero, \\x. x)", "1"),
    ("cons 1 nil", "(fold (right (pair 1 (fold (left unit)))))"),
])
def test_eval_examples(capsys, expr, shown):
    code, out, _ = run(capsys, "eval", expr, "--pretty")
    assert (code, out.strip()) == (OK, shown)


def test_eval_prints_sexpr_numerals_without_pretty(capsys):
    assert run(capsys, "eval", "nth 3 fib")[1].strip() == "(succ (succ zero))"


def test_eval_stuck(capsys):
    code, out, _ = run(capsys, "eval", "true zero")
    assert code != OK and out.startswith("stuck:")


def test_eval_error_and_fuel(capsys):
    code, out, _ = run(capsys, "eval", "err")
    assert code == FAILED and out.startswith("error:")
    code, out, _ = run(capsys, "eval", "nth 3 fib", "--fuel", "5")
    assert code == FAILED and out.startswith("out of fuel after 5 steps")


def test_eval_file(capsys):
    code, out, _ = run(capsys, "eval", corpus("ackermann.sfr"), "--pretty")
    assert (code, out.split()) == (OK, ["7", "5"])


def test_eval_trace(capsys):
    code, out, _ = run(capsys, "eval", "(\\x. x) zero", "--trace")
    lines = out.splitlines()
    assert code == OK and lines[-1] == "zero" and all(ln.startswith("; ") for ln in lines[:-1])


def test_eval_parse_error(capsys):
    assert run(capsys, "eval", "(zero")[0] == BAD_INPUT


@pytest.mark.parametrize("value, ty, verdict", [
    ("(fold (left unit))", "(rec-type (succ (succ zero)) a (sum Unit (times Nat a)))", "yes"),
    ("(fold zero)", "(rec-type (succ zero) a (sum Unit (times Nat a)))", "no"),
    ("(lambda x x)", "(arrow Nat Nat)", "yes"),
    ("(app (lambda x x) zero)", "Nat", "yes"),
    ("err", "Nat", "no"),
])
def test_denote(capsys, value, ty, verdict):
    code, out, _ = run(capsys, "denote", value, ty)
    assert (code, out.strip()) == (OK, verdict)


def test_denote_parse_error(capsys):
    assert run(capsys, "denote", "(fold", "Nat")[0] == BAD_INPUT


def test_denote_rejects_open_input(capsys):
    assert run(capsys, "denote", "x", "Nat")[0] == BAD_INPUT


def test_flags_must_be_positive(capsys):
    with pytest.raises(SystemExit):
        main(["eval", "zero", "--fuel", "0"])
    with pytest.raises(ValueError):
        RunConfig("eval", ("zero",), nat_bound=0)
