import random
import re

import pytest

from llmc.bench import load_suite
from llmc.lang import ParseErrors, TypeErrors, branch_inventory, load, parse, pretty, typecheck
from progen import random_program


def _strip_comments_and_strings(text: str) -> str:
    text = re.sub(r'"(?:[^"\\]|\\.)*"', '""', text)
    return re.sub(r"//[^\n]*", "", text)


def test_single_conditional_has_one_site():
    prog = load('fn main(a: int) { if (a > 3) { error("E"); } }')
    sites = branch_inventory(prog)
    assert [s.id for s in sites] == [0]
    assert sites[0].kind == "if"
    assert sites[0].function == "main"


def test_unclosed_block_is_located_at_line_one():
    with pytest.raises(ParseErrors) as info:
        parse("fn main() {")
    diag = info.value.diagnostics[0]
    assert diag.line == 1
    assert diag.column >= 1


def test_parse_errors_carry_locations():
    with pytest.raises(ParseErrors) as info:
        parse("fn main(a: int) {\n  let x: int = ;\n}")
    assert info.value.diagnostics[0].line == 2
    assert "syntax error" in info.value.render("x.ml")


def test_synth01_site_count_matches_text_scan(suite):
    entry = suite.get("synth01")
    text = _strip_comments_and_strings(entry.path.read_text())
    tokens = re.findall(r"\b(if|while)\b", text)
    assert len(branch_inventory(entry.program)) == len(tokens)


@pytest.mark.parametrize("name", [e.name for e in load_suite()])
def test_every_suite_program_site_count_matches_text_scan(suite, name):
    entry = suite.get(name)
    text = _strip_comments_and_strings(entry.path.read_text())
    assert len(branch_inventory(entry.program)) == len(re.findall(r"\b(if|while)\b", text))


def test_string_mismatch_is_a_type_error():
    with pytest.raises(TypeErrors) as info:
        load('fn main() { let x: int = "s"; }')
    assert "expected int, got str" in str(info.value)


def test_non_bool_condition_is_a_type_error():
    with pytest.raises(TypeErrors) as info:
        load("fn main(a: int) { if (a + 1) { return; } }")
    assert "condition must be bool" in str(info.value)


@pytest.mark.parametrize("src, needle", [
    ("fn main() { x = 1; }", "undeclared"),
    ("fn main() { let y: int = f(1); }", "undefined function"),
    ("fn f(a: int) -> int { return f(a); }\nfn main() { }", "recursion"),
    ("fn main(a: int, a: int) { }", "duplicate parameter"),
    ('fn main(s: str) { let n: int = s + 1; }', "expected int"),
    ("fn main(a: int) { let b: bool = a == true; }", "cannot compare"),
])
def test_type_errors(src, needle):
    with pytest.raises(TypeErrors) as info:
        load(src)
    assert needle in str(info.value)


def test_whole_suite_typechecks(suite):
    assert len(suite) == 11
    for e in suite:
        typecheck(parse(e.path.read_text()))


def test_three_ifs_and_a_while_give_four_sites():
    src = """
fn main(a: int, b: int) {
  if (a > 0) { return; }
  let i: int = 0;
  while (i < b) {
    if (i == 3) { return; }
    i = i + 1;
  }
  if (b < 0) { return; }
}
"""
    sites = branch_inventory(load(src))
    assert [s.id for s in sites] == [0, 1, 2, 3]
    assert [s.kind for s in sites] == ["if", "while", "if", "if"]
    assert [s.source_span[0] for s in sites] == sorted(s.source_span[0] for s in sites)


def test_no_conditionals_gives_no_sites():
    assert branch_inventory(load("fn main(a: int) { let x: int = a * 2; }")) == []


def test_fintech_site_count_matches_manifest_audit(suite):
    entry = suite.get("fintech")
    assert len(branch_inventory(entry.program)) == entry.branch_sites == 21


def test_site_ids_are_stable_for_identical_text(suite):
    for e in suite:
        text = e.path.read_text()
        assert branch_inventory(load(text)) == branch_inventory(load(text))


def _shape(prog):
    # positions move under reformatting; everything else must survive
    return prog.functions, [(s.id, s.function, s.kind) for s in prog.branch_sites]


@pytest.mark.parametrize("name", [e.name for e in load_suite()])
def test_pretty_round_trip_on_suite(suite, name):
    prog = parse(suite.get(name).path.read_text())
    printed = pretty(prog)
    again = parse(printed)
    assert _shape(again) == _shape(prog)
    assert pretty(again) == printed


def test_pretty_round_trip_on_random_programs():
    for seed in range(300):
        src, _ = random_program(random.Random(seed))
        prog = parse(src)
        assert _shape(parse(pretty(prog))) == _shape(prog), seed


def test_every_random_program_typechecks():
    for seed in range(300):
        src, params = random_program(random.Random(1000 + seed))
        prog = load(src)
        assert prog.signature == params
