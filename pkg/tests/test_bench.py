import csv
import io
import json
import random

import pytest

from llmc.bench import (
    CATEGORIES,
    ComparisonReport,
    ManifestError,
    compare,
    emit,
    load_suite,
    render,
    text_table,
)
from llmc.bench.suite import MANIFEST_PATH
from llmc.concolic import concolic_execute
from llmc.engine import CampaignBudget, CampaignConfig, ConfigError, run_campaign, strip_wallclock
from llmc.lang import ast
from conftest import STRAIGHT
from progen import random_input


def _manifest(tmp_path, programs, sources):
    for name, text in sources.items():
        (tmp_path / name).write_text(text)
    path = tmp_path / "manifest.json"
    path.write_text(json.dumps({"default_budget": 50, "programs": programs}))
    return path


def _entry(name, path, sites, category="nested-branching"):
    return {"name": name, "path": path, "category": category, "branch_sites": sites}


@pytest.fixture
def tiny_suite(tmp_path):
    src = (MANIFEST_PATH.parent / "programs" / "synth01.ml").read_text()
    path = _manifest(tmp_path, [_entry("flat", "flat.ml", 0), _entry("nested", "nested.ml", 7)],
                     {"flat.ml": STRAIGHT, "nested.ml": src})
    return load_suite(path)


# ---- manifest

def test_shipped_manifest(suite):
    assert len(suite) == 11
    assert sum(e.category == "fintech" for e in suite) == 1
    assert {e.category for e in suite} == set(CATEGORIES)
    assert suite.names[-1] == "fintech"


def test_missing_program_file(tmp_path):
    path = _manifest(tmp_path, [_entry("ghost", "ghost.ml", 1)], {})
    with pytest.raises(ManifestError, match="ghost"):
        load_suite(path)


def test_audited_count_mismatch(tmp_path):
    path = _manifest(tmp_path, [_entry("flat", "flat.ml", 3)], {"flat.ml": STRAIGHT})
    with pytest.raises(ManifestError, match="audited branch count 3"):
        load_suite(path)


@pytest.mark.parametrize("doc", ["{", "[]", '{"programs": 3}'])
def test_malformed_manifest(tmp_path, doc):
    path = tmp_path / "m.json"
    path.write_text(doc)
    with pytest.raises(ManifestError):
        load_suite(path)


def test_bad_entries(tmp_path):
    cases = [
        [_entry("a", "a.ml", 0, category="poetry")],
        [{"name": "a", "path": "a.ml"}],
        [_entry("a", "a.ml", 0), _entry("a", "a.ml", 0)],
        [dict(_entry("a", "a.ml", 0), budget=-1)],
    ]
    for programs in cases:
        path = _manifest(tmp_path, programs, {"a.ml": STRAIGHT})
        with pytest.raises(ManifestError):
            load_suite(path)
    with pytest.raises(ManifestError):
        load_suite(_manifest(tmp_path, [_entry("a", "a.ml", 0)], {"a.ml": "fn main( {"}))


def test_select_keeps_manifest_order(suite):
    assert suite.select(["fintech", "synth02"]).names == ["synth02", "fintech"]
    with pytest.raises(ManifestError):
        suite.select(["synth99"])


def _has_nonlinear_atom(program):
    rng = random.Random(0)
    for _ in range(60):
        tr = concolic_execute(program, random_input(rng, program.signature, lo=-50, hi=50))
        if any(a.expr.nonlinear for a in tr.path.atoms):
            return True
    return False


def test_categories_match_program_shape(suite):
    for e in suite:
        types = {t for _, t in e.program.signature}
        if e.category == "nonlinear":
            assert _has_nonlinear_atom(e.program), e.name
        if e.category == "string-puzzle":
            assert ast.STR in types, e.name
        if e.category == "fintech":
            assert e.branch_sites >= 20


def test_loop_free_feasible_path_audits_match_oracle(suite, oracle_paths):
    for e in suite:
        paths = oracle_paths[e.name]
        assert e.feasible_paths == (None if paths is None else len(paths)), e.name


def test_every_loop_free_program_has_a_reachable_finding(suite, oracle_paths):
    for e in suite:
        paths = oracle_paths[e.name]
        if paths is None:
            continue
        bugs = [p for p in paths if p.verdict != "Ok"]
        assert bugs, e.name
        # the oracle's witness really triggers the finding
        for p in bugs:
            assert str(concolic_execute(e.program, p.model).verdict) == p.verdict


# ---- compare and emit

def test_vacuous_program_gives_identical_full_cells(tiny_suite):
    flat = tiny_suite.select(["flat"])
    rep = compare(flat, ["random", "concolic"], budget=20)
    cells = [rep.cell("flat", s) for s in ("random", "concolic")]
    assert all(c.ok and c.branch_coverage == 1.0 for c in cells)
    assert cells[0].path_count == cells[1].path_count == 1


def test_single_strategy_compare_equals_run_campaign(suite):
    sub = suite.select(["synth04"])
    rep = compare(sub, ["llmc"], budget=80)
    direct = run_campaign(CampaignConfig(program=str(sub.get("synth04").path),
                                         budget=CampaignBudget(80)))
    cell = rep.cell("synth04", "llmc")
    assert cell.branch_coverage == direct.branch_coverage
    assert cell.path_count == direct.path_count
    assert cell.solver_invocations == direct.solver_invocations
    assert strip_wallclock(cell.curve) == strip_wallclock(direct.curve)


def test_compare_rejects_bad_strategies(tiny_suite):
    with pytest.raises(ConfigError):
        compare(tiny_suite, [])
    with pytest.raises(ConfigError):
        compare(tiny_suite, ["llmc", "oracle"])


def test_broken_cell_does_not_sink_the_run(tiny_suite, tmp_path):
    (tmp_path / "nested.ml").unlink()
    rep = compare(tiny_suite, ["random"], budget=10)
    assert rep.cell("flat", "random").ok
    bad = rep.cell("nested", "random")
    assert not bad.ok and "cannot read" in bad.error
    assert rep.failures == [bad]


def test_emitted_formats(tiny_suite, tmp_path):
    rep = compare(tiny_suite, ["llmc", "concolic", "random"], budget=60)
    out = emit(rep, tmp_path / "out")
    assert sorted(p.name for p in out.values()) == ["comparison.csv", "comparison.json", "coverage.tsv"]
    back = ComparisonReport.from_json(json.loads(out["json"].read_text()))
    assert back == rep
    rows = list(csv.DictReader(io.StringIO(out["csv"].read_text())))
    assert len(rows) == len(rep.programs) * len(rep.strategies)
    assert {(r["program"], r["strategy"]) for r in rows} == {(c.program, c.strategy) for c in rep.cells}
    series = {}
    for line in out["plotdata"].read_text().splitlines()[1:]:
        s, p, it, _, cov = line.split("\t")
        series.setdefault((s, p), []).append((int(it), float(cov)))
    for pts in series.values():
        assert pts == sorted(pts)
        assert [c for _, c in pts] == sorted(c for _, c in pts)
    with pytest.raises(ValueError):
        render(rep, "xml")


def test_text_table_lists_every_program(tiny_suite):
    rep = compare(tiny_suite, ["random", "concolic"], budget=30)
    table = text_table(rep)
    for p in rep.programs:
        assert p in table
    assert "random" in table and "concolic" in table


def test_aggregates(tiny_suite):
    rep = compare(tiny_suite, ["concolic"], budget=60)
    agg = rep.aggregates()["concolic"]
    cells = [c for c in rep.cells if c.strategy == "concolic"]
    assert agg["programs"] == 2
    assert agg["solver_invocations_total"] == sum(c.solver_invocations for c in cells)
    assert agg["branch_coverage"] == pytest.approx(sum(c.branch_coverage for c in cells) / 2)


def test_parallel_and_serial_reports_match(suite):
    sub = suite.select(["synth01", "synth06", "synth10"])
    serial = compare(sub, ["llmc", "ga"], budget=60, rng_seed=2)
    parallel = compare(sub, ["llmc", "ga"], budget=60, rng_seed=2, jobs=3)
    assert serial.dumps(wallclock=False) == parallel.dumps(wallclock=False)


def test_threshold_times(tiny_suite):
    rep = compare(tiny_suite, ["concolic"], budget=100, threshold=0.5)
    c = rep.cell("nested", "concolic")
    first = next(p for p in c.curve if p["branch_coverage"] >= 0.5)
    assert c.time_to_threshold["iteration"] == first["iteration"]
    assert rep.cell("flat", "concolic").time_to_threshold["iteration"] == 0

