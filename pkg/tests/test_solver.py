import os
import random
import shutil

import pytest

from llmc import symbolic as S
from llmc.concolic import concolic_execute, default_input
from llmc.solver import (
    KERNEL,
    Budget,
    Contradiction,
    Domains,
    Query,
    check_model,
    expr_to_smtlib,
    propagate,
    solve,
    solve_with_timeout,
    to_smtlib,
)
from llmc.solver import backend
from llmc.solver.external import parse_model, solve_external
from oracles import brute_force
from qgen import random_query

x, y, z = S.var("x", "int"), S.var("y", "int"), S.var("z", "int")
c = S.const_int


def test_unique_solution():
    v = solve(Query.of([S.cmp(">", x, c(5)), S.cmp("<", x, c(7))]))
    assert v.is_sat and v.model == {"x": 6}


def test_empty_interval_is_unsat():
    v = solve(Query.of([S.cmp(">", x, c(5)), S.cmp("<", x, c(5))]))
    assert v.status == "UNSAT"


def test_product_against_brute_force():
    cons = [S.cmp("==", S.arith(S.MUL, x, y), c(12)), S.cmp(">", x, y)]
    dom = Domains().with_bounds(x=(1, 12), y=(1, 12))
    v = solve(Query.of(cons, domains=dom))
    expected = {(m["x"], m["y"]) for m in brute_force(cons, {"x": range(1, 13), "y": range(1, 13)})}
    assert expected == {(4, 3), (6, 2), (12, 1)}
    assert v.is_sat and (v.model["x"], v.model["y"]) in expected


def test_propagate_interval():
    dom = propagate(Query.of([S.cmp(">", x, c(5)), S.cmp("<=", x, c(9))]))
    assert dom["x"] == (6, 9)


def test_propagate_contradiction():
    out = propagate(Query.of([S.cmp("==", x, c(3)), S.cmp("==", x, c(4))]))
    assert isinstance(out, Contradiction)
    assert not out


def test_propagate_never_cuts_a_solution():
    rng = random.Random(5)
    for _ in range(300):
        q, ranges = random_query(rng)
        dom = propagate(q)
        sols = list(brute_force(q.constraints, ranges))
        if isinstance(dom, Contradiction):
            assert sols == []
            continue
        for m in sols:
            for n, v in m.items():
                lo, hi = dom[n]
                assert lo <= v <= hi


def test_check_model():
    q = Query.of([S.cmp(">", x, c(5))])
    assert check_model(q, {"x": 6})
    assert not check_model(q, {"x": 5})
    assert not check_model(q, {})


def test_check_model_agrees_with_concolic(suite):
    for e in suite:
        inp = default_input(e.program)
        tr = concolic_execute(e.program, inp)
        assert check_model(Query.of(tr.path.atoms), inp)


def test_smtlib_text():
    text = to_smtlib(Query.of([S.cmp(">", x, c(5))]))
    assert "(declare-const x Int)" in text
    assert "(assert (> x 5))" in text
    assert "(check-sat)" in text
    prod = to_smtlib(Query.of([S.cmp("==", S.arith(S.MUL, x, y), c(12))]))
    assert "(assert (= (* x y) 12))" in prod
    assert expr_to_smtlib(S.cmp("<=", x, c(-3))) == "(<= x (- 3))"


def test_string_constraints():
    s = S.var("s", "str")
    cons = [S.streq(s, S.const_str("ADMIN"))]
    v = solve(Query.of(cons))
    assert v.is_sat and v.model == {"s": "ADMIN"}
    v = solve(Query.of([S.cmp("==", S.strlen(s), c(3)), S.cmp("==", S.charat(s, c(1)), c(120))]))
    assert v.is_sat and len(v.model["s"]) == 3 and v.model["s"][1] == "x"
    assert solve(Query.of([S.cmp(">", S.strlen(s), c(8))])).status == "UNSAT"


def test_generous_timeout_solves():
    v = solve_with_timeout(Query.of([S.cmp(">", x, c(5))]), 1000)
    assert v.is_sat


def test_tiny_timeout_on_dense_nonlinear_query():
    cons = [
        S.cmp("==", S.arith(S.ADD, S.arith(S.MUL, S.arith(S.MUL, x, y), z), S.arith(S.MUL, x, x)), c(999_983)),
        S.cmp("!=", S.arith(S.MOD, S.arith(S.MUL, x, z), c(7)), S.arith(S.MOD, y, c(5))),
    ]
    q = Query.of(cons, budget=Budget(max_nodes=10**9))
    v = solve_with_timeout(q, 1)
    assert v.status == "UNKNOWN" and v.reason == "wallclock"
    assert v.is_timeout


def test_node_budget_exhaustion_is_a_budget_timeout():
    cons = [S.cmp("==", S.arith(S.MUL, S.arith(S.MUL, x, y), z), c(1_000_003))]
    v = solve(Query.of(cons, budget=Budget(max_nodes=50)))
    assert v.status == "UNKNOWN" and v.reason == "budget"


def test_larger_budget_never_loses_a_verdict():
    rng = random.Random(9)
    for _ in range(100):
        q, _ = random_query(rng)
        small = solve(Query(q.constraints, q.variables, q.domains, Budget(30)))
        big = solve(q)
        if small.status != "UNKNOWN":
            assert small.status == big.status


def test_solver_is_deterministic():
    rng = random.Random(3)
    for _ in range(100):
        q, _ = random_query(rng)
        assert solve(q) == solve(q)


def test_kernels_agree():
    if backend.compiled is None:
        pytest.skip("compiled kernel not built")
    assert KERNEL == "cython" or os.environ.get("LLMC_PURE_PYTHON")
    rng = random.Random(21)
    for _ in range(300):
        q, _ = random_query(rng)
        assert solve(q) == solve(q, force_python=True)
        assert propagate(q) == propagate(q, force_python=True) or (
            isinstance(propagate(q), Contradiction) and isinstance(propagate(q, force_python=True), Contradiction))


def test_random_differential_against_brute_force():
    rng = random.Random(1)
    for _ in range(300):
        q, ranges = random_query(rng)
        v = solve(q)
        sols = list(brute_force(q.constraints, ranges))
        assert v.status != "UNKNOWN"
        assert v.is_sat == bool(sols)
        if v.is_sat:
            assert check_model(q, v.model)


def test_parse_model():
    text = "sat\n(\n  (define-fun x () Int\n    (- 4))\n  (define-fun |s#len| () Int 2)\n  (define-fun b () Bool true)\n)"
    assert parse_model(text) == {"x": -4, "s#len": 2, "b": True}


@pytest.mark.skipif(shutil.which("z3") is None, reason="z3 binary not installed")
def test_external_solver_agrees_on_suite_queries(suite):
    rng = random.Random(2)
    for e in suite:
        for _ in range(3):
            inp = {n: (rng.randint(-50, 50) if t == "int" else rng.random() < 0.5 if t == "bool" else "ab")
                   for n, t in e.program.signature}
            tr = concolic_execute(e.program, inp)
            for d in range(min(len(tr.path.atoms), 10)):
                # frontier-shaped query: the prefix plus the negated atom
                atoms = tr.path.constraints()[:d] + [S.not_(tr.path.atoms[d].constraint)]
                q = Query.of(atoms, variables=e.program.signature, budget=Budget(200_000))
                mine = solve(q)
                if mine.status == "UNKNOWN":
                    continue
                theirs = solve_external(q, "z3 -in", 2)
                if theirs.status == "UNKNOWN":
                    continue
                assert mine.status == theirs.status, (e.name, [str(a) for a in atoms])
                if theirs.is_sat:
                    assert check_model(q, theirs.model)


@pytest.mark.skipif(shutil.which("z3") is None, reason="z3 binary not installed")
def test_external_solver_on_random_queries():
    rng = random.Random(4)
    for _ in range(60):
        q, _ = random_query(rng)
        assert solve_external(q, "z3 -in", 30).status == solve(q).status
