"""Time the compiled solver kernel against the pure-Python one.

The workload is every frontier query that classic concolic poses on the bundled
suite, plus a batch of random small-domain queries. Both kernels must return the
same verdicts; the script exits non-zero if they ever disagree.

    python3 benchmarks/bench_kernel.py [--repeat 3] [--random 500]
"""

from __future__ import annotations

import argparse
import random
import statistics
import sys
import time
from pathlib import Path

from llmc import symbolic as S
from llmc.bench import load_suite
from llmc.concolic import FrontierStore, concolic_execute, default_input
from llmc.solver import Budget, Query, backend, solve

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))
from qgen import random_query  # noqa: E402


def suite_queries(per_program: int = 30, nodes: int = 20_000) -> list:
    """Frontier queries reached by a short solver-driven exploration of each program."""
    out = []
    for e in load_suite():
        store, queue, seen = FrontierStore(), [default_input(e.program)], 0
        while queue and seen < per_program:
            tr = concolic_execute(e.program, queue.pop())
            for f in store.frontier_of(tr):
                q = Query.of(f.query_atoms(), variables=e.program.signature, budget=Budget(nodes))
                out.append(q)
                seen += 1
                v = solve(q)
                if v.is_sat:
                    queue.append({**default_input(e.program), **v.model})
    return out


def time_kernel(queries, force_python: bool, repeat: int):
    runs, verdicts = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        got = [solve(q, force_python=force_python) for q in queries]
        runs.append(time.perf_counter() - t0)
        verdicts = [(v.status, v.model) for v in got]
    return min(runs), statistics.median(runs), verdicts


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--random", type=int, default=500, help="number of random queries")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    if backend.compiled is None:
        print("compiled kernel not available (not built, or LLMC_PURE_PYTHON set)")
        return 1
    rng = random.Random(args.seed)
    x, y = S.var("x", "int"), S.var("y", "int")
    workloads = {
        "suite frontiers": suite_queries(),
        "random small": [random_query(rng)[0] for _ in range(args.random)],
        "nonlinear": [
            Query.of([S.cmp("==", S.arith(S.MUL, x, x), S.const_int(k * k)),
                      S.cmp(">", S.arith(S.ADD, x, y), S.const_int(k))])
            for k in range(50, 90)
        ],
    }
    print(f"{'workload':<16} {'queries':>7} {'python s':>9} {'cython s':>9} {'speedup':>8}")
    status = 0
    for name, qs in workloads.items():
        py_best, _, py_v = time_kernel(qs, True, args.repeat)
        cy_best, _, cy_v = time_kernel(qs, False, args.repeat)
        if py_v != cy_v:
            print(f"{name}: kernels disagree", file=sys.stderr)
            status = 2
        print(f"{name:<16} {len(qs):>7} {py_best:>9.3f} {cy_best:>9.3f} {py_best / cy_best:>7.1f}x")
    return status


if __name__ == "__main__":
    sys.exit(main())
