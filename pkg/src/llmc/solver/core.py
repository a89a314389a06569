"""Finite-domain solver for path conditions.

Interval propagation prunes the variable domains, then a depth-first search
enumerates values (declaration order; ints from the domain midpoint outward,
booleans and string lengths/characters ascending) with propagation at every
node. Results are exact within the declared domains: UNSAT means "no model
inside the domains".
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

from .. import symbolic as S
from . import backend
from ._pykernel import OUT_OF_NODES, OUT_OF_TIME, SAT
from .lower import Unsupported, decode, lower

DEFAULT_NODE_BUDGET = 20_000


@dataclass(frozen=True)
class Domains:
    int_lo: int = -1024
    int_hi: int = 1023
    str_max: int = 8
    overrides: Tuple[Tuple[str, int, int], ...] = ()

    def int_bounds(self, name: str) -> Tuple[int, int]:
        for n, lo, hi in self.overrides:
            if n == name:
                return lo, hi
        return self.int_lo, self.int_hi

    def with_bounds(self, **bounds) -> "Domains":
        extra = tuple((n, lo, hi) for n, (lo, hi) in bounds.items())
        return Domains(self.int_lo, self.int_hi, self.str_max, self.overrides + extra)


@dataclass(frozen=True)
class Budget:
    max_nodes: int = DEFAULT_NODE_BUDGET
    wallclock_ms: Optional[float] = None


@dataclass(frozen=True)
class Query:
    constraints: tuple
    variables: tuple  # ((name, type), ...) in declaration order
    domains: Domains = field(default_factory=Domains)
    budget: Budget = field(default_factory=Budget)

    @classmethod
    def of(cls, items, variables=None, domains=None, budget=None) -> "Query":
        """Build from Atoms or boolean SymExprs. ``variables`` restricts and
        orders the free variables; by default they appear in first-use order."""
        constraints = tuple(getattr(it, "constraint", it) for it in items)
        free: Dict[str, str] = {}
        for c in constraints:
            for name, ty in _ordered_vars(c):
                free.setdefault(name, ty)
        if variables is not None:
            order = [(n, t) for n, t in variables if n in free]
            missing = set(free) - {n for n, _ in order}
            if missing:
                raise ValueError(f"no declaration for variables {sorted(missing)}")
        else:
            order = list(free.items())
        return cls(constraints, tuple(order), domains or Domains(), budget or Budget())


def _ordered_vars(e: S.SymExpr):
    out = []
    seen = set()
    stack = [e]
    while stack:
        x = stack.pop()
        if x.kind == S.VAR:
            if x.value not in seen:
                seen.add(x.value)
                out.append((x.value, x.type))
        else:
            stack.extend(reversed(x.args))
    return out


@dataclass(frozen=True)
class Verdict:
    status: str  # SAT | UNSAT | UNKNOWN
    model: Optional[dict] = None
    reason: Optional[str] = None  # budget | wallclock | unsupported
    nodes: int = 0

    @property
    def is_sat(self) -> bool:
        return self.status == "SAT"

    @property
    def is_timeout(self) -> bool:
        return self.status == "UNKNOWN" and self.reason in ("budget", "wallclock")

    def __str__(self):
        if self.status == "SAT":
            return f"SAT({self.model})"
        if self.status == "UNKNOWN":
            return f"UNKNOWN({self.reason})"
        return "UNSAT"


class Contradiction:
    """Propagation proved the query has no model within its domains."""

    def __bool__(self):
        return False

    def __repr__(self):
        return "Contradiction"


CONTRADICTION = Contradiction()


def check_model(query: Query, model: dict) -> bool:
    """True iff every constraint holds under ``model``."""
    try:
        return all(bool(S.evaluate(c, model)) for c in query.constraints)
    except KeyError:
        return False


def propagate(query: Query, force_python: bool = False):
    """Narrowed per-variable bounds, or :data:`CONTRADICTION`."""
    low = lower(query.constraints, query.variables, query.domains)
    prog = low.program
    lo, hi = list(prog.lo), list(prog.hi)
    if not backend.propagate(prog, lo, hi, force_python=force_python):
        return CONTRADICTION
    return {name: (lo[i], hi[i]) for i, name in enumerate(prog.names)}


def _run(query: Query, deadline: float, force_python: bool) -> Verdict:
    try:
        low = lower(query.constraints, query.variables, query.domains)
    except Unsupported:
        return Verdict("UNKNOWN", reason="unsupported")
    prog = low.program
    status, values, nodes = backend.search(
        prog, prog.lo, prog.hi, query.budget.max_nodes, deadline, force_python=force_python
    )
    if status == SAT:
        model = decode(low, values)
        if not check_model(query, model):
            raise AssertionError(f"solver produced a failing model {model} for {query}")
        return Verdict("SAT", model=model, nodes=nodes)
    if status == OUT_OF_NODES:
        return Verdict("UNKNOWN", reason="budget", nodes=nodes)
    if status == OUT_OF_TIME:
        return Verdict("UNKNOWN", reason="wallclock", nodes=nodes)
    return Verdict("UNSAT", nodes=nodes)


def solve(query: Query, force_python: bool = False) -> Verdict:
    deadline = 0.0
    if query.budget.wallclock_ms:
        deadline = time.monotonic() + query.budget.wallclock_ms / 1000.0
    return _run(query, deadline, force_python)


def solve_with_timeout(query: Query, wallclock_ms: float, force_python: bool = False) -> Verdict:
    if wallclock_ms <= 0:
        raise ValueError("wallclock_ms must be positive")
    return _run(query, time.monotonic() + wallclock_ms / 1000.0, force_python)
