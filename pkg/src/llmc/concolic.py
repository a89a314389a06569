"""Concolic interpreter for MiniLang.

Every value is a pair ``(concrete, symbolic)``; the symbolic half is ``None``
when the value does not depend on the entry parameters. Each evaluation of an
``if``/``while`` condition appends an :class:`Atom` to the path condition.
Asserts and divisions by a symbolic divisor add atoms at synthetic (negative)
sites so their failure directions can be targeted by negation.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from . import symbolic as S
from .lang import ast

DEFAULT_STR_MAX = 8
ALPHABET_LO, ALPHABET_HI = 32, 126  # printable ASCII


class InputError(ValueError):
    """A concrete input does not match the entry signature."""


@dataclass(frozen=True)
class ExecLimits:
    max_steps: int = 100_000
    max_loop_iterations: int = 1_000


@dataclass(frozen=True)
class Outcome:
    kind: str  # Ok | AssertFail | ErrorLabel | RuntimeError | BudgetExceeded
    detail: object = None

    def __str__(self):
        if self.detail is None:
            return self.kind
        return f"{self.kind}({self.detail!r})".replace("'", '"')

    @property
    def is_finding(self) -> bool:
        return self.kind in ("AssertFail", "ErrorLabel", "RuntimeError")

    def to_json(self):
        return {"kind": self.kind, "detail": self.detail}

    @classmethod
    def from_json(cls, d):
        return cls(d["kind"], d.get("detail"))


OK = Outcome("Ok")


@dataclass(frozen=True)
class Atom:
    expr: S.SymExpr
    site: int
    direction: bool
    depth: int

    @property
    def constraint(self) -> S.SymExpr:
        """The fact this atom asserts about the input."""
        return self.expr if self.direction else S.not_(self.expr)

    @property
    def flippable(self) -> bool:
        return not self.expr.is_const


ROOT_ID = hashlib.blake2b(b"llmc-path", digest_size=16).digest()


def extend_id(prev: bytes, site: int, direction: bool) -> bytes:
    return hashlib.blake2b(
        prev + f"{site}:{int(direction)}".encode(), digest_size=16
    ).digest()


@dataclass(frozen=True)
class PathCondition:
    atoms: tuple
    prefix_ids: tuple = field(repr=False, compare=False, default=())

    @classmethod
    def build(cls, atoms) -> "PathCondition":
        ids = [ROOT_ID]
        for a in atoms:
            ids.append(extend_id(ids[-1], a.site, a.direction))
        return cls(tuple(atoms), tuple(ids))

    @property
    def path_id(self) -> str:
        return self.prefix_ids[-1].hex()

    def constraints(self) -> List[S.SymExpr]:
        return [a.constraint for a in self.atoms]

    def __len__(self):
        return len(self.atoms)


@dataclass(frozen=True)
class TraceResult:
    path: PathCondition
    verdict: Outcome
    covered_directions: frozenset
    steps: int
    input: dict = field(compare=False, default_factory=dict)


@dataclass
class Frontier:
    id: int
    prefix: tuple
    flip: Atom
    discovered_at: int
    prefix_id: bytes = field(repr=False)
    target_id: bytes = field(repr=False)
    parent_input: dict = field(repr=False, default_factory=dict)
    status: str = "pending"  # pending | solved | unsat | unknown | retired

    @property
    def depth(self) -> int:
        return self.flip.depth

    @property
    def site(self) -> int:
        return self.flip.site

    @property
    def direction(self) -> bool:
        return self.flip.direction

    def query_atoms(self) -> list:
        return list(self.prefix) + [self.flip]


class FrontierStore:
    """Deduplicating source of frontiers; key = (prefix path id, site, direction)."""

    def __init__(self):
        self.seen = set()
        self.frontiers: Dict[int, Frontier] = {}
        self._next = 0

    def frontier_of(self, trace: TraceResult, iteration: int = 0) -> List[Frontier]:
        out = []
        path = trace.path
        # directions this trace took are explored; never queue them as flips later
        for d, atom in enumerate(path.atoms):
            self.seen.add((path.prefix_ids[d], atom.site, atom.direction))
        for d, atom in enumerate(path.atoms):
            if not atom.flippable:
                continue
            key = (path.prefix_ids[d], atom.site, not atom.direction)
            if key in self.seen:
                continue
            self.seen.add(key)
            flip = Atom(atom.expr, atom.site, not atom.direction, d)
            f = Frontier(
                id=self._next,
                prefix=path.atoms[:d],
                flip=flip,
                discovered_at=iteration,
                prefix_id=path.prefix_ids[d],
                target_id=extend_id(path.prefix_ids[d], atom.site, not atom.direction),
                parent_input=dict(trace.input),
            )
            self._next += 1
            self.frontiers[f.id] = f
            out.append(f)
        return out

    def pending(self) -> List[Frontier]:
        return [f for f in self.frontiers.values() if f.status == "pending"]


# ---------------------------------------------------------------- inputs

def default_input(program: ast.Program) -> dict:
    zero = {ast.INT: 0, ast.BOOL: False, ast.STR: ""}
    return {name: zero[ty] for name, ty in program.signature}


def validate_input(program: ast.Program, inp: dict, str_max: int = DEFAULT_STR_MAX) -> dict:
    sig = program.signature
    if set(inp) != {n for n, _ in sig}:
        raise InputError(f"input keys {sorted(inp)} do not match parameters {[n for n, _ in sig]}")
    out = {}
    for name, ty in sig:
        v = inp[name]
        if ty == ast.INT:
            if isinstance(v, bool) or not isinstance(v, int):
                raise InputError(f"{name}: expected int, got {v!r}")
        elif ty == ast.BOOL:
            if not isinstance(v, bool):
                raise InputError(f"{name}: expected bool, got {v!r}")
        else:
            if not isinstance(v, str):
                raise InputError(f"{name}: expected str, got {v!r}")
            if len(v) > str_max or any(not ALPHABET_LO <= ord(c) <= ALPHABET_HI for c in v):
                raise InputError(f"{name}: string {v!r} outside the bounded printable alphabet")
        out[name] = v
    return out


# ---------------------------------------------------------------- interpreter

class _Stop(Exception):
    def __init__(self, outcome: Outcome):
        self.outcome = outcome


class _NoShadow(Exception):
    """The skipped operand calls a user function and cannot be evaluated on the side."""


class _Return(Exception):
    def __init__(self, value):
        self.value = value


def _sym(v) -> S.SymExpr:
    c, s = v
    return s if s is not None else S.const(c)


class _Interp:
    def __init__(self, program: ast.Program, limits: ExecLimits):
        self.program = program
        self.limits = limits
        self.atoms: List[Atom] = []
        self.steps = 0
        self.shadow = 0

    def branch(self, site: int, cond) -> bool:
        c, s = cond
        expr = s if s is not None else S.const_bool(c)
        self.atoms.append(Atom(expr, site, bool(c), len(self.atoms)))
        return bool(c)

    def tick(self):
        self.steps += 1
        if self.steps > self.limits.max_steps:
            raise _Stop(Outcome("BudgetExceeded", "steps"))

    def call(self, fn: ast.FunctionDef, args: list):
        env = {p.name: a for p, a in zip(fn.params, args)}
        try:
            self.block(fn.body, env)
        except _Return as r:
            return r.value
        if fn.ret != ast.VOID:
            raise _Stop(Outcome("RuntimeError", "missing_return"))
        return (None, None)

    def block(self, stmts, env):
        for st in stmts:
            self.stmt(st, env)

    def stmt(self, st, env):
        self.tick()
        if isinstance(st, (ast.Let, ast.Assign)):
            env[st.name] = self.expr(st.value, env)
        elif isinstance(st, ast.If):
            if self.branch(st.site, self.expr(st.cond, env)):
                self.block(st.then, env)
            else:
                self.block(st.orelse, env)
        elif isinstance(st, ast.While):
            n = 0
            while self.branch(st.site, self.expr(st.cond, env)):
                if n >= self.limits.max_loop_iterations:
                    raise _Stop(Outcome("BudgetExceeded", "loop"))
                n += 1
                self.block(st.body, env)
                self.tick()
        elif isinstance(st, ast.Assert):
            if not self.branch(st.site, self.expr(st.cond, env)):
                raise _Stop(Outcome("AssertFail", st.site))
        elif isinstance(st, ast.ErrorStmt):
            raise _Stop(Outcome("ErrorLabel", st.label))
        elif isinstance(st, ast.Return):
            raise _Return(None if st.value is None else self.expr(st.value, env))
        elif isinstance(st, ast.ExprStmt):
            self.expr(st.expr, env)
        else:
            raise TypeError(st)

    def expr(self, e, env):
        if isinstance(e, ast.IntLit) or isinstance(e, ast.BoolLit) or isinstance(e, ast.StrLit):
            return (e.value, None)
        if isinstance(e, ast.Var):
            return env[e.name]
        if isinstance(e, ast.Unary):
            c, s = self.expr(e.operand, env)
            if e.op == "-":
                return (-c, None if s is None else S.arith(S.SUB, S.const_int(0), s))
            return (not c, None if s is None else S.not_(s))
        if isinstance(e, ast.Binary):
            return self.binary(e, env)
        if isinstance(e, ast.Call):
            args = [self.expr(a, env) for a in e.args]
            if e.name == "len":
                c, s = args[0]
                return (len(c), None if s is None else S.strlen(s))
            if e.name == "charAt":
                (sc, ss), (ic, is_) = args
                val = S.char_at(sc, ic)
                if ss is None and is_ is None:
                    return (val, None)
                return (val, S.charat(_sym(args[0]), _sym(args[1])))
            if self.shadow:
                raise _NoShadow()
            return self.call(self.program.function(e.name), args)
        raise TypeError(e)

    def shadow_sym(self, e, env):
        """Symbolic value of ``e`` without executing it (no atoms, no traps)."""
        self.shadow += 1
        try:
            return _sym(self.expr(e, env))
        except _NoShadow:
            return None
        finally:
            self.shadow -= 1

    def binary(self, e: ast.Binary, env):
        op = e.op
        if op in ("&&", "||"):
            lc, ls = self.expr(e.left, env)
            # Short circuit. The right operand is not executed, but the atom
            # must still describe the whole condition or negating it would not
            # flip the branch, so evaluate the right side symbolically only.
            if (op == "&&" and not lc) or (op == "||" and lc):
                if ls is None:
                    return (lc, None)
                rs = self.shadow_sym(e.right, env)
                if rs is None:
                    return (lc, ls)
                return (lc, S.and_(ls, rs) if op == "&&" else S.or_(ls, rs))
            rc, rs = self.expr(e.right, env)
            if ls is None and rs is None:
                return (rc, None)
            l_, r_ = _sym((lc, ls)), _sym((rc, rs))
            return (rc, S.and_(l_, r_) if op == "&&" else S.or_(l_, r_))
        left = self.expr(e.left, env)
        right = self.expr(e.right, env)
        lc, ls = left
        rc, rs = right
        if op in ("/", "%") and not self.shadow:
            if rs is not None:
                self.branch(e.guard, (rc != 0, S.cmp("!=", rs, S.const_int(0))))
            if rc == 0:
                raise _Stop(Outcome("RuntimeError", "division_by_zero"))
        if op == "+":
            c = lc + rc
        elif op == "-":
            c = lc - rc
        elif op == "*":
            c = lc * rc
        elif op == "/":
            c = S.int_div(lc, rc)
        elif op == "%":
            c = S.int_mod(lc, rc)
        else:
            c = S.compare(op, lc, rc)
        if ls is None and rs is None:
            return (c, None)
        if op in ("+", "-", "*", "/", "%"):
            kind = {"+": S.ADD, "-": S.SUB, "*": S.MUL, "/": S.DIV, "%": S.MOD}[op]
            return (c, S.arith(kind, _sym(left), _sym(right)))
        return (c, S.cmp(op, _sym(left), _sym(right)))


def concolic_execute(
    program: ast.Program, inp: dict, limits: Optional[ExecLimits] = None
) -> TraceResult:
    """Run ``program`` on ``inp`` while recording the symbolic path condition."""
    limits = limits or ExecLimits()
    entry = program.entry_fn
    if set(inp) != {p.name for p in entry.params}:
        raise InputError(f"input keys {sorted(inp)} do not match entry parameters")
    interp = _Interp(program, limits)
    args = [(inp[p.name], S.var(p.name, p.ty)) for p in entry.params]
    verdict = OK
    try:
        interp.call(entry, args)
    except _Stop as stop:
        verdict = stop.outcome
    except RecursionError:
        verdict = Outcome("RuntimeError", "stack_overflow")
    path = PathCondition.build(interp.atoms)
    covered = frozenset((a.site, a.direction) for a in interp.atoms)
    return TraceResult(path, verdict, covered, interp.steps, dict(inp))


def retrace(program: ast.Program, inp: dict, limits: Optional[ExecLimits] = None) -> PathCondition:
    """Recover the true path condition of ``inp`` by concrete execution."""
    return concolic_execute(program, inp, limits).path


def dump_trace(trace: TraceResult, str_max: int = DEFAULT_STR_MAX) -> dict:
    from .solver.smtlib import expr_to_smtlib

    return {
        "path_id": trace.path.path_id,
        "atoms": [expr_to_smtlib(a.constraint, str_max) for a in trace.path.atoms],
        "sites": [[a.site, a.direction] for a in trace.path.atoms],
        "verdict": str(trace.verdict),
        "covered_directions": sorted([s, d] for s, d in trace.covered_directions),
        "input": trace.input,
    }
