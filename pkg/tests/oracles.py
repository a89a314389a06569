"""Independent reference implementations used by the tests.

``enumerate_paths`` is a forking symbolic executor written directly against
the AST with z3 as the feasibility check (32-bit bit-vectors: every domain is
bounded, and bvsdiv/bvsrem truncate exactly like MiniLang). It shares no code with the concolic
interpreter or the built-in solver, so agreement between the two is evidence
rather than tautology.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import z3

from llmc.lang import ast

INT_LO, INT_HI = -1024, 1023
STR_MAX = 8
CH_LO, CH_HI = 32, 126
W = 32  # every intermediate value in the loop-free suite fits; see the replay cross-check


def _c(v):
    return z3.BitVecVal(v, W)


class NotLoopFree(Exception):
    pass


class _Stop(Exception):
    pass


@dataclass
class SymStr:
    length: z3.ArithRef
    chars: List[z3.ArithRef]


@dataclass
class Val:
    term: object  # z3 term, python str, or SymStr
    tainted: bool


@dataclass
class St:
    pc: Tuple = ()
    events: Tuple = ()
    env: Dict[str, Val] = field(default_factory=dict)
    outcome: Optional[str] = None  # set when execution stopped
    ret: Optional[Val] = None  # set by return
    returned: bool = False

    def fork(self, **kw):
        d = dict(pc=self.pc, events=self.events, env=dict(self.env), outcome=self.outcome,
                 ret=self.ret, returned=self.returned)
        d.update(kw)
        return St(**d)


@dataclass(frozen=True)
class OraclePath:
    events: Tuple
    verdict: str
    model: dict


def _tdiv(a, b):
    return a / b  # bvsdiv truncates toward zero


def _tmod(a, b):
    return z3.SRem(a, b)


class Enumerator:
    def __init__(self, program: ast.Program, int_lo=INT_LO, int_hi=INT_HI, str_max=STR_MAX):
        self.program = program
        self.int_lo, self.int_hi, self.str_max = int_lo, int_hi, str_max
        self.solver = z3.Solver()
        self.params = {}
        base = []
        for p in program.entry_fn.params:
            if p.ty == ast.INT:
                v = z3.BitVec(p.name, W)
                base += [v >= int_lo, v <= int_hi]
                self.params[p.name] = Val(v, True)
            elif p.ty == ast.BOOL:
                self.params[p.name] = Val(z3.Bool(p.name), True)
            else:
                n = z3.BitVec(p.name + "#len", W)
                cs = [z3.BitVec(f"{p.name}#{k}", W) for k in range(str_max)]
                base += [n >= 0, n <= str_max]
                base += [z3.And(c >= CH_LO, c <= CH_HI) for c in cs]
                self.params[p.name] = Val(SymStr(n, cs), True)
        self.solver.add(*base)

    # ---- feasibility
    def feasible(self, pc) -> bool:
        self.solver.push()
        self.solver.add(*pc)
        r = self.solver.check()
        self.solver.pop()
        if r == z3.unknown:
            raise RuntimeError("z3 returned unknown")
        return r == z3.sat

    def model(self, pc) -> dict:
        self.solver.push()
        self.solver.add(*pc)
        assert self.solver.check() == z3.sat
        m = self.solver.model()
        self.solver.pop()
        out = {}
        for p in self.program.entry_fn.params:
            v = self.params[p.name].term
            if p.ty == ast.INT:
                out[p.name] = m.eval(v, model_completion=True).as_signed_long()
            elif p.ty == ast.BOOL:
                out[p.name] = z3.is_true(m.eval(v, model_completion=True))
            else:
                n = m.eval(v.length, model_completion=True).as_signed_long()
                out[p.name] = "".join(chr(m.eval(c, model_completion=True).as_signed_long()) for c in v.chars[:n])
        return out

    def split(self, st: St, cond, site: Optional[int]):
        """Both feasible continuations of ``cond``; records an event when site is given."""
        out = []
        for want in (True, False):
            fact = cond if want else z3.Not(cond)
            pc = st.pc + (fact,)
            if self.feasible(pc):
                ev = st.events + ((site, want),) if site is not None else st.events
                out.append((st.fork(pc=pc, events=ev), want))
        return out

    # ---- expressions: eval returns a list of (state, value)
    def eval(self, e, st: St):
        if isinstance(e, ast.IntLit):
            return [(st, Val(_c(e.value), False))]
        if isinstance(e, ast.BoolLit):
            return [(st, Val(z3.BoolVal(e.value), False))]
        if isinstance(e, ast.StrLit):
            return [(st, Val(e.value, False))]
        if isinstance(e, ast.Var):
            return [(st, st.env[e.name])]
        if isinstance(e, ast.Unary):
            out = []
            for s, v in self.eval(e.operand, st):
                t = -v.term if e.op == "-" else z3.Not(v.term)
                out.append((s, Val(t, v.tainted)))
            return out
        if isinstance(e, ast.Call):
            return self.call_expr(e, st)
        return self.binary(e, st)

    def eval_all(self, exprs, st):
        results = [(st, [])]
        for a in exprs:
            nxt = []
            for s, vals in results:
                for s2, v in self.eval(a, s):
                    if s2.outcome is not None:
                        nxt.append((s2, None))
                    else:
                        nxt.append((s2, vals + [v]))
            results = [(s, v) for s, v in nxt if v is not None] + [(s, None) for s, v in nxt if v is None]
        return results

    def call_expr(self, e: ast.Call, st: St):
        out = []
        for s, args in self.eval_all(e.args, st):
            if args is None:
                out.append((s, None))
                continue
            if e.name == "len":
                v = args[0]
                t = _c(len(v.term)) if isinstance(v.term, str) else v.term.length
                out.append((s, Val(t, v.tainted)))
            elif e.name == "charAt":
                sv, iv = args
                out.append((s, Val(self.char_at(sv.term, iv.term), sv.tainted or iv.tainted)))
            else:
                fn = self.program.function(e.name)
                env = {p.name: a for p, a in zip(fn.params, args)}
                for s2 in self.block(fn.body, s.fork(env=env, ret=None, returned=False)):
                    if s2.outcome is not None:
                        out.append((s2.fork(env=s.env), None))
                    else:
                        out.append((s2.fork(env=s.env, ret=None, returned=False), s2.ret))
        return out

    def char_at(self, s, i):
        if isinstance(s, str):
            t = _c(-1)
            for k in range(len(s) - 1, -1, -1):
                t = z3.If(i == k, _c(ord(s[k])), t)
            return t
        t = _c(-1)
        for k in range(len(s.chars) - 1, -1, -1):
            t = z3.If(z3.And(i == k, k < s.length), s.chars[k], t)
        return t

    def str_eq(self, a, b):
        if isinstance(a, str) and isinstance(b, str):
            return z3.BoolVal(a == b)
        if isinstance(a, str):
            a, b = b, a
        if isinstance(b, str):
            if len(b) > len(a.chars):
                return z3.BoolVal(False)
            return z3.And(a.length == len(b), *[a.chars[k] == ord(b[k]) for k in range(len(b))])
        return z3.And(a.length == b.length,
                      *[z3.Implies(k < a.length, a.chars[k] == b.chars[k]) for k in range(len(a.chars))])

    def binary(self, e: ast.Binary, st: St):
        op = e.op
        if op in ("&&", "||"):
            out = []
            for s, lv in self.eval(e.left, st):
                if lv is None:
                    out.append((s, None))
                    continue
                short = z3.Not(lv.term) if op == "&&" else lv.term
                for s2, took_short in self.split(s, short, None):
                    if took_short:
                        out.append((s2, Val(z3.BoolVal(op == "||"), False)))
                    else:
                        out.extend(self.eval(e.right, s2))
            return out
        out = []
        for s, vals in self.eval_all([e.left, e.right], st):
            if vals is None:
                out.append((s, None))
                continue
            lv, rv = vals
            if op in ("/", "%"):
                conts = []
                if rv.tainted:
                    for s2, ok in self.split(s, rv.term != 0, e.guard):
                        if ok:
                            conts.append(s2)
                        else:
                            out.append((s2.fork(outcome="RuntimeError(\"division_by_zero\")"), None))
                else:
                    if z3.simplify(rv.term).as_signed_long() == 0:
                        out.append((s.fork(outcome="RuntimeError(\"division_by_zero\")"), None))
                    else:
                        conts.append(s)
                fn = _tdiv if op == "/" else _tmod
                for s2 in conts:
                    out.append((s2, Val(fn(lv.term, rv.term), lv.tainted or rv.tainted)))
                continue
            taint = lv.tainted or rv.tainted
            a, b = lv.term, rv.term
            if isinstance(a, (str, SymStr)):
                t = self.str_eq(a, b)
                out.append((s, Val(t if op == "==" else z3.Not(t), taint)))
                continue
            t = {
                "+": lambda: a + b, "-": lambda: a - b, "*": lambda: a * b,
                "==": lambda: a == b, "!=": lambda: a != b, "<": lambda: a < b,
                "<=": lambda: a <= b, ">": lambda: a > b, ">=": lambda: a >= b,
            }[op]()
            out.append((s, Val(t, taint)))
        return out

    # ---- statements: each returns the list of resulting states
    def block(self, stmts, st: St):
        states = [st]
        for stmt in stmts:
            nxt = []
            for s in states:
                if s.outcome is not None or s.returned:
                    nxt.append(s)
                else:
                    nxt.extend(self.stmt(stmt, s))
            states = nxt
        return states

    def stmt(self, stmt, st: St):
        if isinstance(stmt, (ast.Let, ast.Assign)):
            out = []
            for s, v in self.eval(stmt.value, st):
                if v is not None:
                    s = s.fork()
                    s.env[stmt.name] = v
                out.append(s)
            return out
        if isinstance(stmt, ast.If):
            out = []
            for s, c in self.eval(stmt.cond, st):
                if c is None:
                    out.append(s)
                    continue
                for s2, took in self.split(s, c.term, stmt.site):
                    out.extend(self.block(stmt.then if took else stmt.orelse, s2))
            return out
        if isinstance(stmt, ast.While):
            raise NotLoopFree(stmt.site)
        if isinstance(stmt, ast.Assert):
            out = []
            for s, c in self.eval(stmt.cond, st):
                if c is None:
                    out.append(s)
                    continue
                for s2, ok in self.split(s, c.term, stmt.site):
                    out.append(s2 if ok else s2.fork(outcome=f"AssertFail({stmt.site})"))
            return out
        if isinstance(stmt, ast.ErrorStmt):
            return [st.fork(outcome=f'ErrorLabel("{stmt.label}")')]
        if isinstance(stmt, ast.Return):
            if stmt.value is None:
                return [st.fork(returned=True, ret=None)]
            return [s if v is None else s.fork(returned=True, ret=v) for s, v in self.eval(stmt.value, st)]
        if isinstance(stmt, ast.ExprStmt):
            return [s for s, _ in self.eval(stmt.expr, st)]
        raise TypeError(stmt)

    def run(self) -> List[OraclePath]:
        entry = self.program.entry_fn
        start = St(env={p.name: self.params[p.name] for p in entry.params})
        paths = {}
        for s in self.block(entry.body, start):
            if s.events not in paths:
                paths[s.events] = OraclePath(s.events, s.outcome or "Ok", self.model(s.pc))
        return list(paths.values())


def enumerate_paths(program: ast.Program, **kw) -> List[OraclePath]:
    """Every feasible branch-event sequence of a loop-free program."""
    return Enumerator(program, **kw).run()


def feasible_directions(paths) -> set:
    return {ev for p in paths for ev in p.events if ev[0] >= 0}


# ---- brute force over small domains for solver differentials

def brute_force(constraints, domains: Dict[str, range]):
    """All assignments (as dicts) over ``domains`` satisfying every constraint."""
    from llmc import symbolic as S

    names = sorted(domains)
    for values in itertools.product(*(domains[n] for n in names)):
        env = dict(zip(names, values))
        if all(S.evaluate(c, env) for c in constraints):
            yield env
