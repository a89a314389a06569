"""Static checks for MiniLang: typing, scoping, call graph."""

from __future__ import annotations

from dataclasses import replace

from . import ast
from .errors import Diagnostic, TypeErrors

BUILTINS = {
    "len": ((ast.STR,), ast.INT),
    "charAt": ((ast.STR, ast.INT), ast.INT),
}

_ARITH = {"+", "-", "*", "/", "%"}
_ORDER = {"<", "<=", ">", ">="}
_EQ = {"==", "!="}
_LOGIC = {"&&", "||"}


class _Checker:
    def __init__(self, program: ast.Program):
        self.program = program
        self.errors: list = []
        self.sigs = {}
        self.calls = {}  # caller -> set of callees
        self.fn = None

    def err(self, pos, msg):
        self.errors.append(Diagnostic(pos[0], pos[1], msg))

    def run(self) -> ast.Program:
        for fn in self.program.functions:
            if fn.name in self.sigs or fn.name in BUILTINS:
                self.err(fn.pos, f"duplicate function {fn.name!r}")
                continue
            self.sigs[fn.name] = (tuple(p.ty for p in fn.params), fn.ret)
        entry = self.program.function(self.program.entry)
        if entry is None:
            self.err((1, 1), f"missing entry function {self.program.entry!r}")
        else:
            for p in entry.params:
                if p.ty not in ast.SYMBOLIC_TYPES:
                    self.err(p.pos, f"entry parameter {p.name!r} must be int, bool or str")
        fns = tuple(self.function(fn) for fn in self.program.functions)
        self.check_recursion()
        if self.errors:
            raise TypeErrors(self.errors)
        return replace(self.program, functions=fns, typed=True)

    def check_recursion(self):
        state = {}

        def visit(name, stack):
            state[name] = 1
            for callee in sorted(self.calls.get(name, ())):
                if state.get(callee) == 1:
                    fn = self.program.function(callee)
                    cycle = " -> ".join(stack + [callee])
                    self.err(fn.pos if fn else (1, 1), f"recursion is not supported: {cycle}")
                elif callee not in state:
                    visit(callee, stack + [callee])
            state[name] = 2

        for fn in self.program.functions:
            if fn.name not in state:
                visit(fn.name, [fn.name])

    def function(self, fn: ast.FunctionDef) -> ast.FunctionDef:
        self.fn = fn
        self.calls.setdefault(fn.name, set())
        scope = {}
        for p in fn.params:
            if p.name in scope:
                self.err(p.pos, f"duplicate parameter {p.name!r}")
            scope[p.name] = p.ty
        body = self.block(fn.body, [scope])
        return replace(fn, body=body)

    def lookup(self, scopes, name):
        for s in reversed(scopes):
            if name in s:
                return s[name]
        return None

    def block(self, stmts, scopes) -> tuple:
        scopes = scopes + [{}]
        return tuple(self.stmt(s, scopes) for s in stmts)

    def stmt(self, s, scopes):
        if isinstance(s, ast.Let):
            value = self.expr(s.value, scopes)
            if self.lookup(scopes, s.name) is not None:
                self.err(s.pos, f"variable {s.name!r} is already declared")
            self.expect(value, s.decl, s.pos)
            scopes[-1][s.name] = s.decl
            return replace(s, value=value)
        if isinstance(s, ast.Assign):
            value = self.expr(s.value, scopes)
            ty = self.lookup(scopes, s.name)
            if ty is None:
                self.err(s.pos, f"assignment to undeclared variable {s.name!r}")
            else:
                self.expect(value, ty, s.pos)
            return replace(s, value=value)
        if isinstance(s, ast.If):
            cond = self.cond(s.cond, scopes)
            return replace(
                s, cond=cond, then=self.block(s.then, scopes), orelse=self.block(s.orelse, scopes)
            )
        if isinstance(s, ast.While):
            cond = self.cond(s.cond, scopes)
            return replace(s, cond=cond, body=self.block(s.body, scopes))
        if isinstance(s, ast.Assert):
            return replace(s, cond=self.cond(s.cond, scopes))
        if isinstance(s, ast.ErrorStmt):
            return s
        if isinstance(s, ast.Return):
            ret = self.fn.ret
            if s.value is None:
                if ret != ast.VOID:
                    self.err(s.pos, f"expected {ret} return value")
                return s
            value = self.expr(s.value, scopes)
            if ret == ast.VOID:
                self.err(s.pos, "void function cannot return a value")
            else:
                self.expect(value, ret, s.pos)
            return replace(s, value=value)
        if isinstance(s, ast.ExprStmt):
            return replace(s, expr=self.expr(s.expr, scopes, allow_void=True))
        raise AssertionError(s)

    def expect(self, e, ty, pos):
        if e.ty is not None and e.ty != ty:
            self.err(pos, f"expected {ty}, got {e.ty}")

    def cond(self, e, scopes):
        e = self.expr(e, scopes)
        if e.ty is not None and e.ty != ast.BOOL:
            self.err(e.pos, f"condition must be bool, got {e.ty}")
        return e

    def expr(self, e, scopes, allow_void=False):
        if isinstance(e, ast.IntLit):
            return replace(e, ty=ast.INT)
        if isinstance(e, ast.BoolLit):
            return replace(e, ty=ast.BOOL)
        if isinstance(e, ast.StrLit):
            return replace(e, ty=ast.STR)
        if isinstance(e, ast.Var):
            ty = self.lookup(scopes, e.name)
            if ty is None:
                self.err(e.pos, f"use of undeclared variable {e.name!r}")
            return replace(e, ty=ty)
        if isinstance(e, ast.Unary):
            operand = self.expr(e.operand, scopes)
            want = ast.INT if e.op == "-" else ast.BOOL
            self.expect(operand, want, e.pos)
            return replace(e, operand=operand, ty=want)
        if isinstance(e, ast.Binary):
            left = self.expr(e.left, scopes)
            right = self.expr(e.right, scopes)
            if e.op in _ARITH or e.op in _ORDER:
                self.expect(left, ast.INT, left.pos)
                self.expect(right, ast.INT, right.pos)
                ty = ast.INT if e.op in _ARITH else ast.BOOL
            elif e.op in _LOGIC:
                self.expect(left, ast.BOOL, left.pos)
                self.expect(right, ast.BOOL, right.pos)
                ty = ast.BOOL
            else:
                if left.ty is not None and right.ty is not None and left.ty != right.ty:
                    self.err(e.pos, f"cannot compare {left.ty} with {right.ty}")
                ty = ast.BOOL
            return replace(e, left=left, right=right, ty=ty)
        if isinstance(e, ast.Call):
            args = tuple(self.expr(a, scopes) for a in e.args)
            if e.name in BUILTINS:
                params, ret = BUILTINS[e.name]
            elif e.name in self.sigs:
                params, ret = self.sigs[e.name]
                self.calls.setdefault(self.fn.name, set()).add(e.name)
            else:
                self.err(e.pos, f"call to undefined function {e.name!r}")
                return replace(e, args=args)
            if len(args) != len(params):
                self.err(e.pos, f"{e.name} expects {len(params)} arguments, got {len(args)}")
            for a, p in zip(args, params):
                self.expect(a, p, a.pos)
            if ret == ast.VOID and not allow_void:
                self.err(e.pos, f"void function {e.name!r} used as a value")
            return replace(e, args=args, ty=ret)
        raise AssertionError(e)


def typecheck(program: ast.Program) -> ast.Program:
    """Return a fully typed copy of ``program`` or raise :class:`TypeErrors`."""
    return _Checker(program).run()


def branch_inventory(program: ast.Program) -> list:
    return list(program.branch_sites)
