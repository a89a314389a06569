"""Symbolic expressions over the entry parameters.

A :class:`SymExpr` is an immutable, hash-consed-by-value tree. Smart
constructors fold constants so an expression without free variables always
collapses to a literal node.
"""

from __future__ import annotations

from typing import Dict, Iterable, Optional

# node kinds
VAR = "var"
INT = "int"
BOOL = "bool"
STR = "str"
ADD, SUB, MUL, DIV, MOD = "add", "sub", "mul", "div", "mod"
CMP = "cmp"  # value holds the operator: == != < <= > >=
AND, OR, NOT = "and", "or", "not"
STREQ, STRLEN, CHARAT = "streq", "strlen", "charat"

_CONST_KINDS = (INT, BOOL, STR)
_ARITH = {ADD: "+", SUB: "-", MUL: "*", DIV: "/", MOD: "%"}


# ---- concrete semantics shared by the interpreter and model checking ----

def int_div(a: int, b: int) -> int:
    """Truncating division; ``x / 0`` is 0 (the interpreter traps before that)."""
    if b == 0:
        return 0
    q = abs(a) // abs(b)
    return q if (a < 0) == (b < 0) else -q


def int_mod(a: int, b: int) -> int:
    """Remainder with the sign of the dividend; ``x % 0`` is 0."""
    if b == 0:
        return 0
    return a - b * int_div(a, b)


def char_at(s: str, i: int) -> int:
    """Code point at ``i``, or -1 when out of range."""
    if 0 <= i < len(s):
        return ord(s[i])
    return -1


def compare(op: str, a, b) -> bool:
    if op == "==":
        return a == b
    if op == "!=":
        return a != b
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == ">":
        return a > b
    if op == ">=":
        return a >= b
    raise ValueError(op)


class SymExpr:
    __slots__ = ("kind", "args", "value", "type", "_hash", "_vars", "_nonlinear")

    def __init__(self, kind: str, args: tuple = (), value=None, type: str = "int"):
        self.kind = kind
        self.args = args
        self.value = value
        self.type = type
        self._hash = hash((kind, args, value, type))
        self._vars = None
        self._nonlinear = None

    def __hash__(self):
        return self._hash

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, SymExpr) or self._hash != other._hash:
            return False
        return (
            self.kind == other.kind
            and self.value == other.value
            and self.type == other.type
            and self.args == other.args
        )

    def __repr__(self):
        return f"SymExpr({self.to_infix()})"

    @property
    def is_const(self) -> bool:
        return self.kind in _CONST_KINDS

    def variables(self) -> frozenset:
        """Names of free parameters, as a frozenset."""
        if self._vars is None:
            if self.kind == VAR:
                self._vars = frozenset((self.value,))
            else:
                acc = frozenset()
                for a in self.args:
                    acc |= a.variables()
                self._vars = acc
        return self._vars

    def free_vars(self) -> Dict[str, str]:
        out = {}
        stack = [self]
        while stack:
            e = stack.pop()
            if e.kind == VAR:
                out[e.value] = e.type
            stack.extend(e.args)
        return out

    @property
    def nonlinear(self) -> bool:
        """True if some Mul/Div/Mod has two non-constant operands."""
        if self._nonlinear is None:
            flag = False
            if self.kind in (MUL, DIV, MOD):
                flag = not self.args[0].is_const and not self.args[1].is_const
            self._nonlinear = flag or any(a.nonlinear for a in self.args)
        return self._nonlinear

    def to_infix(self) -> str:
        k = self.kind
        if k == VAR:
            return self.value
        if k == INT:
            return str(self.value)
        if k == BOOL:
            return "true" if self.value else "false"
        if k == STR:
            return repr(self.value)
        if k in _ARITH:
            return f"({self.args[0].to_infix()} {_ARITH[k]} {self.args[1].to_infix()})"
        if k == CMP:
            return f"({self.args[0].to_infix()} {self.value} {self.args[1].to_infix()})"
        if k == AND:
            return f"({self.args[0].to_infix()} && {self.args[1].to_infix()})"
        if k == OR:
            return f"({self.args[0].to_infix()} || {self.args[1].to_infix()})"
        if k == NOT:
            return f"!{self.args[0].to_infix()}"
        if k == STREQ:
            return f"({self.args[0].to_infix()} == {self.args[1].to_infix()})"
        if k == STRLEN:
            return f"len({self.args[0].to_infix()})"
        if k == CHARAT:
            return f"charAt({self.args[0].to_infix()}, {self.args[1].to_infix()})"
        raise ValueError(k)


# ---- constructors ----

def var(name: str, ty: str) -> SymExpr:
    return SymExpr(VAR, (), name, ty)


def const_int(v: int) -> SymExpr:
    return SymExpr(INT, (), int(v), "int")


def const_bool(v: bool) -> SymExpr:
    return SymExpr(BOOL, (), bool(v), "bool")


def const_str(v: str) -> SymExpr:
    return SymExpr(STR, (), v, "str")


TRUE = const_bool(True)
FALSE = const_bool(False)


def const(value) -> SymExpr:
    if isinstance(value, bool):
        return const_bool(value)
    if isinstance(value, int):
        return const_int(value)
    return const_str(value)


def arith(kind: str, a: SymExpr, b: SymExpr) -> SymExpr:
    if a.is_const and b.is_const:
        x, y = a.value, b.value
        if kind == ADD:
            return const_int(x + y)
        if kind == SUB:
            return const_int(x - y)
        if kind == MUL:
            return const_int(x * y)
        if kind == DIV:
            return const_int(int_div(x, y))
        return const_int(int_mod(x, y))
    return SymExpr(kind, (a, b), None, "int")


def cmp(op: str, a: SymExpr, b: SymExpr) -> SymExpr:
    if a.type == "str":
        e = streq(a, b)
        if op == "==":
            return e
        return not_(e)
    if a.is_const and b.is_const:
        return const_bool(compare(op, a.value, b.value))
    return SymExpr(CMP, (a, b), op, "bool")


def and_(a: SymExpr, b: SymExpr) -> SymExpr:
    if a.is_const:
        return b if a.value else FALSE
    if b.is_const:
        return a if b.value else FALSE
    return SymExpr(AND, (a, b), None, "bool")


def or_(a: SymExpr, b: SymExpr) -> SymExpr:
    if a.is_const:
        return TRUE if a.value else b
    if b.is_const:
        return TRUE if b.value else a
    return SymExpr(OR, (a, b), None, "bool")


def not_(a: SymExpr) -> SymExpr:
    if a.is_const:
        return const_bool(not a.value)
    if a.kind == NOT:
        return a.args[0]
    return SymExpr(NOT, (a,), None, "bool")


def streq(a: SymExpr, b: SymExpr) -> SymExpr:
    if a.is_const and b.is_const:
        return const_bool(a.value == b.value)
    return SymExpr(STREQ, (a, b), None, "bool")


def strlen(a: SymExpr) -> SymExpr:
    if a.is_const:
        return const_int(len(a.value))
    return SymExpr(STRLEN, (a,), None, "int")


def charat(a: SymExpr, i: SymExpr) -> SymExpr:
    if a.is_const and i.is_const:
        return const_int(char_at(a.value, i.value))
    return SymExpr(CHARAT, (a, i), None, "int")


def substitute(e: SymExpr, env: Dict[str, SymExpr]) -> SymExpr:
    """Replace variables by expressions, re-folding constants on the way up."""
    memo = {}

    def go(x):
        r = memo.get(x)
        if r is not None:
            return r
        k = x.kind
        if k == VAR:
            r = env.get(x.value, x)
        elif k in _CONST_KINDS:
            r = x
        else:
            args = [go(a) for a in x.args]
            r = rebuild(x, args)
        memo[x] = r
        return r

    return go(e)


def rebuild(x: SymExpr, args) -> SymExpr:
    k = x.kind
    if k in _ARITH:
        return arith(k, args[0], args[1])
    if k == CMP:
        return cmp(x.value, args[0], args[1])
    if k == AND:
        return and_(args[0], args[1])
    if k == OR:
        return or_(args[0], args[1])
    if k == NOT:
        return not_(args[0])
    if k == STREQ:
        return streq(args[0], args[1])
    if k == STRLEN:
        return strlen(args[0])
    if k == CHARAT:
        return charat(args[0], args[1])
    raise ValueError(k)


def evaluate(e: SymExpr, env: Dict[str, object]):
    """Evaluate under a concrete assignment with the interpreter's semantics."""
    k = e.kind
    if k == VAR:
        return env[e.value]
    if k in _CONST_KINDS:
        return e.value
    if k == AND:
        return bool(evaluate(e.args[0], env)) and bool(evaluate(e.args[1], env))
    if k == OR:
        return bool(evaluate(e.args[0], env)) or bool(evaluate(e.args[1], env))
    if k == NOT:
        return not evaluate(e.args[0], env)
    vals = [evaluate(a, env) for a in e.args]
    if k == ADD:
        return vals[0] + vals[1]
    if k == SUB:
        return vals[0] - vals[1]
    if k == MUL:
        return vals[0] * vals[1]
    if k == DIV:
        return int_div(vals[0], vals[1])
    if k == MOD:
        return int_mod(vals[0], vals[1])
    if k == CMP:
        return compare(e.value, vals[0], vals[1])
    if k == STREQ:
        return vals[0] == vals[1]
    if k == STRLEN:
        return len(vals[0])
    if k == CHARAT:
        return char_at(vals[0], vals[1])
    raise ValueError(k)


def collect_constants(exprs: Iterable[SymExpr]) -> Optional[set]:
    out = set()
    for e in exprs:
        stack = [e]
        while stack:
            x = stack.pop()
            if x.kind in (INT, STR):
                out.add(x.value)
            stack.extend(x.args)
    return out
