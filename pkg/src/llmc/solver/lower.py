"""Lowering of symbolic constraints to a flat integer node program.

Booleans become 0/1 integers. A string parameter ``s`` with maximum length
``L`` becomes ``L + 1`` integer variables: ``s#len`` in ``[0, L]`` and
``s#0 .. s#(L-1)`` over the printable alphabet, with positions past the
length pinned to the lowest code point so every string has one encoding.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .. import symbolic as S
from ._pykernel import (
    OP_ADD, OP_AND, OP_CONST, OP_DIV, OP_EQ, OP_ITE, OP_LE, OP_LT, OP_MOD,
    OP_MUL, OP_NE, OP_NOT, OP_OR, OP_SUB, OP_VAR,
)

PAD = 32
CHAR_LO, CHAR_HI = 32, 126
# node bounds beyond this go to the exact-integer Python kernel
SAFE_MAGNITUDE = 1 << 60


class Unsupported(Exception):
    pass


@dataclass
class NodeProgram:
    ops: list = field(default_factory=list)
    a: list = field(default_factory=list)
    b: list = field(default_factory=list)
    c: list = field(default_factory=list)
    val: list = field(default_factory=list)
    roots: list = field(default_factory=list)
    # per lowered variable
    names: list = field(default_factory=list)
    lo: list = field(default_factory=list)
    hi: list = field(default_factory=list)
    mid: list = field(default_factory=list)
    asc: list = field(default_factory=list)
    exact_only: bool = False

    @property
    def nvars(self) -> int:
        return len(self.names)


class _Builder:
    def __init__(self, prog: NodeProgram):
        self.p = prog
        self.memo = {}

    def node(self, op, a=0, b=0, c=0, val=0) -> int:
        key = (op, a, b, c, val)
        k = self.memo.get(key)
        if k is None:
            p = self.p
            k = len(p.ops)
            p.ops.append(op)
            p.a.append(a)
            p.b.append(b)
            p.c.append(c)
            p.val.append(val)
            self.memo[key] = k
        return k

    def const(self, v: int) -> int:
        return self.node(OP_CONST, val=int(v))

    def conj(self, items) -> int:
        acc = None
        for it in items:
            acc = it if acc is None else self.node(OP_AND, acc, it)
        return self.const(1) if acc is None else acc


def midpoint(lo: int, hi: int) -> int:
    return -((-(lo + hi)) // 2)


@dataclass
class Lowered:
    program: NodeProgram
    layout: dict  # param name -> ("int"|"bool", idx) or ("str", len_idx, [char idxs])


def lower(constraints, variables, domains) -> Lowered:
    """Build the node program for a conjunction of boolean ``SymExpr``."""
    prog = NodeProgram()
    bld = _Builder(prog)
    layout = {}
    var_nodes = {}

    def new_var(name, lo, hi, asc):
        idx = len(prog.names)
        prog.names.append(name)
        prog.lo.append(lo)
        prog.hi.append(hi)
        prog.mid.append(midpoint(lo, hi))
        prog.asc.append(1 if asc else 0)
        var_nodes[idx] = bld.node(OP_VAR, val=idx)
        return idx

    for name, ty in variables:
        if ty == "int":
            lo, hi = domains.int_bounds(name)
            layout[name] = ("int", new_var(name, lo, hi, False))
        elif ty == "bool":
            layout[name] = ("bool", new_var(name, 0, 1, True))
        else:
            L = domains.str_max
            n = new_var(f"{name}#len", 0, L, True)
            chars = [new_var(f"{name}#{i}", CHAR_LO, CHAR_HI, True) for i in range(L)]
            layout[name] = ("str", n, chars)
            for i, ci in enumerate(chars):
                # canonical padding: position i is either inside the string or PAD
                prog.roots.append(
                    bld.node(
                        OP_OR,
                        bld.node(OP_LT, bld.const(i), var_nodes[n]),
                        bld.node(OP_EQ, var_nodes[ci], bld.const(PAD)),
                    )
                )

    memo = {}

    def str_parts(e):
        if e.kind == S.STR:
            return ("const", e.value)
        if e.kind == S.VAR:
            _, n, chars = layout[e.value]
            return ("var", var_nodes[n], [var_nodes[c] for c in chars])
        raise Unsupported(f"string expression {e.kind}")

    def go(e) -> int:
        r = memo.get(e)
        if r is not None:
            return r
        k = e.kind
        if k == S.INT:
            r = bld.const(e.value)
        elif k == S.BOOL:
            r = bld.const(1 if e.value else 0)
        elif k == S.VAR:
            if e.type == "str":
                raise Unsupported("bare string variable")
            r = var_nodes[layout[e.value][1]]
        elif k in (S.ADD, S.SUB, S.MUL, S.DIV, S.MOD):
            op = {S.ADD: OP_ADD, S.SUB: OP_SUB, S.MUL: OP_MUL, S.DIV: OP_DIV, S.MOD: OP_MOD}[k]
            r = bld.node(op, go(e.args[0]), go(e.args[1]))
        elif k == S.CMP:
            x, y = go(e.args[0]), go(e.args[1])
            op = e.value
            if op == "==":
                r = bld.node(OP_EQ, x, y)
            elif op == "!=":
                r = bld.node(OP_NE, x, y)
            elif op == "<":
                r = bld.node(OP_LT, x, y)
            elif op == "<=":
                r = bld.node(OP_LE, x, y)
            elif op == ">":
                r = bld.node(OP_LT, y, x)
            else:
                r = bld.node(OP_LE, y, x)
        elif k == S.AND:
            r = bld.node(OP_AND, go(e.args[0]), go(e.args[1]))
        elif k == S.OR:
            r = bld.node(OP_OR, go(e.args[0]), go(e.args[1]))
        elif k == S.NOT:
            r = bld.node(OP_NOT, go(e.args[0]))
        elif k == S.STREQ:
            r = streq(str_parts(e.args[0]), str_parts(e.args[1]))
        elif k == S.STRLEN:
            r = str_parts(e.args[0])[1]
        elif k == S.CHARAT:
            r = charat(str_parts(e.args[0]), e.args[1])
        else:
            raise Unsupported(k)
        memo[e] = r
        return r

    def streq(p, q):
        if p[0] == "const":
            p, q = q, p
        if q[0] == "var":
            items = [bld.node(OP_EQ, p[1], q[1])]
            items += [bld.node(OP_EQ, x, y) for x, y in zip(p[2], q[2])]
            return bld.conj(items)
        lit = q[1]
        if len(lit) > domains.str_max or any(not CHAR_LO <= ord(ch) <= CHAR_HI for ch in lit):
            return bld.const(0)
        items = [bld.node(OP_EQ, p[1], bld.const(len(lit)))]
        items += [bld.node(OP_EQ, p[2][i], bld.const(ord(ch))) for i, ch in enumerate(lit)]
        return bld.conj(items)

    def charat(p, idx):
        if p[0] == "const":
            lit = p[1]
            i = go(idx)
            r = bld.const(-1)
            for pos in range(len(lit) - 1, -1, -1):
                r = bld.node(OP_ITE, bld.node(OP_EQ, i, bld.const(pos)), bld.const(ord(lit[pos])), r)
            return r
        length, chars = p[1], p[2]
        if idx.kind == S.INT:
            pos = idx.value
            if 0 <= pos < len(chars):
                return bld.node(OP_ITE, bld.node(OP_LT, bld.const(pos), length), chars[pos], bld.const(-1))
            return bld.const(-1)
        i = go(idx)
        r = bld.const(-1)
        for pos in range(len(chars) - 1, -1, -1):
            hit = bld.node(
                OP_AND,
                bld.node(OP_EQ, i, bld.const(pos)),
                bld.node(OP_LT, bld.const(pos), length),
            )
            r = bld.node(OP_ITE, hit, chars[pos], r)
        return r

    seen_roots = set(prog.roots)
    for ce in constraints:
        root = go(ce)
        if root not in seen_roots:
            seen_roots.add(root)
            prog.roots.append(root)
    prog.exact_only = _needs_exact(prog)
    return Lowered(prog, layout)


def _needs_exact(prog: NodeProgram) -> bool:
    from ._pykernel import forward

    n = len(prog.ops)
    nlo, nhi = [0] * n, [0] * n
    forward(prog, list(prog.lo), list(prog.hi), nlo, nhi)
    return any(abs(v) >= SAFE_MAGNITUDE for v in nlo) or any(abs(v) >= SAFE_MAGNITUDE for v in nhi)


def decode(lowered: Lowered, values) -> dict:
    out = {}
    for name, spec in lowered.layout.items():
        if spec[0] == "int":
            out[name] = values[spec[1]]
        elif spec[0] == "bool":
            out[name] = bool(values[spec[1]])
        else:
            n = values[spec[1]]
            out[name] = "".join(chr(values[c]) for c in spec[2][:n])
    return out
