"""Apply guidance edits to a list of constraints, and describe atoms for the oracle."""

from __future__ import annotations

from typing import List, Optional

from .. import symbolic as S
from ..guidance import MutationEdit


def equality_sides(c: S.SymExpr):
    """(lhs, rhs) if ``c`` asserts an integer equality, else None."""
    if c.kind == S.CMP and c.value == "==":
        return c.args
    if c.kind == S.NOT and c.args[0].kind == S.CMP and c.args[0].value == "!=":
        return c.args[0].args
    return None


def product_vars(c: S.SymExpr, order) -> List[str]:
    """Integer variables occurring in a product/quotient of two non-constants."""
    found = set()
    stack = [c]
    while stack:
        x = stack.pop()
        if x.kind in (S.MUL, S.DIV, S.MOD) and not x.args[0].is_const and not x.args[1].is_const:
            found |= {n for n, t in x.free_vars().items() if t == "int"}
        stack.extend(x.args)
    return [n for n in order if n in found]


def atom_info(c: S.SymExpr, order) -> dict:
    return {
        "nonlinear": c.nonlinear,
        "equality": equality_sides(c) is not None,
        "product_vars": product_vars(c, order) if c.nonlinear else [],
    }


def _replace_first_int(e: S.SymExpr, value: int):
    done = [False]

    def go(x):
        if done[0]:
            return x
        if x.kind == S.INT:
            done[0] = True
            return S.const_int(value)
        if not x.args:
            return x
        return S.rebuild(x, [go(a) for a in x.args])

    out = go(e)
    return out if done[0] else None


def apply_edit(constraints: List[S.SymExpr], edit: MutationEdit) -> Optional[List[S.SymExpr]]:
    """The mutated conjunction, or None when the edit does not fit the atom."""
    i = edit.index
    if not 0 <= i < len(constraints):
        return None
    c = constraints[i]
    rest = constraints[:i] + constraints[i + 1:]
    if edit.op == "drop_atom":
        return rest
    if edit.op == "widen_eq_to_range":
        sides = equality_sides(c)
        if sides is None or sides[0].type != "int":
            return None
        diff = S.arith(S.SUB, sides[0], sides[1])
        r = edit.radius
        return rest[:i] + [S.cmp(">=", diff, S.const_int(-r)), S.cmp("<=", diff, S.const_int(r))] + rest[i:]
    if edit.op == "linearize_product":
        if edit.fix_var not in c.free_vars():
            return None
        v = S.const_int(edit.fix_value)
        fixed = S.substitute(c, {edit.fix_var: v})
        pin = S.cmp("==", S.var(edit.fix_var, "int"), v)
        return rest[:i] + [fixed] + rest[i:] + [pin]
    if edit.op == "replace_const":
        new = _replace_first_int(c, edit.new_value)
        if new is None:
            return None
        return rest[:i] + [new] + rest[i:]
    return None
