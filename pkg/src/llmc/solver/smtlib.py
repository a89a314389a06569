"""SMT-LIB2 export (QF_NIA).

Strings use the same fixed-width encoding as the built-in solver: ``s__len``
plus one integer code point per position, padded with 32 past the length.
"""

from __future__ import annotations

from .. import symbolic as S

PAD = 32
CHAR_LO, CHAR_HI = 32, 126

_RESERVED = {
    "abs", "and", "assert", "distinct", "div", "exists", "false", "forall",
    "ite", "let", "mod", "not", "or", "true", "xor", "Int", "Bool",
}


def sym_name(name: str) -> str:
    return f"|{name}|" if name in _RESERVED else name


def len_name(name: str) -> str:
    return f"{name}__len"


def char_name(name: str, i: int) -> str:
    return f"{name}__c{i}"


def _int(v: int) -> str:
    return str(v) if v >= 0 else f"(- {-v})"


def _conj(items) -> str:
    items = list(items)
    if not items:
        return "true"
    if len(items) == 1:
        return items[0]
    return f"(and {' '.join(items)})"


def _tdiv(x: str, y: str) -> str:
    q = f"(div (abs {x}) (abs {y}))"
    return f"(ite (= {y} 0) 0 (ite (= (< {x} 0) (< {y} 0)) {q} (- {q})))"


def expr_to_smtlib(e: S.SymExpr, str_max: int = 8) -> str:
    k = e.kind
    if k == S.VAR:
        if e.type == "str":
            raise ValueError("bare string variable has no SMT-LIB term")
        return sym_name(e.value)
    if k == S.INT:
        return _int(e.value)
    if k == S.BOOL:
        return "true" if e.value else "false"
    if k in (S.ADD, S.SUB, S.MUL):
        op = {S.ADD: "+", S.SUB: "-", S.MUL: "*"}[k]
        return f"({op} {expr_to_smtlib(e.args[0], str_max)} {expr_to_smtlib(e.args[1], str_max)})"
    if k == S.DIV:
        return _tdiv(expr_to_smtlib(e.args[0], str_max), expr_to_smtlib(e.args[1], str_max))
    if k == S.MOD:
        x = expr_to_smtlib(e.args[0], str_max)
        y = expr_to_smtlib(e.args[1], str_max)
        return f"(ite (= {y} 0) 0 (- {x} (* {y} {_tdiv(x, y)})))"
    if k == S.CMP:
        x = expr_to_smtlib(e.args[0], str_max)
        y = expr_to_smtlib(e.args[1], str_max)
        if e.value == "==":
            return f"(= {x} {y})"
        if e.value == "!=":
            return f"(not (= {x} {y}))"
        return f"({e.value} {x} {y})"
    if k == S.AND:
        return f"(and {expr_to_smtlib(e.args[0], str_max)} {expr_to_smtlib(e.args[1], str_max)})"
    if k == S.OR:
        return f"(or {expr_to_smtlib(e.args[0], str_max)} {expr_to_smtlib(e.args[1], str_max)})"
    if k == S.NOT:
        return f"(not {expr_to_smtlib(e.args[0], str_max)})"
    if k == S.STREQ:
        return _streq(e.args[0], e.args[1], str_max)
    if k == S.STRLEN:
        return len_name(e.args[0].value)
    if k == S.CHARAT:
        return _charat(e.args[0], e.args[1], str_max)
    raise ValueError(k)


def _streq(a, b, str_max):
    if a.kind == S.STR:
        a, b = b, a
    if b.kind == S.VAR:
        items = [f"(= {len_name(a.value)} {len_name(b.value)})"]
        items += [f"(= {char_name(a.value, i)} {char_name(b.value, i)})" for i in range(str_max)]
        return _conj(items)
    lit = b.value
    if len(lit) > str_max or any(not CHAR_LO <= ord(c) <= CHAR_HI for c in lit):
        return "false"
    items = [f"(= {len_name(a.value)} {len(lit)})"]
    items += [f"(= {char_name(a.value, i)} {ord(c)})" for i, c in enumerate(lit)]
    return _conj(items)


def _charat(s, idx, str_max):
    i = expr_to_smtlib(idx, str_max)
    if s.kind == S.STR:
        out = "(- 1)"
        for pos in range(len(s.value) - 1, -1, -1):
            out = f"(ite (= {i} {pos}) {ord(s.value[pos])} {out})"
        return out
    out = "(- 1)"
    n = len_name(s.value)
    for pos in range(str_max - 1, -1, -1):
        out = f"(ite (and (= {i} {pos}) (< {pos} {n})) {char_name(s.value, pos)} {out})"
    return out


def declarations(variables, domains) -> list:
    lines = []
    for name, ty in variables:
        if ty == "int":
            lo, hi = domains.int_bounds(name)
            n = sym_name(name)
            lines.append(f"(declare-const {n} Int)")
            lines.append(f"(assert (and (<= {_int(lo)} {n}) (<= {n} {_int(hi)})))")
        elif ty == "bool":
            lines.append(f"(declare-const {sym_name(name)} Bool)")
        else:
            L = domains.str_max
            ln = len_name(name)
            lines.append(f"(declare-const {ln} Int)")
            lines.append(f"(assert (and (<= 0 {ln}) (<= {ln} {L})))")
            for i in range(L):
                cn = char_name(name, i)
                lines.append(f"(declare-const {cn} Int)")
                lines.append(f"(assert (and (<= {CHAR_LO} {cn}) (<= {cn} {CHAR_HI})))")
                lines.append(f"(assert (or (< {i} {ln}) (= {cn} {PAD})))")
    return lines


def to_smtlib(query) -> str:
    lines = ["(set-logic QF_NIA)"]
    lines += declarations(query.variables, query.domains)
    for c in query.constraints:
        lines.append(f"(assert {expr_to_smtlib(c, query.domains.str_max)})")
    lines.append("(check-sat)")
    lines.append("(get-model)")
    return "\n".join(lines) + "\n"
