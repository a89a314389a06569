"""Canonical pretty-printer. Binary expressions are fully parenthesized."""

from __future__ import annotations

import json

from . import ast

_INDENT = "    "


def _str_lit(s: str) -> str:
    # json escaping covers \" \\ \n \t, which is the escape set the lexer accepts
    return json.dumps(s, ensure_ascii=False)


def expr_to_str(e) -> str:
    if isinstance(e, ast.IntLit):
        return str(e.value)
    if isinstance(e, ast.BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, ast.StrLit):
        return _str_lit(e.value)
    if isinstance(e, ast.Var):
        return e.name
    if isinstance(e, ast.Unary):
        return f"({e.op}{expr_to_str(e.operand)})"
    if isinstance(e, ast.Binary):
        return f"({expr_to_str(e.left)} {e.op} {expr_to_str(e.right)})"
    if isinstance(e, ast.Call):
        return f"{e.name}({', '.join(expr_to_str(a) for a in e.args)})"
    raise TypeError(e)


def _block(stmts, depth, out):
    for s in stmts:
        _stmt(s, depth, out)


def _stmt(s, depth, out):
    pad = _INDENT * depth
    if isinstance(s, ast.Let):
        out.append(f"{pad}let {s.name}: {s.decl} = {expr_to_str(s.value)};")
    elif isinstance(s, ast.Assign):
        out.append(f"{pad}{s.name} = {expr_to_str(s.value)};")
    elif isinstance(s, ast.If):
        out.append(f"{pad}if ({expr_to_str(s.cond)}) {{")
        _block(s.then, depth + 1, out)
        if s.orelse:
            out.append(f"{pad}}} else {{")
            _block(s.orelse, depth + 1, out)
        out.append(f"{pad}}}")
    elif isinstance(s, ast.While):
        out.append(f"{pad}while ({expr_to_str(s.cond)}) {{")
        _block(s.body, depth + 1, out)
        out.append(f"{pad}}}")
    elif isinstance(s, ast.Assert):
        out.append(f"{pad}assert({expr_to_str(s.cond)});")
    elif isinstance(s, ast.ErrorStmt):
        out.append(f"{pad}error({_str_lit(s.label)});")
    elif isinstance(s, ast.Return):
        if s.value is None:
            out.append(f"{pad}return;")
        else:
            out.append(f"{pad}return {expr_to_str(s.value)};")
    elif isinstance(s, ast.ExprStmt):
        out.append(f"{pad}{expr_to_str(s.expr)};")
    else:
        raise TypeError(s)


def pretty(program: ast.Program) -> str:
    out = []
    for i, fn in enumerate(program.functions):
        if i:
            out.append("")
        params = ", ".join(f"{p.name}: {p.ty}" for p in fn.params)
        ret = "" if fn.ret == ast.VOID else f" -> {fn.ret}"
        out.append(f"fn {fn.name}({params}){ret} {{")
        _block(fn.body, 1, out)
        out.append("}")
    return "\n".join(out) + "\n"
