"""Static facts about a program used to build guidance requests."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Tuple

from ..lang import ast

_FLIP = {"<": ">", "<=": ">=", ">": "<", ">=": "<=", "==": "==", "!=": "!="}


def _int_lit(e):
    if isinstance(e, ast.IntLit):
        return e.value
    if isinstance(e, ast.Unary) and e.op == "-" and isinstance(e.operand, ast.IntLit):
        return -e.operand.value
    return None


def _exprs_of(stmt):
    if isinstance(stmt, (ast.Let, ast.Assign)):
        return [stmt.value]
    if isinstance(stmt, (ast.If, ast.While, ast.Assert)):
        return [stmt.cond]
    if isinstance(stmt, ast.Return):
        return [stmt.value] if stmt.value is not None else []
    if isinstance(stmt, ast.ExprStmt):
        return [stmt.expr]
    return []


def _children(stmt):
    if isinstance(stmt, ast.If):
        return list(stmt.then) + list(stmt.orelse)
    if isinstance(stmt, ast.While):
        return list(stmt.body)
    return []


def _walk_expr(e):
    yield e
    if isinstance(e, ast.Unary):
        yield from _walk_expr(e.operand)
    elif isinstance(e, ast.Binary):
        yield from _walk_expr(e.left)
        yield from _walk_expr(e.right)
    elif isinstance(e, ast.Call):
        for a in e.args:
            yield from _walk_expr(a)


def _walk_stmts(stmts):
    for s in stmts:
        yield s
        yield from _walk_stmts(_children(s))


@dataclass(frozen=True)
class StaticInfo:
    # (site, direction) -> every site (real or synthetic) reachable inside that arm
    arms: Dict[Tuple[int, bool], FrozenSet[int]]
    site_pos: Dict[int, tuple]
    all_sites: FrozenSet[int]
    int_constants: List[dict]
    str_constants: List[str]

    def uncovered_behind(self, site: int, direction: bool, observed) -> int:
        n = 0 if (site, direction) in observed else 1
        for t in self.arms.get((site, direction), ()):
            n += ((t, True) not in observed) + ((t, False) not in observed)
        return n


def _live_guard(x) -> bool:
    # a literal divisor is never symbolic, so its guard can never emit an event
    return isinstance(x, ast.Binary) and x.guard is not None and _int_lit(x.right) is None


def _sites_in_expr(e, fn_sites, out):
    for x in _walk_expr(e):
        if _live_guard(x):
            out.add(x.guard)
        elif isinstance(x, ast.Call) and x.name in fn_sites:
            out |= fn_sites[x.name]


def analyze(program: ast.Program) -> StaticInfo:
    fns = {f.name: f for f in program.functions}
    # sites of each function including callees; no recursion so a fixpoint is cheap
    direct = {}
    calls = {}
    for f in program.functions:
        sites, callees = set(), set()
        for s in _walk_stmts(f.body):
            if isinstance(s, (ast.If, ast.While, ast.Assert)):
                sites.add(s.site)
            for e in _exprs_of(s):
                for x in _walk_expr(e):
                    if _live_guard(x):
                        sites.add(x.guard)
                    elif isinstance(x, ast.Call) and x.name in fns:
                        callees.add(x.name)
        direct[f.name], calls[f.name] = sites, callees
    fn_sites = {n: set(s) for n, s in direct.items()}
    changed = True
    while changed:
        changed = False
        for n in fn_sites:
            for c in calls[n]:
                if not fn_sites[c] <= fn_sites[n]:
                    fn_sites[n] |= fn_sites[c]
                    changed = True

    def block_sites(stmts):
        out = set()
        for s in _walk_stmts(stmts):
            if isinstance(s, (ast.If, ast.While, ast.Assert)):
                out.add(s.site)
            for e in _exprs_of(s):
                _sites_in_expr(e, fn_sites, out)
        return frozenset(out)

    arms, pos = {}, {}
    all_sites = set()
    int_consts, str_consts = [], []
    for f in program.functions:
        for s in _walk_stmts(f.body):
            if isinstance(s, ast.If):
                arms[(s.site, True)] = block_sites(s.then)
                arms[(s.site, False)] = block_sites(s.orelse)
            elif isinstance(s, ast.While):
                arms[(s.site, True)] = block_sites(s.body)
                arms[(s.site, False)] = frozenset()
            if isinstance(s, (ast.If, ast.While, ast.Assert)):
                pos[s.site] = s.pos
                all_sites.add(s.site)
            for e in _exprs_of(s):
                for x in _walk_expr(e):
                    if _live_guard(x):
                        pos[x.guard] = x.pos
                        all_sites.add(x.guard)
                    _harvest(x, int_consts, str_consts)
    return StaticInfo(arms, pos, frozenset(all_sites), _dedupe(int_consts), list(dict.fromkeys(str_consts)))


def _harvest(x, ints, strs):
    if isinstance(x, ast.StrLit):
        strs.append(x.value)
    elif isinstance(x, ast.Binary):
        lv, rv = _int_lit(x.left), _int_lit(x.right)
        if x.op in _FLIP and (lv is None) != (rv is None):
            if rv is not None:
                ints.append({"value": rv, "relation": x.op})
            else:
                ints.append({"value": lv, "relation": _FLIP[x.op]})
        else:
            for v in (lv, rv):
                if v is not None:
                    ints.append({"value": v, "relation": None})
    elif isinstance(x, ast.Call):
        for a in x.args:
            v = _int_lit(a)
            if v is not None:
                ints.append({"value": v, "relation": None})


def _dedupe(items):
    seen, out = set(), []
    for it in items:
        key = (it["value"], it["relation"])
        if key not in seen:
            seen.add(key)
            out.append(it)
    return out


def code_context(program: ast.Program, line: int, radius: int = 3) -> str:
    lines = program.source_text.splitlines()
    if not lines or line <= 0:
        return ""
    lo, hi = max(1, line - radius), min(len(lines), line + radius)
    return "\n".join(f"{n:4d}  {lines[n - 1]}" for n in range(lo, hi + 1))
