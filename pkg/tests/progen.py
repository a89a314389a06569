"""Random well-typed MiniLang programs and inputs for property tests."""

from __future__ import annotations

import random
import string
from typing import List, Tuple

PARAM_TYPES = ("int", "int", "int", "bool", "str")
ALPHABET = "abcxyz AZ09"


class ProgramGen:
    def __init__(self, rng: random.Random, max_depth: int = 3, loops: bool = True, helper: bool = True):
        self.rng = rng
        self.max_depth = max_depth
        self.loops = loops
        self.helper = helper
        self.counter = 0
        self.scopes: List[dict] = []
        self.helper_sig = None

    def fresh(self, prefix: str) -> str:
        self.counter += 1
        return f"{prefix}{self.counter}"

    def vars_of(self, ty: str) -> List[str]:
        return [n for s in self.scopes for n, t in s.items() if t == ty]

    # ---- expressions
    def int_expr(self, depth: int = 0) -> str:
        r = self.rng
        names = self.vars_of("int")
        strs = self.vars_of("str")
        choice = r.random()
        if depth >= 2 or choice < 0.3:
            if names and r.random() < 0.7:
                return r.choice(names)
            return str(r.randint(-20, 20))
        if choice < 0.75:
            op = r.choice("+-*/%" if depth == 0 else "+-*")
            return f"({self.int_expr(depth + 1)} {op} {self.int_expr(depth + 1)})"
        if choice < 0.82:
            return f"-{self.int_expr(depth + 1)}"
        if strs and choice < 0.9:
            return f"len({r.choice(strs)})"
        if strs and choice < 0.96:
            return f"charAt({r.choice(strs)}, {self.int_expr(depth + 1)})"
        if self.helper_sig and depth == 0:
            return f"{self.helper_sig}({self.int_expr(depth + 1)})"
        return str(r.randint(-5, 5))

    def bool_expr(self, depth: int = 0) -> str:
        r = self.rng
        choice = r.random()
        bools = self.vars_of("bool")
        strs = self.vars_of("str")
        if depth < 2 and choice < 0.2:
            op = r.choice(("&&", "||"))
            return f"({self.bool_expr(depth + 1)} {op} {self.bool_expr(depth + 1)})"
        if depth < 2 and choice < 0.27:
            return f"!({self.bool_expr(depth + 1)})"
        if bools and choice < 0.35:
            return r.choice(bools)
        if strs and choice < 0.45:
            lit = "".join(r.choice(ALPHABET) for _ in range(r.randint(0, 3)))
            op = r.choice(("==", "!="))
            other = f'"{lit}"' if r.random() < 0.7 else r.choice(strs)
            return f"{r.choice(strs)} {op} {other}"
        if choice < 0.47:
            return r.choice(("true", "false"))
        op = r.choice(("==", "!=", "<", "<=", ">", ">="))
        return f"{self.int_expr(1)} {op} {self.int_expr(1)}"

    def expr_of(self, ty: str) -> str:
        if ty == "int":
            return self.int_expr()
        if ty == "bool":
            return self.bool_expr()
        names = self.vars_of("str")
        if names and self.rng.random() < 0.6:
            return self.rng.choice(names)
        return '"' + "".join(self.rng.choice(ALPHABET) for _ in range(self.rng.randint(0, 4))) + '"'

    # ---- statements
    def block(self, depth: int, n: int, ind: str) -> List[str]:
        self.scopes.append({})
        out = []
        for _ in range(n):
            out.extend(self.stmt(depth, ind))
        self.scopes.pop()
        return out

    def stmt(self, depth: int, ind: str) -> List[str]:
        r = self.rng
        c = r.random()
        mutable = [n for s in self.scopes[1:] for n in s if not n.startswith("i")]
        if c < 0.25:
            ty = r.choice(("int", "int", "bool", "str"))
            name = self.fresh("v")
            line = f"{ind}let {name}: {ty} = {self.expr_of(ty)};"
            self.scopes[-1][name] = ty
            return [line]
        if c < 0.35 and mutable:
            name = r.choice(mutable)
            ty = next(s[name] for s in self.scopes if name in s)
            return [f"{ind}{name} = {self.expr_of(ty)};"]
        if c < 0.65 and depth < self.max_depth:
            lines = [f"{ind}if ({self.bool_expr()}) {{"]
            lines += self.block(depth + 1, r.randint(1, 3), ind + "  ")
            if r.random() < 0.5:
                lines.append(f"{ind}}} else {{")
                lines += self.block(depth + 1, r.randint(1, 2), ind + "  ")
            lines.append(f"{ind}}}")
            return lines
        if c < 0.72 and depth < self.max_depth and self.loops:
            i = self.fresh("i")
            lines = [f"{ind}let {i}: int = 0;"]
            self.scopes[-1][i] = "int"
            lines.append(f"{ind}while ({i} < {self.int_expr(1)} && {i} < {r.randint(1, 4)}) {{")
            lines += self.block(depth + 1, r.randint(1, 2), ind + "  ")
            lines.append(f"{ind}  {i} = {i} + 1;")
            lines.append(f"{ind}}}")
            return lines
        if c < 0.8:
            return [f"{ind}assert({self.bool_expr()});"]
        if c < 0.85:
            return [f'{ind}error("{self.fresh("L")}");']
        if c < 0.88 and depth > 0:
            return [f"{ind}return;"]
        ty = r.choice(("int", "bool"))
        name = self.fresh("w")
        line = f"{ind}let {name}: {ty} = {self.expr_of(ty)};"
        self.scopes[-1][name] = ty
        return [line]

    def program(self) -> Tuple[str, List[Tuple[str, str]]]:
        r = self.rng
        k = r.randint(1, 4)
        params = [(f"p{j}", r.choice(PARAM_TYPES)) for j in range(k)]
        lines = []
        if self.helper and r.random() < 0.3:
            self.scopes = [{"x": "int"}]
            body = f"x * 2 + {r.randint(-3, 3)}"
            lines += ["fn h(x: int) -> int {"]
            if r.random() < 0.5:
                lines += [f"  if (x > {r.randint(-5, 5)}) {{", "    return x - 1;", "  }"]
            lines += [f"  return {body};", "}"]
            self.helper_sig = "h"
        self.scopes = [dict(params)]
        sig = ", ".join(f"{n}: {t}" for n, t in params)
        lines.append(f"fn main({sig}) {{")
        self.scopes.append({})
        for _ in range(r.randint(2, 6)):
            lines += self.stmt(0, "  ")
        self.scopes.pop()
        lines.append("}")
        return "\n".join(lines) + "\n", params


def random_program(rng: random.Random, **kw) -> Tuple[str, list]:
    return ProgramGen(rng, **kw).program()


def random_input(rng: random.Random, params, lo: int = -30, hi: int = 30, str_max: int = 8) -> dict:
    out = {}
    for name, ty in params:
        if ty == "int":
            out[name] = rng.randint(lo, hi)
        elif ty == "bool":
            out[name] = rng.random() < 0.5
        else:
            pool = ALPHABET + string.ascii_lowercase[:4]
            out[name] = "".join(rng.choice(pool) for _ in range(rng.randint(0, str_max)))
    return out
