"""MiniLang syntax tree.

Nodes are frozen dataclasses. Source positions are carried in ``pos`` but are
excluded from equality so two parses of equivalent text compare equal.
Expression nodes carry a ``ty`` slot that the type checker fills in.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

INT = "int"
BOOL = "bool"
STR = "str"
VOID = "void"

SYMBOLIC_TYPES = (INT, BOOL, STR)

Pos = tuple  # (line, column), both 1-based


def _pos() -> Pos:
    return field(default=(0, 0), compare=False, repr=False)


@dataclass(frozen=True)
class IntLit:
    value: int
    pos: Pos = _pos()
    ty: Optional[str] = None


@dataclass(frozen=True)
class BoolLit:
    value: bool
    pos: Pos = _pos()
    ty: Optional[str] = None


@dataclass(frozen=True)
class StrLit:
    value: str
    pos: Pos = _pos()
    ty: Optional[str] = None


@dataclass(frozen=True)
class Var:
    name: str
    pos: Pos = _pos()
    ty: Optional[str] = None


@dataclass(frozen=True)
class Unary:
    op: str  # "-" or "!"
    operand: "Expr"
    pos: Pos = _pos()
    ty: Optional[str] = None


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    pos: Pos = _pos()
    ty: Optional[str] = None
    # synthetic site id of the divisor guard, only for "/" and "%"
    guard: Optional[int] = None


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple
    pos: Pos = _pos()
    ty: Optional[str] = None


Expr = Union[IntLit, BoolLit, StrLit, Var, Unary, Binary, Call]


@dataclass(frozen=True)
class Let:
    name: str
    decl: str
    value: Expr
    pos: Pos = _pos()


@dataclass(frozen=True)
class Assign:
    name: str
    value: Expr
    pos: Pos = _pos()


@dataclass(frozen=True)
class If:
    cond: Expr
    then: tuple
    orelse: tuple
    site: int
    pos: Pos = _pos()


@dataclass(frozen=True)
class While:
    cond: Expr
    body: tuple
    site: int
    pos: Pos = _pos()


@dataclass(frozen=True)
class Assert:
    cond: Expr
    site: int  # synthetic (negative) site id
    pos: Pos = _pos()


@dataclass(frozen=True)
class ErrorStmt:
    label: str
    pos: Pos = _pos()


@dataclass(frozen=True)
class Return:
    value: Optional[Expr]
    pos: Pos = _pos()


@dataclass(frozen=True)
class ExprStmt:
    expr: Expr
    pos: Pos = _pos()


Stmt = Union[Let, Assign, If, While, Assert, ErrorStmt, Return, ExprStmt]


@dataclass(frozen=True)
class Param:
    name: str
    ty: str
    pos: Pos = _pos()


@dataclass(frozen=True)
class FunctionDef:
    name: str
    params: tuple
    ret: str
    body: tuple
    pos: Pos = _pos()


@dataclass(frozen=True)
class BranchSite:
    id: int
    function: str
    source_span: Pos
    kind: str  # "if" | "while"


@dataclass(frozen=True)
class Program:
    functions: tuple
    source_text: str = field(compare=False, repr=False)
    branch_sites: tuple = ()
    entry: str = "main"
    typed: bool = field(default=False, compare=False)

    def function(self, name: str) -> Optional[FunctionDef]:
        for fn in self.functions:
            if fn.name == name:
                return fn
        return None

    @property
    def entry_fn(self) -> FunctionDef:
        fn = self.function(self.entry)
        if fn is None:
            raise LookupError(f"no entry function {self.entry!r}")
        return fn

    @property
    def signature(self) -> list:
        """``[(name, type), ...]`` of the entry parameters."""
        return [(p.name, p.ty) for p in self.entry_fn.params]
