"""Recursive-descent parser for MiniLang."""

from __future__ import annotations

import re
from typing import List, Optional

from . import ast
from .errors import Diagnostic, ParseErrors

KEYWORDS = {
    "fn", "let", "if", "else", "while", "assert", "error", "return",
    "true", "false",
}
TYPE_NAMES = {ast.INT, ast.BOOL, ast.STR}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>//[^\n]*)
  | (?P<int>\d+)
  | (?P<str>"(?:[^"\\\n]|\\.)*")
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>->|==|!=|<=|>=|&&|\|\||[-+*/%<>=!(){},;:])
  """,
    re.VERBOSE,
)

_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}


class Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col

    def __repr__(self):
        return f"Token({self.kind}, {self.text!r}, {self.line}:{self.col})"


def tokenize(text: str) -> List[Token]:
    tokens = []
    line, line_start, i = 1, 0, 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if m is None:
            raise ParseErrors(
                [Diagnostic(line, i - line_start + 1, f"unexpected character {text[i]!r}")]
            )
        kind = m.lastgroup
        col = i - line_start + 1
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind in ("ws", "comment"):
            pass
        elif kind == "ident" and m.group() in KEYWORDS:
            tokens.append(Token("kw", m.group(), line, col))
        else:
            tokens.append(Token(kind, m.group(), line, col))
        i = m.end()
    tokens.append(Token("eof", "", line, i - line_start + 1))
    return tokens


def _unescape(raw: str, tok: Token) -> str:
    out = []
    body = raw[1:-1]
    j = 0
    while j < len(body):
        ch = body[j]
        if ch == "\\":
            nxt = body[j + 1]
            if nxt not in _ESCAPES:
                raise ParseErrors([Diagnostic(tok.line, tok.col, f"bad escape \\{nxt}")])
            out.append(_ESCAPES[nxt])
            j += 2
        else:
            out.append(ch)
            j += 1
    return "".join(out)


# binary operator precedence, loosest first
_LEVELS = [
    ("||",),
    ("&&",),
    ("==", "!="),
    ("<", "<=", ">", ">="),
    ("+", "-"),
    ("*", "/", "%"),
]


class Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0
        self.sites: list = []
        self.synthetic = 0
        self.current_fn = ""

    # token helpers
    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        t = self.peek()
        return t.kind in ("op", "kw") and t.text == text

    def advance(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, msg: str, tok: Optional[Token] = None):
        tok = tok or self.peek()
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise ParseErrors([Diagnostic(tok.line, tok.col, f"{msg}, found {found}")])

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"expected {text!r}")
        return self.advance()

    def ident(self) -> Token:
        t = self.peek()
        if t.kind != "ident":
            self.fail("expected identifier")
        return self.advance()

    def type_name(self) -> str:
        t = self.peek()
        if t.kind != "ident" or t.text not in TYPE_NAMES:
            self.fail("expected type (int, bool, str)")
        return self.advance().text

    def new_synthetic(self) -> int:
        self.synthetic += 1
        return -self.synthetic

    # grammar
    def program(self) -> ast.Program:
        fns = []
        while self.peek().kind != "eof":
            fns.append(self.function())
        return ast.Program(
            functions=tuple(fns), source_text=self.text, branch_sites=tuple(self.sites)
        )

    def function(self) -> ast.FunctionDef:
        start = self.expect("fn")
        name = self.ident().text
        self.current_fn = name
        self.expect("(")
        params = []
        if not self.at(")"):
            while True:
                p = self.ident()
                self.expect(":")
                params.append(ast.Param(p.text, self.type_name(), (p.line, p.col)))
                if not self.at(","):
                    break
                self.advance()
        self.expect(")")
        ret = ast.VOID
        if self.at("->"):
            self.advance()
            ret = self.type_name()
        body = self.block()
        return ast.FunctionDef(name, tuple(params), ret, body, (start.line, start.col))

    def block(self) -> tuple:
        self.expect("{")
        stmts = []
        while not self.at("}"):
            if self.peek().kind == "eof":
                self.fail("unclosed block: expected '}'")
            stmts.append(self.statement())
        self.advance()
        return tuple(stmts)

    def statement(self):
        t = self.peek()
        pos = (t.line, t.col)
        if self.at("let"):
            self.advance()
            name = self.ident().text
            self.expect(":")
            decl = self.type_name()
            self.expect("=")
            value = self.expr()
            self.expect(";")
            return ast.Let(name, decl, value, pos)
        if self.at("if"):
            return self.if_stmt()
        if self.at("while"):
            self.advance()
            site = self.add_site("while", pos)
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            return ast.While(cond, self.block(), site, pos)
        if self.at("assert"):
            self.advance()
            site = self.new_synthetic()
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            self.expect(";")
            return ast.Assert(cond, site, pos)
        if self.at("error"):
            self.advance()
            self.expect("(")
            s = self.peek()
            if s.kind != "str":
                self.fail("expected string label")
            self.advance()
            self.expect(")")
            self.expect(";")
            return ast.ErrorStmt(_unescape(s.text, s), pos)
        if self.at("return"):
            self.advance()
            value = None if self.at(";") else self.expr()
            self.expect(";")
            return ast.Return(value, pos)
        if t.kind == "ident" and self.peek(1).kind == "op" and self.peek(1).text == "=":
            name = self.advance().text
            self.advance()
            value = self.expr()
            self.expect(";")
            return ast.Assign(name, value, pos)
        e = self.expr()
        self.expect(";")
        return ast.ExprStmt(e, pos)

    def add_site(self, kind: str, pos) -> int:
        site = ast.BranchSite(len(self.sites), self.current_fn, pos, kind)
        self.sites.append(site)
        return site.id

    def if_stmt(self) -> ast.If:
        t = self.expect("if")
        pos = (t.line, t.col)
        site = self.add_site("if", pos)
        self.expect("(")
        cond = self.expr()
        self.expect(")")
        then = self.block()
        orelse: tuple = ()
        if self.at("else"):
            self.advance()
            orelse = (self.if_stmt(),) if self.at("if") else self.block()
        return ast.If(cond, then, orelse, site, pos)

    def expr(self, level: int = 0):
        if level == len(_LEVELS):
            return self.unary()
        left = self.expr(level + 1)
        ops = _LEVELS[level]
        while self.peek().kind == "op" and self.peek().text in ops:
            t = self.advance()
            right = self.expr(level + 1)
            guard = self.new_synthetic() if t.text in ("/", "%") else None
            left = ast.Binary(t.text, left, right, (t.line, t.col), guard=guard)
        return left

    def unary(self):
        t = self.peek()
        if t.kind == "op" and t.text in ("-", "!"):
            self.advance()
            return ast.Unary(t.text, self.unary(), (t.line, t.col))
        return self.primary()

    def primary(self):
        t = self.peek()
        pos = (t.line, t.col)
        if t.kind == "int":
            self.advance()
            return ast.IntLit(int(t.text), pos)
        if t.kind == "str":
            self.advance()
            return ast.StrLit(_unescape(t.text, t), pos)
        if t.kind == "kw" and t.text in ("true", "false"):
            self.advance()
            return ast.BoolLit(t.text == "true", pos)
        if t.kind == "ident":
            self.advance()
            if self.at("("):
                self.advance()
                args = []
                if not self.at(")"):
                    while True:
                        args.append(self.expr())
                        if not self.at(","):
                            break
                        self.advance()
                self.expect(")")
                return ast.Call(t.text, tuple(args), pos)
            return ast.Var(t.text, pos)
        if self.at("("):
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        self.fail("expected expression")


def parse(source_text: str) -> ast.Program:
    """Parse MiniLang text. Raises :class:`ParseErrors` on malformed input."""
    return Parser(source_text).program()
