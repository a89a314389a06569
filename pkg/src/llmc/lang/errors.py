from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Diagnostic:
    line: int
    column: int
    message: str

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.message}"


class MiniLangError(Exception):
    """Carries one or more located diagnostics."""

    kind = "error"

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(str(d) for d in self.diagnostics))

    def render(self, path: str = "<source>") -> str:
        return "\n".join(f"{path}:{d} ({self.kind})" for d in self.diagnostics)


class ParseErrors(MiniLangError):
    kind = "syntax error"


class TypeErrors(MiniLangError):
    kind = "type error"
