"""MiniLang: the language of programs under test."""

from .ast import BranchSite, Program
from .errors import Diagnostic, MiniLangError, ParseErrors, TypeErrors
from .parser import parse
from .printer import pretty
from .typecheck import branch_inventory, typecheck


def load(source_text: str) -> Program:
    """Parse and typecheck in one go."""
    return typecheck(parse(source_text))


def load_file(path) -> Program:
    with open(path, encoding="utf-8") as fh:
        return load(fh.read())


__all__ = [
    "BranchSite",
    "Diagnostic",
    "MiniLangError",
    "ParseErrors",
    "Program",
    "TypeErrors",
    "branch_inventory",
    "load",
    "load_file",
    "parse",
    "pretty",
    "typecheck",
]
