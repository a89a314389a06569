"""Optional external SMT solver driven over stdin/stdout.

The command receives the SMT-LIB2 text from :func:`to_smtlib` on standard
input and must print ``sat``/``unsat``/``unknown`` followed, for ``sat``, by a
model in ``(define-fun name () Sort value)`` form. ``z3 -in`` works as is.
"""

from __future__ import annotations

import re
import shlex
import subprocess

from .core import Query, Verdict, check_model
from .smtlib import char_name, len_name, sym_name, to_smtlib

_DEFINE = re.compile(r"\(define-fun\s+(\|[^|]*\||[^\s()]+)\s+\(\)\s+(Int|Bool)\s+(\(\s*-\s*\d+\s*\)|-?\d+|true|false)\s*\)")


class ExternalSolverError(RuntimeError):
    pass


def parse_model(text: str) -> dict:
    out = {}
    for name, sort, value in _DEFINE.findall(text):
        name = name.strip("|")
        if sort == "Bool":
            out[name] = value == "true"
        else:
            out[name] = int(value.replace("(", "").replace(")", "").replace(" ", ""))
    return out


def _decode(query: Query, raw: dict) -> dict:
    model = {}
    for name, ty in query.variables:
        if ty == "str":
            n = raw[len_name(name)]
            model[name] = "".join(chr(raw[char_name(name, i)]) for i in range(n))
        else:
            model[name] = raw[sym_name(name).strip("|")]
    return model


def solve_external(query: Query, cmd: str, timeout_s: float = 30.0) -> Verdict:
    """Run ``cmd`` (a shell-style string, e.g. ``"z3 -in"``) on the query."""
    try:
        proc = subprocess.run(
            shlex.split(cmd),
            input=to_smtlib(query),
            capture_output=True,
            text=True,
            timeout=timeout_s,
        )
    except subprocess.TimeoutExpired:
        return Verdict("UNKNOWN", reason="wallclock")
    except OSError as exc:
        raise ExternalSolverError(f"cannot run {cmd!r}: {exc}") from exc
    lines = proc.stdout.strip().splitlines()
    if not lines:
        raise ExternalSolverError(f"no output from {cmd!r}: {proc.stderr.strip()}")
    head = lines[0].strip()
    if head == "unsat":
        return Verdict("UNSAT")
    if head == "unknown":
        return Verdict("UNKNOWN", reason="unsupported")
    if head != "sat":
        raise ExternalSolverError(f"unexpected solver output {head!r}")
    model = _decode(query, parse_model(proc.stdout))
    if not check_model(query, model):
        raise ExternalSolverError(f"external model fails check_model: {model}")
    return Verdict("SAT", model=model)
