"""Prompt rendering for the remote oracle. Templates ship as package data."""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from string import Template

from .protocol import GuidanceRequest


@lru_cache(maxsize=None)
def template(name: str) -> Template:
    text = resources.files(__package__).joinpath("templates", f"{name}.txt").read_text(encoding="utf-8")
    return Template(text)


@lru_cache(maxsize=None)
def mutation_examples() -> list:
    text = resources.files(__package__).joinpath("templates", "mutation_examples.json").read_text(encoding="utf-8")
    return json.loads(text)


def _examples_block() -> str:
    out = []
    for ex in mutation_examples():
        atoms = "\n".join(f"  {i}: {a}" for i, a in enumerate(ex["atoms"]))
        out.append(
            f"atoms:\n{atoms}\nfailing atom index: {ex['failing_atom_index']}\n"
            f"last input: {json.dumps(ex['concrete'])}\nanswer: {json.dumps({'edits': ex['edits']})}"
        )
    return "\n\n".join(out)


def render(request: GuidanceRequest) -> str:
    p = request.payload
    if request.kind == "prioritize":
        lines = [
            f"  {f['frontier_id']}: {f['flip_smtlib']}  (site {f['site']}, depth {f['depth']}, "
            f"uncovered {f['uncovered_direction_count']})"
            for f in p["frontiers"]
        ]
        pc = "\n".join(f"  {a}" for a in p.get("path_condition", ())) or "  (empty)"
        return template("prioritize").substitute(
            source=request.program_source, path_condition=pc, frontiers="\n".join(lines)
        )
    if request.kind == "mutate":
        atoms = "\n".join(f"  {i}: {a}" for i, a in enumerate(p["atoms"]))
        return template("mutate").substitute(
            status=p.get("status", "UNKNOWN"),
            examples=_examples_block(),
            source=request.program_source,
            code_context=p.get("code_context", ""),
            atoms=atoms,
            failing_atom_index=p["failing_atom_index"],
            concrete=json.dumps(p.get("concrete", {})),
        )
    sig = ", ".join(f"{n}: {t}" for n, t in p["signature"])
    return template("synthesize").substitute(
        source=request.program_source,
        signature=f"main({sig})",
        covered=json.dumps(p.get("covered_directions", [])),
        int_constants=json.dumps([c["value"] for c in p.get("int_constants", [])]),
        str_constants=json.dumps(p.get("str_constants", [])),
        str_max=p.get("str_max", 8),
    )
