"""Guidance wire protocol and the response validator.

Requests and responses travel as JSON objects. Whatever an oracle returns is
passed through :func:`validate` before the engine sees it, so a malformed or
hallucinated answer degrades to ``valid=False`` and never to an exception.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from typing import Optional

KINDS = ("prioritize", "mutate", "synthesize")
EDIT_OPS = ("drop_atom", "widen_eq_to_range", "linearize_product", "replace_const")
MAX_EDITS = 3


class RemoteUnavailable(RuntimeError):
    """The remote oracle could not be reached or timed out."""


class MalformedResponse(ValueError):
    pass


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


@dataclass(frozen=True)
class GuidanceRequest:
    kind: str
    program_source: str
    payload: dict

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown request kind {self.kind!r}")

    @property
    def request_id(self) -> str:
        body = canonical_json({"kind": self.kind, "program_source": self.program_source, "payload": self.payload})
        return hashlib.sha256(body.encode()).hexdigest()

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "program_source": self.program_source,
            "payload": self.payload,
            "request_id": self.request_id,
        }

    @classmethod
    def from_json(cls, d: dict) -> "GuidanceRequest":
        return cls(d["kind"], d["program_source"], d["payload"])


@dataclass(frozen=True)
class MutationEdit:
    op: str
    index: int
    radius: Optional[int] = None
    fix_var: Optional[str] = None
    fix_value: Optional[int] = None
    new_value: Optional[int] = None
    rationale: str = ""

    def to_json(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}

    def __str__(self):
        if self.op == "drop_atom":
            return f"drop_atom({self.index})"
        if self.op == "widen_eq_to_range":
            return f"widen_eq_to_range({self.index}, {self.radius})"
        if self.op == "linearize_product":
            return f"linearize_product({self.index}, {self.fix_var}, {self.fix_value})"
        return f"replace_const({self.index}, {self.new_value})"


@dataclass(frozen=True)
class GuidanceResponse:
    kind: str
    valid: bool
    ranking: tuple = ()
    edits: tuple = ()
    input: Optional[dict] = None
    raw: str = field(default="", compare=False)

    def to_json(self) -> dict:
        d = {"kind": self.kind, "valid": self.valid, "raw": self.raw}
        if self.kind == "prioritize":
            d["ranking"] = list(self.ranking)
        elif self.kind == "mutate":
            d["edits"] = [e.to_json() for e in self.edits]
        else:
            d["input"] = self.input
        return d

    @classmethod
    def from_json(cls, d: dict) -> "GuidanceResponse":
        return cls(
            kind=d["kind"],
            valid=bool(d["valid"]),
            ranking=tuple(d.get("ranking", ())),
            edits=tuple(MutationEdit(**e) for e in d.get("edits", ())),
            input=d.get("input"),
            raw=d.get("raw", ""),
        )


def invalid(kind: str, raw: str = "") -> GuidanceResponse:
    return GuidanceResponse(kind, False, raw=raw)


def extract_json(text: str):
    """First JSON object embedded in ``text``, or None."""
    if not isinstance(text, str):
        return None
    dec = json.JSONDecoder()
    i = text.find("{")
    while i != -1:
        try:
            obj, _ = dec.raw_decode(text, i)
        except ValueError:
            i = text.find("{", i + 1)
            continue
        if isinstance(obj, dict):
            return obj
        i = text.find("{", i + 1)
    return None


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def validate(request: GuidanceRequest, obj, raw: str = "", str_max: int = 8) -> GuidanceResponse:
    """Coerce an untrusted decoded object into a structurally valid response."""
    kind = request.kind
    if not isinstance(obj, dict):
        return invalid(kind, raw)
    if kind == "prioritize":
        known = {f["frontier_id"] for f in request.payload.get("frontiers", ())}
        ranking = obj.get("ranking")
        if not isinstance(ranking, list):
            return invalid(kind, raw)
        out, seen = [], set()
        for r in ranking:
            if _is_int(r) and r in known and r not in seen:
                seen.add(r)
                out.append(r)
        return GuidanceResponse(kind, bool(out), ranking=tuple(out), raw=raw)
    if kind == "mutate":
        edits = obj.get("edits")
        if not isinstance(edits, list):
            return invalid(kind, raw)
        n_atoms = len(request.payload.get("atoms", ()))
        int_vars = {n for n, t in request.payload.get("signature", ()) if t == "int"}
        out = []
        for e in edits:
            edit = _edit(e, n_atoms, int_vars)
            if edit is not None:
                out.append(edit)
            if len(out) == MAX_EDITS:
                break
        # an explicit empty list is a valid "no edit worth trying"
        return GuidanceResponse(kind, bool(out) or not edits, edits=tuple(out), raw=raw)
    # synthesize
    inp = obj.get("input")
    sig = request.payload.get("signature", ())
    coerced = coerce_input(inp, sig, str_max)
    if coerced is None:
        return invalid(kind, raw)
    return GuidanceResponse(kind, True, input=coerced, raw=raw)


def _edit(e, n_atoms, int_vars) -> Optional[MutationEdit]:
    if not isinstance(e, dict) or e.get("op") not in EDIT_OPS:
        return None
    idx = e.get("index")
    if not _is_int(idx) or not 0 <= idx < n_atoms:
        return None
    rationale = e.get("rationale", "")
    if not isinstance(rationale, str):
        rationale = ""
    op = e["op"]
    if op == "drop_atom":
        return MutationEdit(op, idx, rationale=rationale)
    if op == "widen_eq_to_range":
        r = e.get("radius")
        if not _is_int(r) or r < 1:
            return None
        return MutationEdit(op, idx, radius=r, rationale=rationale)
    if op == "linearize_product":
        var, val = e.get("fix_var"), e.get("fix_value")
        if not isinstance(var, str) or var not in int_vars or not _is_int(val):
            return None
        return MutationEdit(op, idx, fix_var=var, fix_value=val, rationale=rationale)
    val = e.get("new_value")
    if not _is_int(val):
        return None
    return MutationEdit(op, idx, new_value=val, rationale=rationale)


def coerce_input(inp, signature, str_max: int = 8) -> Optional[dict]:
    if not isinstance(inp, dict):
        return None
    names = [n for n, _ in signature]
    if set(inp) != set(names):
        return None
    out = {}
    for name, ty in signature:
        v = inp[name]
        if ty == "int":
            if not _is_int(v):
                return None
        elif ty == "bool":
            if not isinstance(v, bool):
                return None
        else:
            if not isinstance(v, str) or len(v) > str_max:
                return None
            if any(not 32 <= ord(c) <= 126 for c in v):
                return None
        out[name] = v
    return out
