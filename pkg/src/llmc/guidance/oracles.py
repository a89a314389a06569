"""Oracle implementations and the caching/recording stack the engine talks to."""

from __future__ import annotations

import json
import os
import socket
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from typing import Dict, Optional

from . import prompts
from .cache import ResponseCache
from .protocol import (
    GuidanceRequest,
    GuidanceResponse,
    RemoteUnavailable,
    extract_json,
    invalid,
    validate,
)
from .transcript import Transcript

API_KEY_ENV = "LLMC_API_KEY"


class TranscriptMiss(LookupError):
    """Strict replay met a request the transcript does not contain."""


class Oracle:
    name = "oracle"

    def answer(self, request: GuidanceRequest) -> GuidanceResponse:
        raise NotImplementedError


def _respond(request: GuidanceRequest, obj) -> GuidanceResponse:
    raw = json.dumps(obj, sort_keys=True)
    return validate(request, obj, raw, request.payload.get("str_max", 8))


class NullOracle(Oracle):
    """Identity policy: keep request order, never mutate or synthesize."""

    name = "null"

    def answer(self, request):
        if request.kind == "prioritize":
            return _respond(request, {"ranking": [f["frontier_id"] for f in request.payload["frontiers"]]})
        return invalid(request.kind, "")


def heuristic_score(frontier: dict) -> int:
    # 2*count - 0.1*depth, scaled by 10 to stay in integers
    return 20 * frontier["uncovered_direction_count"] - frontier["depth"]


def boundary_pool(int_constants) -> list:
    pool = []
    for c in int_constants:
        v, rel = c["value"], c.get("relation")
        if rel in (">", "<="):
            pool += [v, v + 1]
        elif rel in ("<", ">="):
            pool += [v, v - 1]
        else:
            pool.append(v)
    pool += [0, -1]
    return list(dict.fromkeys(pool))


def value_pools(payload: dict) -> list:
    ints = boundary_pool(payload.get("int_constants", ()))
    str_max = payload.get("str_max", 8)
    strs = [s for s in payload.get("str_constants", ()) if len(s) <= str_max]
    strs = list(dict.fromkeys(strs + [""]))
    pools = []
    for _, ty in payload["signature"]:
        pools.append(ints if ty == "int" else [True, False] if ty == "bool" else strs)
    return pools


class HeuristicOracle(Oracle):
    """Deterministic stand-in for a language model.

    prioritize: rank by 2*uncovered - 0.1*depth, ties by frontier id.
    mutate: linearize a nonlinear failing atom, widen an equality, then drop.
    synthesize: boundary values and harvested literals, mixed-radix round robin.
    """

    name = "heuristic"

    def answer(self, request):
        p = request.payload
        if request.kind == "prioritize":
            ranked = sorted(p["frontiers"], key=lambda f: (-heuristic_score(f), f["frontier_id"]))
            return _respond(request, {"ranking": [f["frontier_id"] for f in ranked]})
        if request.kind == "mutate":
            return _respond(request, {"edits": self.mutation_edits(p)})
        pools = value_pools(p)
        k = p.get("attempt", 0)
        inp = {}
        for (name, _), pool in zip(p["signature"], pools):
            k, r = divmod(k, len(pool))
            inp[name] = pool[r]
        return _respond(request, {"input": inp})

    @staticmethod
    def mutation_edits(p: dict) -> list:
        if p.get("uncovered_direction_count", 1) == 0:
            return []  # nothing new behind the target: relaxing it can only buy a path
        if p.get("status") == "UNSAT":
            return []  # a refuted target stays refuted however the query is relaxed
        i = p["failing_atom_index"]
        info = p["atom_info"][i]
        concrete = p.get("concrete", {})
        edits = []
        if info.get("nonlinear"):
            for v in info.get("product_vars", ()):
                val = concrete.get(v)
                if isinstance(val, int) and not isinstance(val, bool):
                    edits.append({"op": "linearize_product", "index": i, "fix_var": v, "fix_value": val,
                                  "rationale": f"fix {v} at its last concrete value"})
                    break
        if info.get("equality"):
            edits.append({"op": "widen_eq_to_range", "index": i, "radius": 8,
                          "rationale": "accept values near the equality"})
        edits.append({"op": "drop_atom", "index": i, "rationale": "ignore the failing atom"})
        return edits


class ReplayOracle(Oracle):
    name = "replay"

    def __init__(self, transcript: Transcript, lenient: bool = False):
        self.transcript = transcript
        self.lenient = lenient
        self.misses = 0
        self._fallback = HeuristicOracle()

    def answer(self, request):
        resp = self.transcript.lookup(request.request_id)
        if resp is not None:
            return resp
        if not self.lenient:
            raise TranscriptMiss(f"transcript has no response for {request.kind} request {request.request_id[:12]}")
        self.misses += 1
        return self._fallback.answer(request)


@dataclass
class RemoteConfig:
    endpoint: str
    model: str = ""
    timeout_s: float = 30.0
    api_key_env: str = API_KEY_ENV


def _content_of(body: str):
    """Pull the answer object out of a chat-style or bare JSON reply."""
    try:
        d = json.loads(body)
    except ValueError:
        return extract_json(body)
    if not isinstance(d, dict):
        return None
    if any(k in d for k in ("ranking", "edits", "input")):
        return d
    text = None
    choices = d.get("choices")
    if isinstance(choices, list) and choices and isinstance(choices[0], dict):
        msg = choices[0].get("message") or {}
        text = msg.get("content") if isinstance(msg, dict) else None
        text = text or choices[0].get("text")
    for key in ("content", "text", "output", "completion"):
        if text is None and isinstance(d.get(key), str):
            text = d[key]
    if isinstance(d.get("content"), list):
        parts = [c.get("text", "") for c in d["content"] if isinstance(c, dict)]
        text = "".join(parts)
    return extract_json(text) if isinstance(text, str) else None


class RemoteOracle(Oracle):
    """POSTs the rendered prompt plus the structured request to an HTTP endpoint."""

    name = "remote"

    def __init__(self, config: RemoteConfig):
        self.config = config
        self.network_calls = 0

    def answer(self, request):
        body = {"model": self.config.model, "prompt": prompts.render(request), "request": request.to_json()}
        headers = {"Content-Type": "application/json"}
        key = os.environ.get(self.config.api_key_env)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        req = urllib.request.Request(
            self.config.endpoint, data=json.dumps(body).encode(), headers=headers, method="POST"
        )
        self.network_calls += 1
        try:
            with urllib.request.urlopen(req, timeout=self.config.timeout_s) as fh:
                text = fh.read().decode("utf-8", errors="replace")
        except (urllib.error.URLError, socket.timeout, ConnectionError, OSError) as exc:
            raise RemoteUnavailable(str(exc)) from exc
        obj = _content_of(text)
        if obj is None:
            return invalid(request.kind, text)
        return validate(request, obj, text, request.payload.get("str_max", 8))


@dataclass
class OracleStats:
    calls: Dict[str, int] = field(default_factory=lambda: {"prioritize": 0, "mutate": 0, "synthesize": 0})
    cache_hits: int = 0
    invalid: int = 0
    unavailable: int = 0

    def to_json(self) -> dict:
        return {
            "calls": dict(self.calls),
            "cache_hits": self.cache_hits,
            "invalid": self.invalid,
            "unavailable": self.unavailable,
        }


class GuidanceClient:
    """What the engine holds: cache in front of an oracle, plus optional recording.

    Never raises for oracle failures except a strict transcript miss, which is
    a configuration problem rather than a guidance problem.
    """

    def __init__(self, oracle: Oracle, cache: Optional[ResponseCache] = None,
                 transcript: Optional[Transcript] = None):
        self.oracle = oracle
        self.cache = cache if cache is not None else ResponseCache()
        self.transcript = transcript
        self.stats = OracleStats()

    @property
    def name(self) -> str:
        return self.oracle.name

    def ask(self, request: GuidanceRequest) -> GuidanceResponse:
        self.stats.calls[request.kind] += 1
        rid = request.request_id
        resp = self.cache.lookup(rid)
        if resp is not None:
            self.stats.cache_hits += 1
        else:
            try:
                resp = self.oracle.answer(request)
            except RemoteUnavailable:
                self.stats.unavailable += 1
                return invalid(request.kind, "")
            self.cache.store(rid, resp)
        if self.transcript is not None:
            self.transcript.add(request, resp)
        if not resp.valid:
            self.stats.invalid += 1
        return resp


def make_oracle(kind: str, *, endpoint: Optional[str] = None, transcript_path=None,
                lenient: bool = False, model: str = "", timeout_s: float = 30.0) -> Oracle:
    if kind == "null":
        return NullOracle()
    if kind == "heuristic":
        return HeuristicOracle()
    if kind == "replay":
        if not transcript_path:
            raise ValueError("replay oracle needs oracle.transcript_path")
        return ReplayOracle(Transcript.load(transcript_path), lenient=lenient)
    if kind == "remote":
        if not endpoint:
            raise ValueError("remote oracle needs oracle.endpoint")
        return RemoteOracle(RemoteConfig(endpoint, model=model, timeout_s=timeout_s))
    raise ValueError(f"unknown oracle kind {kind!r}")
