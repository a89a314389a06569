"""Replayable JSON-lines record of oracle traffic.

The first line is a header ``{"transcript": 1, "oracle": ..., "created": ...}``;
every further line holds one ``{"request": ..., "response": ...}`` pair.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

from ..util import atomic_write_text
from .protocol import GuidanceRequest, GuidanceResponse


class TranscriptError(ValueError):
    pass


@dataclass
class Transcript:
    oracle: str
    created: float = field(default_factory=time.time)
    entries: List[Tuple[GuidanceRequest, GuidanceResponse]] = field(default_factory=list)
    _index: Dict[str, GuidanceResponse] = field(default_factory=dict, repr=False)

    def add(self, request: GuidanceRequest, response: GuidanceResponse) -> None:
        rid = request.request_id
        if rid in self._index:
            return
        self._index[rid] = response
        self.entries.append((request, response))

    def lookup(self, request_id: str):
        return self._index.get(request_id)

    def __len__(self):
        return len(self.entries)

    def dumps(self) -> str:
        lines = [json.dumps({"transcript": 1, "oracle": self.oracle, "created": self.created})]
        for req, resp in self.entries:
            lines.append(json.dumps({"request": req.to_json(), "response": resp.to_json()}, sort_keys=True))
        return "\n".join(lines) + "\n"

    def save(self, path) -> None:
        atomic_write_text(path, self.dumps())

    @classmethod
    def loads(cls, text: str) -> "Transcript":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise TranscriptError("empty transcript")
        try:
            head = json.loads(lines[0])
            t = cls(oracle=head["oracle"], created=head.get("created", 0.0))
        except (ValueError, KeyError, TypeError) as exc:
            raise TranscriptError(f"bad transcript header: {exc}") from exc
        for n, line in enumerate(lines[1:], start=2):
            try:
                d = json.loads(line)
                t.add(GuidanceRequest.from_json(d["request"]), GuidanceResponse.from_json(d["response"]))
            except (ValueError, KeyError, TypeError) as exc:
                raise TranscriptError(f"line {n}: {exc}") from exc
        return t

    @classmethod
    def load(cls, path) -> "Transcript":
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())
