"""Response cache keyed by request_id, optionally persisted as JSON lines."""

from __future__ import annotations

import json
import os
import threading
from pathlib import Path
from typing import Dict, Optional

from .protocol import KINDS, GuidanceResponse


def _decode(line: str):
    try:
        d = json.loads(line)
        rid = d["request_id"]
        resp = GuidanceResponse.from_json(d["response"])
    except (ValueError, KeyError, TypeError):
        return None
    if not isinstance(rid, str) or resp.kind not in KINDS:
        return None
    return rid, resp


class ResponseCache:
    def __init__(self, path: Optional[os.PathLike] = None):
        self.path = Path(path) if path else None
        self._entries: Dict[str, GuidanceResponse] = {}
        self._lock = threading.Lock()
        self.evicted = 0
        if self.path and self.path.exists():
            self._load()

    def _load(self):
        good = []
        for line in self.path.read_text(encoding="utf-8", errors="replace").splitlines():
            if not line.strip():
                continue
            item = _decode(line)
            if item is None:
                self.evicted += 1
                continue
            self._entries.setdefault(*item)
            good.append(line)
        if self.evicted:
            tmp = self.path.with_suffix(self.path.suffix + ".tmp")
            tmp.write_text("".join(g + "\n" for g in good), encoding="utf-8")
            os.replace(tmp, self.path)

    def lookup(self, request_id: str) -> Optional[GuidanceResponse]:
        return self._entries.get(request_id)

    def store(self, request_id: str, response: GuidanceResponse) -> None:
        with self._lock:
            if request_id in self._entries:
                return
            self._entries[request_id] = response
            if self.path:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                line = json.dumps({"request_id": request_id, "response": response.to_json()}, sort_keys=True)
                with open(self.path, "a", encoding="utf-8") as fh:
                    fh.write(line + "\n")

    def __len__(self):
        return len(self._entries)

    def __contains__(self, request_id):
        return request_id in self._entries
