"""The bundled benchmark suite and its manifest."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, List, Optional

from ..lang import MiniLangError, ast, branch_inventory, load

CATEGORIES = ("nested-branching", "nonlinear", "string-puzzle", "fintech")
MANIFEST_PATH = Path(__file__).with_name("manifest.json")
_REQUIRED = ("name", "path", "category", "branch_sites")


class ManifestError(ValueError):
    def __init__(self, message: str, entry: Optional[str] = None):
        self.entry = entry
        super().__init__(f"{entry}: {message}" if entry else message)


@dataclass
class SuiteEntry:
    name: str
    path: Path
    category: str
    branch_sites: int
    feasible_paths: Optional[int]
    budget: int
    description: str
    program: ast.Program = field(repr=False, compare=False, default=None)

    def to_json(self, root: Optional[Path] = None) -> dict:
        path = self.path
        if root is not None:
            try:
                path = path.relative_to(root)
            except ValueError:
                pass
        return {
            "name": self.name,
            "path": path.as_posix(),
            "category": self.category,
            "branch_sites": self.branch_sites,
            "feasible_paths": self.feasible_paths,
            "budget": self.budget,
            "description": self.description,
        }


@dataclass
class SuiteManifest:
    entries: List[SuiteEntry]
    path: Optional[Path] = None
    default_budget: int = 500

    def __iter__(self) -> Iterator[SuiteEntry]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def names(self) -> List[str]:
        return [e.name for e in self.entries]

    def get(self, name: str) -> SuiteEntry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    def select(self, names) -> "SuiteManifest":
        """Sub-suite in manifest order; unknown names raise ManifestError."""
        wanted = list(names)
        missing = [n for n in wanted if n not in self.names]
        if missing:
            raise ManifestError(f"not in the suite: {', '.join(missing)}")
        return SuiteManifest([e for e in self.entries if e.name in wanted], self.path, self.default_budget)


def _entry(raw, root: Path, default_budget: int) -> SuiteEntry:
    if not isinstance(raw, dict):
        raise ManifestError("manifest entries must be objects")
    name = raw.get("name") or "<unnamed>"
    for key in _REQUIRED:
        if key not in raw:
            raise ManifestError(f"missing field {key!r}", name)
    if raw["category"] not in CATEGORIES:
        raise ManifestError(f"unknown category {raw['category']!r}", name)
    path = (root / raw["path"]).resolve()
    try:
        source = path.read_text(encoding="utf-8")
    except OSError:
        raise ManifestError(f"cannot read program file {raw['path']}", name) from None
    try:
        program = load(source)
    except MiniLangError as exc:
        raise ManifestError(exc.render(str(path)), name) from None
    sites = len(branch_inventory(program))
    if sites != raw["branch_sites"]:
        raise ManifestError(f"audited branch count {raw['branch_sites']} but the program has {sites}", name)
    budget = raw.get("budget", default_budget)
    if not isinstance(budget, int) or budget <= 0:
        raise ManifestError("budget must be a positive integer", name)
    return SuiteEntry(
        name=name,
        path=path,
        category=raw["category"],
        branch_sites=sites,
        feasible_paths=raw.get("feasible_paths"),
        budget=budget,
        description=raw.get("description", ""),
        program=program,
    )


def load_suite(path=None) -> SuiteManifest:
    """Load and validate a manifest; every program must parse and match its audit."""
    path = Path(path) if path is not None else MANIFEST_PATH
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc.strerror or exc}") from None
    try:
        doc = json.loads(text)
    except ValueError as exc:
        raise ManifestError(f"manifest {path} is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("programs"), list):
        raise ManifestError(f"manifest {path} has no 'programs' list")
    default_budget = doc.get("default_budget", 500)
    entries = [_entry(raw, path.parent, default_budget) for raw in doc["programs"]]
    seen = set()
    for e in entries:
        if e.name in seen:
            raise ManifestError("duplicate program name", e.name)
        seen.add(e.name)
    return SuiteManifest(entries, path, default_budget)
