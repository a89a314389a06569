"""Bundled benchmark suite, strategy comparison, and report emitters."""

from .compare import DEFAULT_THRESHOLD, CellSummary, ComparisonReport, compare, summarize
from .emit import FORMATS, emit, render, text_table, to_csv, to_plotdata
from .suite import CATEGORIES, MANIFEST_PATH, ManifestError, SuiteEntry, SuiteManifest, load_suite

__all__ = [
    "CATEGORIES",
    "DEFAULT_THRESHOLD",
    "FORMATS",
    "MANIFEST_PATH",
    "CellSummary",
    "ComparisonReport",
    "ManifestError",
    "SuiteEntry",
    "SuiteManifest",
    "compare",
    "emit",
    "load_suite",
    "render",
    "summarize",
    "text_table",
    "to_csv",
    "to_plotdata",
]
