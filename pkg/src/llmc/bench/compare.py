"""Run every (program, strategy) pair of a suite and tabulate the results."""

from __future__ import annotations

import json
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, List, Optional, Sequence

from ..engine import CampaignConfig, ConfigError, run_campaign
from ..engine.config import STRATEGIES
from ..engine.report import CampaignReport, strip_wallclock
from .suite import SuiteManifest

DEFAULT_THRESHOLD = 0.8


@dataclass
class CellSummary:
    program: str
    strategy: str
    status: str  # ok | failed
    error: Optional[str] = None
    branch_sites: int = 0
    covered_directions: int = 0
    branch_coverage: float = 0.0
    path_count: int = 0
    solver_invocations: int = 0
    solver_timeouts: int = 0
    work_units: int = 0
    findings: List[str] = field(default_factory=list)
    time_to_threshold: Optional[dict] = None
    curve: List[dict] = field(default_factory=list)
    oracle: dict = field(default_factory=dict)
    wallclock_ms: float = 0.0

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def to_json(self) -> dict:
        return {
            "program": self.program,
            "strategy": self.strategy,
            "status": self.status,
            "error": self.error,
            "branch_sites": self.branch_sites,
            "covered_directions": self.covered_directions,
            "branch_coverage": self.branch_coverage,
            "path_count": self.path_count,
            "solver_invocations": self.solver_invocations,
            "solver_timeouts": self.solver_timeouts,
            "work_units": self.work_units,
            "findings": list(self.findings),
            "time_to_threshold": self.time_to_threshold,
            "curve": self.curve,
            "oracle": self.oracle,
            "wallclock_ms": self.wallclock_ms,
        }

    @classmethod
    def from_json(cls, d: dict) -> "CellSummary":
        d = dict(d)
        d.setdefault("wallclock_ms", 0.0)
        d.setdefault("time_to_threshold", None)
        return cls(**d)


def summarize(report: CampaignReport, program: str, threshold: float) -> CellSummary:
    reached = None
    for p in report.curve:
        if p["branch_coverage"] >= threshold - 1e-12:
            reached = {"iteration": p["iteration"], "wallclock_ms": p["wallclock_ms"]}
            break
    return CellSummary(
        program=program,
        strategy=report.strategy,
        status="ok",
        branch_sites=report.branch_sites,
        covered_directions=report.covered_directions,
        branch_coverage=report.branch_coverage,
        path_count=report.path_count,
        solver_invocations=report.solver_invocations,
        solver_timeouts=report.solver_timeouts,
        work_units=report.tallies["work_units"],
        findings=[f["verdict"] for f in report.findings],
        time_to_threshold=reached,
        curve=report.curve,
        oracle=report.oracle,
        wallclock_ms=report.wallclock_ms,
    )


def _mean(xs):
    xs = list(xs)
    return sum(xs) / len(xs) if xs else 0.0


@dataclass
class ComparisonReport:
    strategies: List[str]
    programs: List[str]
    rng_seed: int
    budget: Optional[int]
    threshold: float
    cells: List[CellSummary]

    def cell(self, program: str, strategy: str) -> CellSummary:
        for c in self.cells:
            if c.program == program and c.strategy == strategy:
                return c
        raise KeyError((program, strategy))

    @property
    def failures(self) -> List[CellSummary]:
        return [c for c in self.cells if not c.ok]

    def aggregates(self) -> Dict[str, dict]:
        """Per strategy: means of per-program finals over successful cells, plus totals."""
        out = {}
        for s in self.strategies:
            cells = [c for c in self.cells if c.strategy == s and c.ok]
            out[s] = {
                "programs": len(cells),
                "failed": sum(1 for c in self.cells if c.strategy == s and not c.ok),
                "branch_coverage": _mean(c.branch_coverage for c in cells),
                "path_count": _mean(c.path_count for c in cells),
                "solver_invocations": _mean(c.solver_invocations for c in cells),
                "solver_timeouts": _mean(c.solver_timeouts for c in cells),
                "solver_invocations_total": sum(c.solver_invocations for c in cells),
                "solver_timeouts_total": sum(c.solver_timeouts for c in cells),
                "reached_threshold": sum(1 for c in cells if c.time_to_threshold is not None),
            }
        return out

    def to_json(self) -> dict:
        return {
            "strategies": list(self.strategies),
            "programs": list(self.programs),
            "rng_seed": self.rng_seed,
            "budget": self.budget,
            "threshold": self.threshold,
            "cells": [c.to_json() for c in self.cells],
            "aggregates": self.aggregates(),
        }

    @classmethod
    def from_json(cls, d: dict) -> "ComparisonReport":
        return cls(
            strategies=list(d["strategies"]),
            programs=list(d["programs"]),
            rng_seed=d["rng_seed"],
            budget=d["budget"],
            threshold=d["threshold"],
            cells=[CellSummary.from_json(c) for c in d["cells"]],
        )

    def dumps(self, wallclock: bool = True) -> str:
        doc = self.to_json()
        if not wallclock:
            doc = strip_wallclock(doc)
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def __eq__(self, other):
        if not isinstance(other, ComparisonReport):
            return NotImplemented
        return self.to_json() == other.to_json()


def _run_cell(name: str, config_json: dict, threshold: float) -> dict:
    """Worker entry point; returns a CellSummary as JSON so it crosses process boundaries."""
    try:
        config = CampaignConfig.from_json(config_json)
        report = run_campaign(config)
        return summarize(report, name, threshold).to_json()
    except Exception as exc:  # one broken cell must not sink the comparison
        detail = str(exc) if isinstance(exc, ConfigError) else "".join(
            traceback.format_exception_only(type(exc), exc)).strip()
        return CellSummary(name, config_json.get("strategy", "?"), "failed", error=detail).to_json()


def compare(
    suite: SuiteManifest,
    strategies: Sequence[str],
    budget: Optional[int] = None,
    rng_seed: int = 0,
    *,
    base: Optional[CampaignConfig] = None,
    threshold: float = DEFAULT_THRESHOLD,
    jobs: int = 1,
) -> ComparisonReport:
    """Run each strategy on each program at equal budget and seed.

    ``budget`` overrides every entry's recommended budget when given; ``base``
    supplies the remaining configuration (oracle, solver, domains).
    """
    strategies = list(strategies)
    if not strategies:
        raise ConfigError("compare needs at least one strategy")
    for s in strategies:
        if s not in STRATEGIES:
            raise ConfigError(f"unknown strategy {s!r}")
    base = base or CampaignConfig()
    jobs_list = []
    for entry in suite:
        b = budget if budget is not None else entry.budget
        for s in strategies:
            cfg = replace(base, program=str(entry.path), strategy=s, rng_seed=rng_seed,
                          budget=replace(base.budget, max_iterations=b))
            jobs_list.append((entry.name, cfg.to_json()))
    if jobs > 1 and len(jobs_list) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            futures = [pool.submit(_run_cell, name, cfg, threshold) for name, cfg in jobs_list]
            results = [f.result() for f in futures]
    else:
        results = [_run_cell(name, cfg, threshold) for name, cfg in jobs_list]
    return ComparisonReport(
        strategies=strategies,
        programs=suite.names,
        rng_seed=rng_seed,
        budget=budget,
        threshold=threshold,
        cells=[CellSummary.from_json(r) for r in results],
    )
