"""Campaign reports and the single-campaign entry point."""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

from ..lang import MiniLangError, ast, load, load_file
from .config import CampaignConfig, ConfigError
from .core import EngineState, coverage, run_engine

WALLCLOCK_KEYS = ("wallclock_ms",)


@dataclass
class CampaignReport:
    strategy: str
    program: str
    config: dict
    branch_sites: int
    covered_directions: int
    branch_coverage: float
    path_count: int
    curve: List[dict]
    tallies: dict
    oracle: dict
    findings: List[dict]
    wallclock_ms: float = 0.0
    events: Optional[list] = field(default=None, repr=False, compare=False)

    def to_json(self) -> dict:
        return {
            "strategy": self.strategy,
            "program": self.program,
            "config": self.config,
            "branch_sites": self.branch_sites,
            "covered_directions": self.covered_directions,
            "branch_coverage": self.branch_coverage,
            "path_count": self.path_count,
            "curve": self.curve,
            "tallies": self.tallies,
            "oracle": self.oracle,
            "findings": self.findings,
            "wallclock_ms": self.wallclock_ms,
        }

    @classmethod
    def from_json(cls, d: dict) -> "CampaignReport":
        return cls(**{k: d[k] for k in (
            "strategy", "program", "config", "branch_sites", "covered_directions",
            "branch_coverage", "path_count", "curve", "tallies", "oracle", "findings", "wallclock_ms",
        )})

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"

    @property
    def solver_invocations(self) -> int:
        return self.tallies["solver_invocations"]

    @property
    def solver_timeouts(self) -> int:
        return self.tallies["solver_timeouts"]

    def time_to_coverage(self, threshold: float, unit: str = "iteration"):
        """First curve point at or above ``threshold``; None if never reached."""
        for p in self.curve:
            if p["branch_coverage"] >= threshold - 1e-12:
                return p[unit]
        return None


def strip_wallclock(obj):
    """Copy of a JSON-like value with wallclock fields removed."""
    if isinstance(obj, dict):
        return {k: strip_wallclock(v) for k, v in obj.items() if k not in WALLCLOCK_KEYS}
    if isinstance(obj, list):
        return [strip_wallclock(v) for v in obj]
    return obj


def report_from_state(state: EngineState, strategy: str, name: str, config: CampaignConfig) -> CampaignReport:
    cov, paths = coverage(state)
    curve = copy.deepcopy(state.curve)
    final = {"iteration": state.tallies["work_units"], "wallclock_ms": round(state.elapsed_ms(), 3),
             "branch_coverage": cov}
    if curve[-1]["iteration"] != final["iteration"] or curve[-1]["branch_coverage"] != cov:
        curve.append(final)
    oracle = {"kind": config.effective().oracle.kind}
    if state.client is not None:
        oracle.update(state.client.stats.to_json())
        misses = getattr(state.client.oracle, "misses", None)
        if misses is not None:
            oracle["replay_misses"] = misses
    return CampaignReport(
        strategy=strategy,
        program=name,
        config=config.to_json(),
        branch_sites=state.n_sites,
        covered_directions=len(state.covered),
        branch_coverage=cov,
        path_count=paths,
        curve=curve,
        tallies=dict(state.tallies),
        oracle=oracle,
        findings=list(state.findings),
        wallclock_ms=round(state.elapsed_ms(), 3),
        events=state.events.events,
    )


def load_program(config: CampaignConfig, program: Optional[ast.Program] = None) -> ast.Program:
    if program is not None:
        return program
    if not config.program:
        raise ConfigError("no program given")
    try:
        return load_file(config.program)
    except OSError as exc:
        raise ConfigError(f"cannot read {config.program}: {exc.strerror or exc}") from exc
    except MiniLangError as exc:
        raise ConfigError(exc.render(config.program)) from exc


def run_campaign(config: CampaignConfig, program: Optional[ast.Program] = None, client=None) -> CampaignReport:
    prog = load_program(config, program)
    name = Path(config.program).stem if config.program else prog.entry
    if config.strategy in ("llmc", "concolic"):
        state = run_engine(prog, config, client)
    else:
        from ..baselines import run_baseline_state

        state = run_baseline_state(prog, config)
    report = report_from_state(state, config.strategy, name, config)
    if state.client is not None and state.client.transcript is not None and config.oracle.record_path:
        state.client.transcript.save(config.oracle.record_path)
    report.client = state.client
    return report


def run_source(source: str, config: CampaignConfig) -> CampaignReport:
    return run_campaign(config, load(source))
