"""Campaign configuration."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields, replace
from typing import Optional, Tuple

from ..concolic import ExecLimits
from ..solver import Domains
from ..solver.core import DEFAULT_NODE_BUDGET

STRATEGIES = ("llmc", "concolic", "random", "ga")
ORACLE_KINDS = ("null", "heuristic", "replay", "remote")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class OracleConfig:
    kind: str = "heuristic"
    endpoint: Optional[str] = None
    model: str = ""
    timeout_s: float = 30.0
    transcript_path: Optional[str] = None
    cache_path: Optional[str] = None
    record_path: Optional[str] = None
    lenient: bool = False


@dataclass(frozen=True)
class CampaignBudget:
    max_iterations: int = 500
    max_wallclock_ms: Optional[float] = None


@dataclass(frozen=True)
class GaConfig:
    population_size: int = 32
    crossover_rate: float = 0.8
    mutation_rate: float = 0.2
    tournament_size: int = 3
    elitism: int = 1
    max_step: int = 16

    def __post_init__(self):
        if not (0.0 <= self.crossover_rate <= 1.0 and 0.0 <= self.mutation_rate <= 1.0):
            raise ConfigError("GA rates must lie in [0, 1]")
        if self.population_size < 2:
            raise ConfigError("GA population must hold at least 2 individuals")
        if not 1 <= self.tournament_size:
            raise ConfigError("tournament size must be positive")


@dataclass(frozen=True)
class CampaignConfig:
    program: str = ""
    strategy: str = "llmc"
    oracle: OracleConfig = field(default_factory=OracleConfig)
    budget: CampaignBudget = field(default_factory=CampaignBudget)
    seeds: Tuple[dict, ...] = ()
    rng_seed: int = 0
    batch_size: int = 8
    solver_nodes: int = DEFAULT_NODE_BUDGET
    solver_timeout_ms: Optional[float] = None
    solver_external_cmd: Optional[str] = None
    exec_limits: ExecLimits = field(default_factory=ExecLimits)
    domains: Domains = field(default_factory=Domains)
    mutation: bool = True
    synthesis: bool = True
    ga: GaConfig = field(default_factory=GaConfig)

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ConfigError(f"unknown strategy {self.strategy!r} (expected one of {', '.join(STRATEGIES)})")
        if self.oracle.kind not in ORACLE_KINDS:
            raise ConfigError(f"unknown oracle kind {self.oracle.kind!r}")
        if self.budget.max_iterations <= 0:
            raise ConfigError("budget must be positive")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be at least 1")
        if self.solver_nodes < 1:
            raise ConfigError("solver node budget must be positive")

    @property
    def wallclock_mode(self) -> bool:
        return self.budget.max_wallclock_ms is not None

    def effective(self) -> "CampaignConfig":
        """Classic concolic is llmc with guidance switched off."""
        if self.strategy == "concolic":
            return replace(self, oracle=replace(self.oracle, kind="null"), mutation=False, synthesis=False)
        return self

    def to_json(self) -> dict:
        d = asdict(self)
        d["seeds"] = [dict(s) for s in self.seeds]
        d["domains"]["overrides"] = [list(o) for o in self.domains.overrides]
        return d

    @classmethod
    def from_json(cls, d: dict) -> "CampaignConfig":
        d = dict(d)
        sub = {
            "oracle": OracleConfig,
            "budget": CampaignBudget,
            "exec_limits": ExecLimits,
            "ga": GaConfig,
        }
        for key, typ in sub.items():
            if key in d and isinstance(d[key], dict):
                d[key] = typ(**d[key])
        if "domains" in d and isinstance(d["domains"], dict):
            dom = dict(d["domains"])
            dom["overrides"] = tuple(tuple(o) for o in dom.get("overrides", ()))
            d["domains"] = Domains(**dom)
        if "seeds" in d:
            d["seeds"] = tuple(dict(s) for s in d["seeds"])
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**d)
