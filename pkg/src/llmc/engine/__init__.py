"""Campaign engine: frontier queue, guidance cascade, re-trace admission, reports."""

from .config import (
    ORACLE_KINDS,
    STRATEGIES,
    CampaignBudget,
    CampaignConfig,
    ConfigError,
    GaConfig,
    OracleConfig,
)
from .core import (
    EngineState,
    EventLog,
    admit,
    build_client,
    coverage,
    new_state,
    run_engine,
    select_batch,
    step,
)
from .report import CampaignReport, load_program, run_campaign, run_source, strip_wallclock

__all__ = [
    "ORACLE_KINDS",
    "STRATEGIES",
    "CampaignBudget",
    "CampaignConfig",
    "CampaignReport",
    "ConfigError",
    "EngineState",
    "EventLog",
    "GaConfig",
    "OracleConfig",
    "admit",
    "build_client",
    "coverage",
    "load_program",
    "new_state",
    "run_campaign",
    "run_engine",
    "run_source",
    "select_batch",
    "step",
    "strip_wallclock",
]
