"""Guidance oracles: prioritize frontiers, mutate hard conditions, synthesize inputs."""

from .cache import ResponseCache
from .oracles import (
    GuidanceClient,
    HeuristicOracle,
    NullOracle,
    Oracle,
    OracleStats,
    RemoteConfig,
    RemoteOracle,
    ReplayOracle,
    TranscriptMiss,
    heuristic_score,
    make_oracle,
)
from .protocol import (
    EDIT_OPS,
    GuidanceRequest,
    GuidanceResponse,
    MalformedResponse,
    MutationEdit,
    RemoteUnavailable,
    extract_json,
    validate,
)
from .transcript import Transcript, TranscriptError

__all__ = [
    "EDIT_OPS",
    "GuidanceClient",
    "GuidanceRequest",
    "GuidanceResponse",
    "HeuristicOracle",
    "MalformedResponse",
    "MutationEdit",
    "NullOracle",
    "Oracle",
    "OracleStats",
    "RemoteConfig",
    "RemoteOracle",
    "RemoteUnavailable",
    "ReplayOracle",
    "ResponseCache",
    "Transcript",
    "TranscriptError",
    "TranscriptMiss",
    "extract_json",
    "heuristic_score",
    "make_oracle",
    "validate",
]
