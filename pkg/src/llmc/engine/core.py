"""The guided concolic loop.

Budget currency: every concrete execution and every solver call costs one
work unit. Classic concolic is this same loop with the null oracle and with
mutation and synthesis off, so the two can be compared event for event.
"""

from __future__ import annotations

import json
import os
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Deque, Dict, List, Optional

from .. import concolic as C
from ..guidance import GuidanceClient, GuidanceRequest, ResponseCache, Transcript, make_oracle
from ..lang import ast
from ..solver import Budget, Query, Verdict, solve
from ..solver.external import ExternalSolverError, solve_external
from ..solver.smtlib import expr_to_smtlib
from .config import CampaignConfig, ConfigError
from .mutation import apply_edit, atom_info
from .static import StaticInfo, analyze, code_context

# consecutive synthesized inputs without a new path before an empty queue ends the run
SYNTH_PATIENCE = 8
CACHE_DIR_ENV = "LLMC_CACHE_DIR"  # default home of the remote oracle's response cache
PROMPT_PATH_ATOMS = 64

TALLY_KEYS = (
    "work_units",
    "steps",
    "executions",
    "solver_invocations",
    "solver_timeouts",
    "solver_sat",
    "solver_unsat",
    "solver_unsupported",
    "mutation_requests",
    "mutation_solves",
    "mutation_hits",
    "synthesis_runs",
    "targets_solved",
    "frontiers_created",
    "frontiers_retired",
)


class EventLog:
    def __init__(self):
        self.events: List[dict] = []

    def emit(self, event: str, **fields) -> None:
        fields["event"] = event
        fields["seq"] = len(self.events)
        self.events.append(fields)

    def dumps(self) -> str:
        return "".join(json.dumps(e, sort_keys=True) + "\n" for e in self.events)

    def __iter__(self):
        return iter(self.events)

    def __len__(self):
        return len(self.events)


@dataclass
class EngineState:
    program: ast.Program
    config: CampaignConfig
    static: StaticInfo
    client: Optional[GuidanceClient] = None
    store: C.FrontierStore = field(default_factory=C.FrontierStore)
    ranked: Deque[int] = field(default_factory=deque)
    covered: set = field(default_factory=set)  # (site, direction), real sites only
    observed: set = field(default_factory=set)  # including synthetic sites
    paths: set = field(default_factory=set)
    targets: Dict[bytes, C.Frontier] = field(default_factory=dict)
    findings: List[dict] = field(default_factory=list)
    finding_keys: set = field(default_factory=set)
    tallies: Dict[str, int] = field(default_factory=lambda: dict.fromkeys(TALLY_KEYS, 0))
    curve: List[dict] = field(default_factory=list)
    events: EventLog = field(default_factory=EventLog)
    synth_attempt: int = 0
    synth_idle: int = 0
    last_trace: Optional[C.TraceResult] = None
    t0: float = field(default_factory=time.monotonic)

    @property
    def n_sites(self) -> int:
        return len(self.program.branch_sites)

    @property
    def signature(self) -> list:
        return self.program.signature

    def elapsed_ms(self) -> float:
        return (time.monotonic() - self.t0) * 1000.0

    def has_budget(self) -> bool:
        b = self.config.budget
        if self.tallies["work_units"] >= b.max_iterations:
            return False
        if b.max_wallclock_ms is not None and self.elapsed_ms() >= b.max_wallclock_ms:
            return False
        return True

    def spend(self) -> None:
        self.tallies["work_units"] += 1

    def open_frontiers(self) -> List[C.Frontier]:
        return [f for f in self.store.frontiers.values() if f.status == "pending"]


def coverage(state: EngineState):
    """(branch coverage fraction, distinct path count); 0 sites counts as full."""
    cov = 1.0 if state.n_sites == 0 else len(state.covered) / (2 * state.n_sites)
    return cov, len(state.paths)


def _curve_point(state: EngineState) -> None:
    cov, _ = coverage(state)
    if state.curve and state.curve[-1]["branch_coverage"] == cov:
        return
    state.curve.append({
        "iteration": state.tallies["work_units"],
        "wallclock_ms": round(state.elapsed_ms(), 3),
        "branch_coverage": cov,
    })


def new_state(program: ast.Program, config: CampaignConfig, client: Optional[GuidanceClient] = None) -> EngineState:
    state = EngineState(program, config, analyze(program), client)
    state.curve.append({"iteration": 0, "wallclock_ms": 0.0, "branch_coverage": coverage(state)[0]})
    return state


# ------------------------------------------------------------------ admission

def admit(state: EngineState, inp: dict, target: Optional[C.Frontier] = None, origin: str = "seed") -> C.TraceResult:
    """Execute ``inp`` concretely and book only what the real trace shows."""
    inp = C.validate_input(state.program, inp, state.config.domains.str_max)
    state.spend()
    state.tallies["executions"] += 1
    trace = C.concolic_execute(state.program, inp, state.config.exec_limits)
    state.last_trace = trace
    new_dirs = sorted(d for d in trace.covered_directions if d[0] >= 0 and d not in state.covered)
    state.covered.update(new_dirs)
    state.observed |= trace.covered_directions
    new_path = trace.path.path_id not in state.paths
    state.paths.add(trace.path.path_id)

    hit = False
    retired = []
    for pid in trace.path.prefix_ids:
        fr = state.targets.get(pid)
        if fr is None or fr.status not in ("pending", "unsat", "unknown"):
            continue
        if target is not None and fr is target:
            fr.status = "solved"
            hit = True
            state.tallies["targets_solved"] += 1
        else:
            fr.status = "retired"
            retired.append(fr.id)
    state.tallies["frontiers_retired"] += len(retired)

    fresh = state.store.frontier_of(trace, state.tallies["work_units"])
    for f in fresh:
        state.targets[f.target_id] = f
    state.tallies["frontiers_created"] += len(fresh)

    key = str(trace.verdict)
    if trace.verdict.is_finding and key not in state.finding_keys:
        state.finding_keys.add(key)
        state.findings.append({"verdict": key, "input": dict(inp), "iteration": state.tallies["work_units"]})

    state.events.emit(
        "execute",
        origin=origin,
        input=inp,
        path_id=trace.path.path_id,
        verdict=key,
        covered=sorted([s, d] for s, d in trace.covered_directions),
        new_directions=[list(d) for d in new_dirs],
        new_path=new_path,
        target=None if target is None else target.id,
        target_hit=hit,
        retired=retired,
        new_frontiers=[f.id for f in fresh],
    )
    _curve_point(state)
    return trace


# ------------------------------------------------------------------ selection

def _default_order(frontiers):
    # newest first: the last trace's deepest flips lead, which makes the search depth-first
    return sorted(frontiers, key=lambda f: -f.id)


def _frontier_payload(state: EngineState, f: C.Frontier) -> dict:
    return {
        "frontier_id": f.id,
        "site": f.site,
        "depth": f.depth,
        "flip_smtlib": expr_to_smtlib(f.flip.constraint, state.config.domains.str_max),
        "uncovered_direction_count": state.static.uncovered_behind(f.site, f.direction, state.observed),
    }


def _path_payload(state: EngineState) -> list:
    if state.last_trace is None:
        return []
    atoms = state.last_trace.path.atoms[-PROMPT_PATH_ATOMS:]
    return [expr_to_smtlib(a.constraint, state.config.domains.str_max) for a in atoms]


def select_batch(state: EngineState) -> List[C.Frontier]:
    """Pick up to batch_size frontiers, let the oracle rank them, queue the ranking."""
    batch = _default_order(state.open_frontiers())[: state.config.batch_size]
    if not batch:
        return []
    order = [f.id for f in batch]
    if state.client is not None:
        req = GuidanceRequest("prioritize", state.program.source_text, {
            "frontiers": [_frontier_payload(state, f) for f in batch],
            "path_condition": _path_payload(state),
        })
        resp = state.client.ask(req)
        state.events.emit("prioritize", batch=order, valid=resp.valid, ranking=list(resp.ranking))
        if resp.valid:
            ranked = list(resp.ranking)
            order = ranked + [i for i in order if i not in set(ranked)]
    else:
        state.events.emit("prioritize", batch=order, valid=False, ranking=[])
    state.ranked = deque(order)
    return [state.store.frontiers[i] for i in order]


def _next_frontier(state: EngineState) -> Optional[C.Frontier]:
    while True:
        while state.ranked:
            f = state.store.frontiers[state.ranked.popleft()]
            if f.status == "pending":
                return f
        if not select_batch(state):
            return None


# ------------------------------------------------------------------ solving

def _solve(state: EngineState, constraints, frontier: C.Frontier, kind: str) -> Verdict:
    cfg = state.config
    state.spend()
    state.tallies["solver_invocations"] += 1
    query = Query.of(
        constraints,
        variables=state.signature,
        domains=cfg.domains,
        budget=Budget(cfg.solver_nodes, cfg.solver_timeout_ms),
    )
    if cfg.solver_external_cmd:
        try:
            timeout_s = (cfg.solver_timeout_ms or 30_000) / 1000.0
            verdict = solve_external(query, cfg.solver_external_cmd, timeout_s)
        except ExternalSolverError as exc:
            state.events.emit("solver_error", frontier=frontier.id, message=str(exc))
            verdict = Verdict("UNKNOWN", reason="unsupported")
    else:
        verdict = solve(query)
    if verdict.is_sat:
        state.tallies["solver_sat"] += 1
    elif verdict.status == "UNSAT":
        state.tallies["solver_unsat"] += 1
    elif verdict.is_timeout:
        state.tallies["solver_timeouts"] += 1
    else:
        state.tallies["solver_unsupported"] += 1
    state.events.emit(
        "solve", frontier=frontier.id, query=kind, atoms=len(constraints),
        status=verdict.status, reason=verdict.reason,
    )
    return verdict


def _merged(parent: dict, model: dict) -> dict:
    out = dict(parent)
    out.update(model)
    return out


def _failing_index(constraints, status: str) -> int:
    # a refutation always involves the flip; a timeout is blamed on the last nonlinear atom
    last = len(constraints) - 1
    if status == "UNSAT" or constraints[last].nonlinear:
        return last
    for i in range(last - 1, -1, -1):
        if constraints[i].nonlinear:
            return i
    return last


def _mutate(state: EngineState, f: C.Frontier, constraints, verdict: Verdict) -> bool:
    """Ask for edits and try them in order; True only if the first satisfiable edit flips the target."""
    names = [n for n, _ in state.signature]
    idx = _failing_index(constraints, verdict.status)
    pos = state.static.site_pos.get(f.site, (0, 0))
    str_max = state.config.domains.str_max
    req = GuidanceRequest("mutate", state.program.source_text, {
        "atoms": [expr_to_smtlib(c, str_max) for c in constraints],
        "failing_atom_index": idx,
        "atom_info": [atom_info(c, names) for c in constraints],
        "code_context": code_context(state.program, pos[0]),
        "concrete": f.parent_input,
        "signature": [list(p) for p in state.signature],
        "status": verdict.status,
        "str_max": str_max,
        "uncovered_direction_count": state.static.uncovered_behind(f.site, f.direction, state.observed),
    })
    state.tallies["mutation_requests"] += 1
    resp = state.client.ask(req)
    state.events.emit("mutate", frontier=f.id, valid=resp.valid, edits=[str(e) for e in resp.edits])
    for edit in resp.edits:
        if not state.has_budget():
            return True
        mutated = apply_edit(list(constraints), edit)
        if mutated is None:
            state.events.emit("edit_skipped", frontier=f.id, edit=str(edit))
            continue
        state.tallies["mutation_solves"] += 1
        v = _solve(state, mutated, f, "mutated")
        if v.is_sat:
            if state.has_budget():
                admit(state, _merged(f.parent_input, v.model), f, origin="mutation")
                if f.status == "solved":
                    state.tallies["mutation_hits"] += 1
                    return True
            return False
    return False


def _synthesize(state: EngineState, target: Optional[C.Frontier]) -> bool:
    st = state.static
    req = GuidanceRequest("synthesize", state.program.source_text, {
        "signature": [list(p) for p in state.signature],
        "covered_directions": sorted([s, d] for s, d in state.covered),
        "int_constants": st.int_constants,
        "str_constants": st.str_constants,
        "str_max": state.config.domains.str_max,
        "attempt": state.synth_attempt,
    })
    state.synth_attempt += 1
    resp = state.client.ask(req)
    state.events.emit("synthesize", target=None if target is None else target.id, valid=resp.valid)
    if not resp.valid or not state.has_budget():
        return False
    try:
        inp = C.validate_input(state.program, resp.input, state.config.domains.str_max)
    except C.InputError as exc:
        state.events.emit("synthesis_rejected", message=str(exc))
        return False
    state.tallies["synthesis_runs"] += 1
    before = len(state.paths)
    admit(state, inp, target, origin="synthesis")
    return len(state.paths) > before


def step(state: EngineState) -> bool:
    """One loop iteration; False when nothing is left to try."""
    cfg = state.config
    if not state.has_budget():
        return False
    state.tallies["steps"] += 1
    f = _next_frontier(state)
    if f is None:
        if cfg.synthesis and state.client is not None and state.synth_idle < SYNTH_PATIENCE:
            progressed = _synthesize(state, None)
            state.synth_idle = 0 if progressed else state.synth_idle + 1
            return True
        state.tallies["steps"] -= 1
        return False
    constraints = [a.constraint for a in f.query_atoms()]
    v = _solve(state, constraints, f, "frontier")
    if v.is_sat:
        if state.has_budget():
            admit(state, _merged(f.parent_input, v.model), f, origin="solve")
        if f.status == "pending":
            f.status = "unknown"  # the model ran but the trace took another way
        return True
    f.status = "unsat" if v.status == "UNSAT" else "unknown"
    if cfg.mutation and state.client is not None and state.has_budget():
        if _mutate(state, f, constraints, v):
            return True
    if cfg.synthesis and state.client is not None and state.has_budget():
        if _synthesize(state, f):
            state.synth_idle = 0
    return True


# ------------------------------------------------------------------ campaigns

def build_client(config: CampaignConfig) -> GuidanceClient:
    oc = config.oracle
    try:
        oracle = make_oracle(oc.kind, endpoint=oc.endpoint, transcript_path=oc.transcript_path,
                             lenient=oc.lenient, model=oc.model, timeout_s=oc.timeout_s)
    except (ValueError, OSError) as exc:
        raise ConfigError(str(exc)) from exc
    cache_path = oc.cache_path
    if cache_path is None and oc.kind == "remote" and os.environ.get(CACHE_DIR_ENV):
        cache_path = os.path.join(os.environ[CACHE_DIR_ENV], "responses.jsonl")
    cache = ResponseCache(cache_path) if cache_path else ResponseCache()
    transcript = Transcript(oracle=oracle.name) if oc.record_path else None
    return GuidanceClient(oracle, cache, transcript)


def seed_inputs(program: ast.Program, config: CampaignConfig) -> List[dict]:
    if config.seeds:
        return [dict(s) for s in config.seeds]
    return [C.default_input(program)]


def run_engine(program: ast.Program, config: CampaignConfig, client: Optional[GuidanceClient] = None) -> EngineState:
    config = config.effective()
    if client is None:
        client = build_client(config)
    state = new_state(program, config, client)
    for s in seed_inputs(program, config):
        if not state.has_budget():
            break
        admit(state, s, None, origin="seed")
    while step(state):
        pass
    return state
