"""Comparison strategies: uniform random, a genetic algorithm, classic concolic.

All of them book coverage through :func:`llmc.engine.core.admit`, so every
strategy pays one work unit per execution and is measured the same way.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, replace
from typing import List, Optional

from . import symbolic as S
from .concolic import ALPHABET_HI, ALPHABET_LO, TraceResult
from .engine.config import CampaignConfig, GaConfig
from .engine.core import EngineState, admit, new_state, seed_inputs
from .lang import ast


# ------------------------------------------------------------------ random

def random_input(program: ast.Program, config: CampaignConfig, rng: random.Random) -> dict:
    dom = config.domains
    out = {}
    for name, ty in program.signature:
        if ty == ast.INT:
            lo, hi = dom.int_bounds(name)
            out[name] = rng.randint(lo, hi)
        elif ty == ast.BOOL:
            out[name] = rng.random() < 0.5
        else:
            n = rng.randint(0, dom.str_max)
            out[name] = "".join(chr(rng.randint(ALPHABET_LO, ALPHABET_HI)) for _ in range(n))
    return out


def _run_random(program: ast.Program, config: CampaignConfig) -> EngineState:
    state = new_state(program, config)
    rng = random.Random(config.rng_seed)
    for s in seed_inputs(program, config):
        if state.has_budget():
            admit(state, s, origin="seed")
    while state.has_budget():
        state.tallies["steps"] += 1
        admit(state, random_input(program, config, rng), origin="random")
    return state


# ------------------------------------------------------------------ branch distance

def distance(expr: S.SymExpr, want: bool, env: dict) -> float:
    """How far ``env`` is from making ``expr`` evaluate to ``want`` (0 when it does)."""
    k = expr.kind
    if k == S.NOT:
        return distance(expr.args[0], not want, env)
    if k == S.AND:
        a, b = expr.args
        if want:
            return distance(a, True, env) + distance(b, True, env)
        return min(distance(a, False, env), distance(b, False, env))
    if k == S.OR:
        a, b = expr.args
        if want:
            return min(distance(a, True, env), distance(b, True, env))
        return distance(a, False, env) + distance(b, False, env)
    if k == S.CMP:
        x = S.evaluate(expr.args[0], env)
        y = S.evaluate(expr.args[1], env)
        op = expr.value
        if not want:
            op = {"==": "!=", "!=": "==", "<": ">=", "<=": ">", ">": "<=", ">=": "<"}[op]
        if op == "==":
            return abs(x - y)
        if op == "!=":
            return 0 if x != y else 1
        if op == "<":
            return 0 if x < y else x - y + 1
        if op == "<=":
            return 0 if x <= y else x - y
        if op == ">":
            return 0 if x > y else y - x + 1
        return 0 if x >= y else y - x
    if k == S.STREQ:
        x = S.evaluate(expr.args[0], env)
        y = S.evaluate(expr.args[1], env)
        if not want:
            return 0 if x != y else 1
        d = abs(len(x) - len(y)) * 128
        d += sum(abs(ord(p) - ord(q)) for p, q in zip(x, y))
        return d
    return 0 if bool(S.evaluate(expr, env)) == want else 1


def normalized(d: float) -> float:
    return d / (d + 1.0)


def fitness(trace: TraceResult, covered: set) -> float:
    """Directions the trace covers, plus closeness credit toward uncovered flips."""
    score = float(len([d for d in trace.covered_directions if d[0] >= 0]))
    best = {}
    for atom in trace.path.atoms:
        if atom.site < 0 or (atom.site, not atom.direction) in covered or not atom.flippable:
            continue
        d = distance(atom.expr, not atom.direction, trace.input)
        key = (atom.site, not atom.direction)
        if key not in best or d < best[key]:
            best[key] = d
    for d in best.values():
        score += 1.0 - normalized(d)
    return score


# ------------------------------------------------------------------ genetic algorithm

@dataclass
class Individual:
    genes: dict
    trace: Optional[TraceResult] = None
    fit: float = 0.0


def _mutate_gene(name, ty, value, config: CampaignConfig, ga: GaConfig, rng: random.Random):
    dom = config.domains
    if ty == ast.INT:
        lo, hi = dom.int_bounds(name)
        if rng.random() < 0.5:
            step = rng.randint(1, ga.max_step) * (1 if rng.random() < 0.5 else -1)
            return min(hi, max(lo, value + step))
        return rng.randint(lo, hi)
    if ty == ast.BOOL:
        return not value
    chars = list(value)
    if chars and rng.random() < 0.5:
        i = rng.randrange(len(chars))
        chars[i] = chr(rng.randint(ALPHABET_LO, ALPHABET_HI))
    elif len(chars) < dom.str_max and (not chars or rng.random() < 0.5):
        chars.insert(rng.randint(0, len(chars)), chr(rng.randint(ALPHABET_LO, ALPHABET_HI)))
    elif chars:
        del chars[rng.randrange(len(chars))]
    return "".join(chars)


def _tournament(pop: List[Individual], ga: GaConfig, rng: random.Random) -> Individual:
    picks = [pop[rng.randrange(len(pop))] for _ in range(ga.tournament_size)]
    return max(picks, key=lambda ind: ind.fit)


def _evaluate(state: EngineState, ind: Individual, origin: str) -> bool:
    if not state.has_budget():
        return False
    ind.trace = admit(state, ind.genes, origin=origin)
    return True


def _rescore(pop: List[Individual], covered: set) -> None:
    for ind in pop:
        if ind.trace is not None:
            ind.fit = fitness(ind.trace, covered)


def _run_ga(program: ast.Program, config: CampaignConfig) -> EngineState:
    ga = config.ga
    state = new_state(program, config)
    rng = random.Random(config.rng_seed)
    sig = program.signature
    seeds = seed_inputs(program, config)
    pop = [Individual(dict(s)) for s in seeds[: ga.population_size]]
    while len(pop) < ga.population_size:
        pop.append(Individual(random_input(program, config, rng)))
    for i, ind in enumerate(pop):
        if not _evaluate(state, ind, "seed" if i < len(seeds) else "ga"):
            break
    pop = [ind for ind in pop if ind.trace is not None]
    while state.has_budget() and pop:
        state.tallies["steps"] += 1
        _rescore(pop, state.covered)
        pop.sort(key=lambda ind: -ind.fit)
        nxt = [Individual(dict(e.genes), e.trace, e.fit) for e in pop[: ga.elitism]]
        children = []
        while len(nxt) + len(children) < ga.population_size:
            p1, p2 = _tournament(pop, ga, rng), _tournament(pop, ga, rng)
            g1, g2 = dict(p1.genes), dict(p2.genes)
            if len(sig) > 1 and rng.random() < ga.crossover_rate:
                cut = rng.randint(1, len(sig) - 1)
                for name, _ in sig[cut:]:
                    g1[name], g2[name] = g2[name], g1[name]
            for g in (g1, g2):
                for name, ty in sig:
                    if rng.random() < ga.mutation_rate:
                        g[name] = _mutate_gene(name, ty, g[name], config, ga, rng)
                children.append(Individual(g))
        children = children[: ga.population_size - len(nxt)]
        for child in children:
            if not _evaluate(state, child, "ga"):
                break
        pop = nxt + [c for c in children if c.trace is not None]
    return state


# ------------------------------------------------------------------ entry points

def run_baseline_state(program: ast.Program, config: CampaignConfig) -> EngineState:
    if config.strategy == "random":
        return _run_random(program, config)
    if config.strategy == "ga":
        return _run_ga(program, config)
    raise ValueError(f"not a baseline strategy: {config.strategy}")


def run_random(config: CampaignConfig, program: Optional[ast.Program] = None):
    from .engine.report import run_campaign

    return run_campaign(replace(config, strategy="random"), program)


def run_ga(config: CampaignConfig, ga: Optional[GaConfig] = None, program: Optional[ast.Program] = None):
    from .engine.report import run_campaign

    cfg = replace(config, strategy="ga", ga=ga or config.ga)
    return run_campaign(cfg, program)


def run_classic_concolic(config: CampaignConfig, program: Optional[ast.Program] = None):
    from .engine.report import run_campaign

    return run_campaign(replace(config, strategy="concolic"), program)
