"""Command-line entry point.

Exit codes: 0 success, 1 findings present, 2 usage or configuration error,
3 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
import traceback
from pathlib import Path
from typing import List, Optional

from . import __version__
from .bench import FORMATS, ManifestError, compare, emit, load_suite, text_table
from .concolic import concolic_execute, dump_trace
from .engine import ORACLE_KINDS, STRATEGIES, CampaignConfig, ConfigError, run_campaign
from .guidance import TranscriptError
from .guidance.oracles import TranscriptMiss
from .lang import MiniLangError, branch_inventory, load_file
from .util import atomic_write_text

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

EXIT_OK, EXIT_FINDINGS, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    """Bad flags or configuration; maps to exit 2."""


# ---- configuration

def _merge(base: dict, over: dict) -> dict:
    out = dict(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = v
    return out


def read_config_file(path) -> dict:
    """TOML config; tables and dotted keys map onto CampaignConfig fields."""
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror or exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise UsageError(f"config {path}: {exc}") from None


def build_config(args, **forced) -> CampaignConfig:
    """Defaults, then the config file, then explicit flags, then ``forced``."""
    doc = CampaignConfig().to_json()
    if getattr(args, "config", None):
        doc = _merge(doc, read_config_file(args.config))
    flags: dict = {}
    if getattr(args, "program", None):
        flags["program"] = str(args.program)
    if getattr(args, "strategy", None):
        flags["strategy"] = args.strategy
    if getattr(args, "seed", None) is not None:
        flags["rng_seed"] = args.seed
    budget = {}
    if getattr(args, "budget", None) is not None:
        budget["max_iterations"] = args.budget
    if getattr(args, "wallclock_ms", None) is not None:
        budget["max_wallclock_ms"] = args.wallclock_ms
    if budget:
        flags["budget"] = budget
    oracle = {}
    for flag, key in (("oracle", "kind"), ("endpoint", "endpoint"), ("transcript", "transcript_path"),
                      ("record", "record_path"), ("cache", "cache_path")):
        val = getattr(args, flag, None)
        if val is not None:
            oracle[key] = str(val)
    if getattr(args, "lenient", False):
        oracle["lenient"] = True
    if oracle:
        flags["oracle"] = oracle
    doc = _merge(doc, flags)
    doc = _merge(doc, forced)
    try:
        return CampaignConfig.from_json(doc)
    except TypeError as exc:
        raise UsageError(f"bad configuration: {exc}") from None


def _positive(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {v}")
    return v


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {v}")
    return v


def _existing_file(text: str) -> Path:
    p = Path(text)
    if not p.is_file():
        raise UsageError(f"no such file: {text}")
    return p


# ---- subcommands

def _write(path, text: str) -> None:
    atomic_write_text(path, text)


def _dump_traces(report, program, config: CampaignConfig, path) -> int:
    """Re-execute one input per distinct path and write the traces as JSON lines."""
    seen, lines = set(), []
    for ev in report.events or ():
        if ev["event"] != "execute" or ev["path_id"] in seen:
            continue
        seen.add(ev["path_id"])
        trace = concolic_execute(program, ev["input"], config.exec_limits)
        lines.append(json.dumps(dump_trace(trace, config.domains.str_max), sort_keys=True))
    _write(path, "".join(line + "\n" for line in lines))
    return len(lines)


def _campaign(args, config: CampaignConfig) -> int:
    program = _load_program(config.program)
    try:
        report = run_campaign(config, program)
    except TranscriptMiss as exc:
        raise UsageError(f"{exc} (rerun with --lenient to fall back to the heuristic oracle)") from None
    text = report.dumps()
    if args.report:
        _write(args.report, text)
    if args.event_log:
        _write(args.event_log, "".join(json.dumps(e, sort_keys=True) + "\n" for e in report.events or ()))
    if getattr(args, "dump_traces", None):
        _dump_traces(report, program, config, args.dump_traces)
    out = sys.stdout if args.report else sys.stderr
    if not args.report:
        sys.stdout.write(text)
    print(f"{report.program}: {report.strategy} covered {report.covered_directions}/{2 * report.branch_sites} "
          f"directions ({report.branch_coverage:.1%}), {report.path_count} paths, "
          f"{report.tallies['work_units']} work units", file=out)
    for f in report.findings:
        print(f"finding: {f['verdict']} input={json.dumps(f['input'], sort_keys=True)}", file=out)
    misses = report.oracle.get("replay_misses", 0)
    if misses:
        print(f"warning: {misses} request(s) missing from the transcript; answered by the heuristic oracle",
              file=sys.stderr)
    return EXIT_FINDINGS if report.findings else EXIT_OK


def _load_program(path: str):
    try:
        return load_file(path)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror or exc}") from None
    except MiniLangError as exc:
        raise UsageError(exc.render(path)) from None


def cmd_run(args) -> int:
    _existing_file(args.program)
    return _campaign(args, build_config(args))


def cmd_replay(args) -> int:
    _existing_file(args.program)
    _existing_file(args.transcript)
    config = build_config(args, oracle={"kind": "replay", "transcript_path": str(args.transcript),
                                        "lenient": bool(args.lenient)})
    if config.strategy != "llmc":
        raise UsageError("replay only applies to the llmc strategy")
    return _campaign(args, config)


def cmd_check(args) -> int:
    _existing_file(args.program)
    program = _load_program(args.program)
    sites = branch_inventory(program)
    print(f"{args.program}: ok, {len(sites)} branch site(s), entry {program.entry}"
          f"({', '.join(f'{n}: {t}' for n, t in program.signature)})")
    for s in sites:
        line, col = s.source_span
        print(f"  site {s.id:3d}  {s.kind:<5}  {s.function}  {line}:{col}")
    return EXIT_OK


def cmd_bench_list(args) -> int:
    suite = load_suite(args.suite)
    if args.json:
        root = Path(suite.path).parent if suite.path else None
        print(json.dumps([e.to_json(root) for e in suite], indent=2))
        return EXIT_OK
    for e in suite:
        paths = "-" if e.feasible_paths is None else str(e.feasible_paths)
        print(f"{e.name:<10} {e.category:<17} sites={e.branch_sites:<3} paths={paths:<5} budget={e.budget}")
        if args.verbose:
            print(f"    {e.description}")
    return EXIT_OK


def cmd_compare(args) -> int:
    strategies = [s.strip() for s in args.strategies.split(",") if s.strip()]
    bad = [s for s in strategies if s not in STRATEGIES]
    if not strategies or bad:
        raise UsageError(f"--strategies must list some of {', '.join(STRATEGIES)}")
    formats = [f.strip() for f in args.format.split(",") if f.strip()]
    if any(f not in FORMATS for f in formats):
        raise UsageError(f"--format must list some of {', '.join(FORMATS)}")
    if not 0 < args.threshold <= 1:
        raise UsageError("--threshold must be in (0, 1]")
    suite = load_suite(args.suite)
    if args.programs:
        suite = suite.select(p.strip() for p in args.programs.split(",") if p.strip())
    base = build_config(args)
    report = compare(suite, strategies, budget=args.budget, rng_seed=base.rng_seed, base=base,
                     threshold=args.threshold, jobs=args.jobs)
    if args.out:
        for fmt, path in emit(report, args.out, formats).items():
            print(f"wrote {path}", file=sys.stderr)
    sys.stdout.write(text_table(report))
    for c in report.failures:
        print(f"error: {c.program}/{c.strategy}: {c.error}", file=sys.stderr)
    if report.failures:
        return EXIT_INTERNAL
    return EXIT_FINDINGS if any(c.findings for c in report.cells) else EXIT_OK


# ---- parser

def _campaign_flags(p: argparse.ArgumentParser, with_oracle: bool = True) -> None:
    p.add_argument("--budget", type=_positive, help="work units per campaign (executions plus solver calls)")
    p.add_argument("--wallclock-ms", type=_positive_float, help="also stop after this many milliseconds")
    p.add_argument("--seed", type=int, help="rng seed")
    p.add_argument("--config", help="TOML config file; flags override it")
    if with_oracle:
        p.add_argument("--oracle", choices=ORACLE_KINDS, help="guidance oracle for the llmc strategy")
        p.add_argument("--endpoint", help="URL of the remote oracle")
        p.add_argument("--cache", help="persistent response cache (JSON lines)")
        p.add_argument("--record", help="write a replayable transcript of oracle traffic")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="llmc", description="Concolic testing for MiniLang programs.")
    ap.add_argument("--version", action="version", version=f"llmc {__version__}")
    sub = ap.add_subparsers(dest="command", metavar="command")
    sub.required = True

    p = sub.add_parser("run", help="run one campaign on a program")
    p.add_argument("program")
    p.add_argument("--strategy", choices=STRATEGIES)
    _campaign_flags(p)
    p.add_argument("--transcript", help="transcript for --oracle replay")
    p.add_argument("--lenient", action="store_true", help="fall back to the heuristic oracle on transcript misses")
    p.add_argument("--report", help="write the JSON report here instead of stdout")
    p.add_argument("--event-log", help="write the engine event log (JSON lines)")
    p.add_argument("--dump-traces", help="write one trace per distinct path (JSON lines)")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("replay", help="rerun a recorded llmc campaign from its transcript")
    p.add_argument("program")
    p.add_argument("--transcript", required=True)
    p.add_argument("--lenient", action="store_true", help="fall back to the heuristic oracle on transcript misses")
    _campaign_flags(p, with_oracle=False)
    p.add_argument("--report", help="write the JSON report here instead of stdout")
    p.add_argument("--event-log", help="write the engine event log (JSON lines)")
    p.add_argument("--dump-traces", help="write one trace per distinct path (JSON lines)")
    p.set_defaults(func=cmd_replay, strategy=None)

    p = sub.add_parser("compare", help="run several strategies over the benchmark suite")
    p.add_argument("--strategies", default="llmc,concolic,ga,random", help="comma-separated list")
    p.add_argument("--programs", help="comma-separated subset of the suite")
    p.add_argument("--suite", help="manifest path (default: the bundled suite)")
    _campaign_flags(p)
    p.add_argument("--threshold", type=float, default=0.8, help="coverage level for time-to-coverage")
    p.add_argument("--jobs", type=_positive, default=1, help="parallel campaign processes")
    p.add_argument("--out", help="directory for the emitted reports")
    p.add_argument("--format", default=",".join(FORMATS), help="comma-separated: json, csv, plotdata")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("check", help="parse, typecheck and list branch sites")
    p.add_argument("program")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("bench-list", help="list the benchmark suite")
    p.add_argument("--suite", help="manifest path (default: the bundled suite)")
    p.add_argument("--json", action="store_true")
    p.add_argument("-v", "--verbose", action="store_true", help="include descriptions")
    p.set_defaults(func=cmd_bench_list)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse: 0 for --help, 2 for bad flags
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, ConfigError, ManifestError, TranscriptError) as exc:
        print(f"llmc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KeyboardInterrupt:
        print("llmc: interrupted", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception:
        print("llmc: internal error", file=sys.stderr)
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
