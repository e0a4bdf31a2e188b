"""Command-line front end: ``qilent analyze | simulate | check``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import qil
from .analysis import AnalysisConfig, AnalysisError, analyze
from .concrete import (
    DENSITY_LIMIT,
    ENSEMBLE_LIMIT,
    Ensemble,
    SimConfig,
    SimReport,
    sem_density,
    sem_ensemble,
)
from .domain import Assignment, InvariantError, top, zeros
from .soundness import GenConfig, soundness_suite

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_TOO_BIG = 0, 1, 2, 3
DENSITY_DUMP_LIMIT = 6


class UsageError(Exception):
    pass


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True)


def _num(x: float) -> float:
    return round(float(x), 12) + 0.0


def _complex(z) -> list[float]:
    return [_num(z.real), _num(z.imag)]


def _load_program(path: str) -> qil.Program:
    try:
        source = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(str(exc)) from exc
    return qil.parse(source)


# analyze -------------------------------------------------------------------

def _start(init: str, n: int) -> Assignment:
    if init == "top":
        return top(n)
    if init == "zeros":
        return zeros(n)
    try:
        return Assignment.from_json(Path(init).read_text(encoding="utf-8"))
    except (OSError, ValueError, KeyError, TypeError, InvariantError) as exc:
        raise UsageError(f"cannot read start assignment {init}: {exc}") from exc


def cmd_analyze(args) -> int:
    program = _load_program(args.file)
    config = AnalysisConfig(domain=args.domain, trace=args.trace, strict_paper=args.strict_paper)
    start = _start(args.init, program.n_qubits)
    try:
        final, trace = analyze(program, start, config)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.format == "json":
        out = {"domain": args.domain, "result": final.to_dict()}
        if args.trace:
            out["trace"] = [{"point": p, "assignment": a.to_dict()} for p, a in trace]
        print(_dumps(out))
    else:
        for point, a in trace:
            print(f"{point}: {a}")
        print(final)
        print(final.render())
    return EXIT_OK


# simulate --------------------------------------------------------------------

def _amplitudes(path: str, n: int) -> np.ndarray:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read state {path}: {exc}") from exc
    if isinstance(data, dict):
        data = data.get("amplitudes")
    try:
        v = np.array([complex(a[0], a[1]) if isinstance(a, list) else complex(a) for a in data])
    except (TypeError, ValueError, IndexError) as exc:
        raise UsageError(f"state {path}: amplitudes must be numbers or [re, im] pairs") from exc
    if v.size != 2**n:
        raise UsageError(f"state {path} has {v.size} amplitudes, expected {2**n}")
    norm = np.linalg.norm(v)
    if norm == 0:
        raise UsageError(f"state {path} is the zero vector")
    return v / norm


def cmd_simulate(args) -> int:
    program = _load_program(args.file)
    n = program.n_qubits
    limit = DENSITY_LIMIT if args.mode == "density" else ENSEMBLE_LIMIT
    if n > limit:
        print(f"error: {n} qubits exceeds the {args.mode} limit of {limit}", file=sys.stderr)
        return EXIT_TOO_BIG
    sim = SimConfig() if args.max_iter is None else SimConfig(max_while_iters=args.max_iter)
    report = SimReport()
    start = Ensemble.zeros(n) if args.state == "zeros" else Ensemble.pure(_amplitudes(args.state, n))
    out = {"qubits": n, "mode": args.mode}
    if args.mode == "density":
        rho = sem_density(program, start.mix(), sim, report)
        out["trace"] = _num(np.trace(rho).real)
        if n <= DENSITY_DUMP_LIMIT:
            out["entries"] = [[_complex(z) for z in row] for row in rho]
        else:
            out["diagonal"] = [_num(x) for x in np.diag(rho).real]
    else:
        e = sem_ensemble(program, start, sim, report)
        out["branches"] = [
            {"weight": _num(w), "amplitudes": [_complex(z) for z in v]} for w, v in e.branches
        ]
        out["discarded_mass"] = _num(e.discarded_mass)
    out["residual_trace"] = _num(report.residual_trace)
    out["truncated_loops"] = report.truncated_loops
    if report.warning:
        out["warning"] = report.warning
        print(f"warning: {report.warning}", file=sys.stderr)
    print(_dumps(out))
    return EXIT_OK


# check -------------------------------------------------------------------------

def cmd_check(args) -> int:
    domains = ("c", "e") if args.domain == "both" else (args.domain,)
    program = None if args.file == "-" else _load_program(args.file)
    n = program.n_qubits if program else args.qubits
    if n > DENSITY_LIMIT:
        print(f"error: {n} qubits exceeds the density limit of {DENSITY_LIMIT}", file=sys.stderr)
        return EXIT_TOO_BIG
    # with a fixed program the generator size is unused
    size = min(n, 4) if program else n
    try:
        cfg = GenConfig(seed=args.seed, n_qubits=size, max_depth=args.depth)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    report = soundness_suite(cfg, args.cases, domains, program=program)
    if report["hard_failures"]:
        Path(args.dump).write_text(_dumps(report["counterexamples"]) + "\n", encoding="utf-8")
        report["dump"] = args.dump
        print(f"{report['hard_failures']} hard failure(s); counterexamples written to {args.dump}", file=sys.stderr)
    print(_dumps(report))
    return EXIT_FAIL if report["hard_failures"] else EXIT_OK


# entry point -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qilent", description="Entanglement analysis for QIL programs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="abstract interpretation of a program")
    p.add_argument("file", help="QIL source, or - for stdin")
    p.add_argument("--domain", choices=("c", "e"), default="e")
    p.add_argument("--init", default="top", help="top, zeros, or a JSON assignment file")
    p.add_argument("--trace", action="store_true", help="include a snapshot after every statement")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--strict-paper", action="store_true", help="keep merged CX blocks unsplit")
    p.set_defaults(run=cmd_analyze)

    p = sub.add_parser("simulate", help="run the concrete semantics")
    p.add_argument("file")
    p.add_argument("--state", default="zeros", help="zeros, or a JSON file of amplitudes")
    p.add_argument("--mode", choices=("density", "ensemble"), default="density")
    p.add_argument("--max-iter", type=int, default=None, help="iteration cap for while loops")
    p.set_defaults(run=cmd_simulate)

    p = sub.add_parser("check", help="randomized soundness check")
    p.add_argument("file", help="QIL source, or - for random programs")
    p.add_argument("--domain", choices=("c", "e", "both"), default="both")
    p.add_argument("--cases", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--qubits", type=int, default=3, help="qubits of random programs")
    p.add_argument("--depth", type=int, default=8, help="statements of random programs")
    p.add_argument("--dump", default="qilent-counterexamples.json")
    p.set_defaults(run=cmd_check)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except qil.ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except AnalysisError as exc:
        print(f"analysis error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
