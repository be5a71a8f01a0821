"""Command-line entry point.

Exit codes: 0 when the property holds (resilient, feasible, delivered, satisfiable,
witness confirmed), 10 when it fails (counterexample, infeasible, loop,
unsatisfiable, witness rejected), 2 for input or usage errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .errors import FrrError
from .formats import (
    parse_certificate,
    parse_dimacs,
    parse_graph,
    parse_instance,
    serialize_certificate,
    serialize_instance,
)
from .gadgets import gen_ideal_gadget, gen_perfect_gadget, sat_bruteforce
from .model import Graph, Link, check_failures
from .oblivious import LongCycleWitness, synth_oblivious, verify_oblivious
from .sim import route
from .verify import IDEAL, PERFECT, check_counterexample, verify_ideal, verify_perfect, witness_problem

OK, FAILS, USAGE = 0, 10, 2

log = logging.getLogger("frr")


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text(encoding="utf-8")


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _node(g: Graph, text: str):
    if text in g:
        return text
    try:
        if int(text) in g:
            return int(text)
    except ValueError:
        pass
    raise UsageError(f"unknown node {text!r}")


def _failures(g: Graph, spec: str | None) -> frozenset:
    if not spec:
        return frozenset()
    links = []
    for item in spec.split(","):
        item = item.strip()
        if not item:
            continue
        parts = item.split(":")
        if len(parts) != 2:
            raise UsageError(f"failed link {item!r} must be written u:v")
        links.append(Link.of(_node(g, parts[0]), _node(g, parts[1])))
    return check_failures(g, links)


def _fmt_links(links) -> str:
    return " ".join(str(e) for e in sorted(links)) or "(none)"


def _report(verdict, cert_path: str | None) -> int:
    if verdict.resilient:
        print("resilient")
        return OK
    cex = verdict.counterexample
    print("not resilient")
    print(f"source: {cex.source}")
    print(f"failed: {_fmt_links(cex.failed)}")
    print(f"trace: {cex.trace}")
    if cert_path:
        _write(cert_path, serialize_certificate(cex))
    return FAILS


def cmd_verify(args) -> int:
    inst = parse_instance(_read(args.instance))
    workers = 1 if args.deterministic else args.jobs
    if args.property == "perfect":
        kwargs = {"workers": workers} if args.engine == "lazy" else {}
        verdict = verify_perfect(inst, engine=args.engine, **kwargs)
    elif args.property == "ideal":
        verdict = verify_ideal(inst, budget=args.budget, engine=args.engine, workers=workers)
    else:
        verdict = verify_oblivious(inst)
    return _report(verdict, args.cert)


def cmd_synth(args) -> int:
    g, target = parse_graph(_read(args.graph))
    if args.target is not None:
        target = _node(g, args.target)
    if target is None:
        raise UsageError("no target given (use --target)")
    found = synth_oblivious(g, target)
    if isinstance(found, LongCycleWitness):
        print("infeasible: cycle " + " ".join(map(str, found.cycle)), file=sys.stderr)
        return FAILS
    _write(args.output, serialize_instance(found))
    return OK


def cmd_simulate(args) -> int:
    inst = parse_instance(_read(args.instance))
    g = inst.graph
    trace = route(inst, _node(g, args.source), _failures(g, args.fail))
    print(" ".join(map(str, trace.nodes)))
    print("delivered" if trace.delivered else f"loop from position {trace.repeat_index}")
    return OK if trace.delivered else FAILS


def _parse_mode(text: str) -> tuple[str, int | None]:
    if text == PERFECT:
        return PERFECT, None
    if text.startswith(IDEAL + ":"):
        try:
            return IDEAL, int(text.split(":", 1)[1])
        except ValueError:
            pass
    raise UsageError(f"mode must be 'perfect' or 'ideal:<budget>', got {text!r}")


def cmd_witness(args) -> int:
    inst = parse_instance(_read(args.instance))
    g = inst.graph
    if args.cert:
        cex = parse_certificate(_read(args.cert))
        problem = witness_problem(inst, cex.source, cex.failed, cex.mode, cex.budget)
        if problem is None and not check_counterexample(inst, cex):
            problem = "recorded trace does not match the simulation"
    else:
        if args.source is None:
            raise UsageError("give --cert or --source")
        mode, budget = _parse_mode(args.mode)
        problem = witness_problem(inst, _node(g, args.source), _failures(g, args.fail), mode, budget)
    if problem is None:
        print("witness valid")
        return OK
    print(f"witness rejected: {problem}")
    return FAILS


def cmd_gen(args) -> int:
    phi = parse_dimacs(_read(args.cnf))
    gen = gen_perfect_gadget if args.kind == "perfect-gadget" else gen_ideal_gadget
    _write(args.output, serialize_instance(gen(phi)))
    return OK


def cmd_sat(args) -> int:
    phi = parse_dimacs(_read(args.cnf))
    beta = sat_bruteforce(phi)
    if beta is None:
        print("UNSAT")
        return FAILS
    print("SAT")
    print(" ".join(str(i if beta[i] else -i) for i in sorted(beta)) + " 0")
    return OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="frr", description="Fast re-route resilience toolkit")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="decide perfect, ideal or oblivious resilience")
    p.add_argument("property", choices=["perfect", "ideal", "oblivious"])
    p.add_argument("instance")
    p.add_argument("--engine", choices=["lazy", "exhaustive"], default="lazy")
    p.add_argument("--budget", type=int, help="ideal: failures to tolerate (default: connectivity - 1)")
    p.add_argument("--deterministic", action="store_true", help="single-threaded, reproducible certificates")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for the lazy search")
    p.add_argument("--cert", help="write a counterexample certificate here")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("synth", help="synthesize an in-port oblivious pattern")
    p.add_argument("kind", choices=["oblivious"])
    p.add_argument("graph")
    p.add_argument("--target")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("simulate", help="route one packet")
    p.add_argument("instance")
    p.add_argument("--source", required=True)
    p.add_argument("--fail", help="failed links, e.g. v2:v5,v3:v5")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("witness", help="check a non-resilience witness")
    p.add_argument("instance")
    p.add_argument("--cert")
    p.add_argument("--source")
    p.add_argument("--fail")
    p.add_argument("--mode", default=PERFECT, help="perfect or ideal:<budget>")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("gen", help="compile a 3-CNF formula into a gadget instance")
    p.add_argument("kind", choices=["perfect-gadget", "ideal-gadget"])
    p.add_argument("cnf")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("sat", help="brute-force satisfiability of a small CNF")
    p.add_argument("cnf")
    p.set_defaults(func=cmd_sat)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (FrrError, UsageError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


cli_main = main
