"""Command-line driver.

Exit status: 0 on success, 1 when a verification fails (the evidence is
printed), 2 on unreadable or invalid input.  ``RECONFDIST_LOG`` sets the
log level (e.g. ``DEBUG`` prints one line per fixpoint iteration).
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .bisim import CLOSED, OPEN, strong_bisimilar
from .composition import compose
from .decomposition import trivial_decompose
from .dot import export_dot
from .errors import DistributionError, InvalidSystem, VerificationFailed
from .io import load, load_ts, parse_parts, store_ts
from .reconfig import compress, distribute, verify_distribution
from .synthesis import teamwork_synthesize

OK, FAILED, BAD_INPUT = 0, 1, 2


def _out_dir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_agents(agents, out: Path, stream):
    for agent in agents:
        target = out / f"{agent.name}.json"
        store_ts(agent, target)
        print(f"{agent.name}: {len(agent.states)} states -> {target}", file=stream)


def cmd_validate(args, stream):
    man = load(args.file)
    print(f"{args.file}: valid {man.kind} '{man.name}'", file=stream)
    return OK


def cmd_compose(args, stream):
    result = compose([load_ts(f) for f in args.files])
    store_ts(result, args.output)
    print(f"composed {len(args.files)} systems: {len(result.states)} reachable states", file=stream)
    return OK


def cmd_decompose(args, stream):
    agents = trivial_decompose(load_ts(args.file), parse_parts(args.parts))
    _write_agents(agents, _out_dir(args.output), stream)
    return OK


def cmd_minimize(args, stream):
    agent = load_ts(args.agent)
    param = load_ts(args.parameter)
    if set(agent.states) != set(param.states):
        raise DistributionError("agent and parameter must share state ids (identity companion)")
    result = compress(agent, param, {s: s for s in agent.states})
    store_ts(result, args.output)
    print(f"{agent.name or 'agent'}: {len(agent.states)} -> {len(result.states)} states", file=stream)
    return OK


def cmd_distribute(args, stream):
    ts = load_ts(args.file)
    agents = distribute(ts, parse_parts(args.parts), verify=False)
    _write_agents(agents, _out_dir(args.output), stream)
    if args.verify:
        verify_distribution(ts, agents)
        print("verified: recomposition is bisimilar to the source", file=stream)
    return OK


def cmd_synthesize(args, stream):
    man = load(args.mealy)
    if man.kind != "mealy":
        raise DistributionError(f"{args.mealy} is not a Mealy machine")
    agents, report = teamwork_synthesize(man.payload, parse_parts(args.parts), depth=args.depth)
    _write_agents(agents, _out_dir(args.output), stream)
    print(f"verified: bisimilar and language-equal to depth {report.language.equivalent_to_depth}",
          file=stream)
    for name, listen in report.initial_listen.items():
        print(f"{name} initially listens to {{{','.join(listen)}}}", file=stream)
    return OK


def cmd_check(args, stream):
    witness = strong_bisimilar(load_ts(args.a), load_ts(args.b), CLOSED if args.closed else OPEN)
    if witness.verdict:
        print("bisimilar", file=stream)
        return OK
    print(f"not bisimilar: {witness.detail}", file=stream)
    return FAILED


def cmd_export_dot(args, stream):
    text = export_dot(load_ts(args.file))
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        stream.write(text)
    return OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="reconfdist",
                                     description="Distribute transition systems into reconfigurable agents.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a system or Mealy document")
    p.add_argument("file")
    p.set_defaults(run=cmd_validate)

    p = sub.add_parser("compose", help="parallel composition of agents")
    p.add_argument("files", nargs="+")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(run=cmd_compose)

    parts_help = "inline 'name:y1,y2/o1;name2:y3' or a JSON partition file"
    p = sub.add_parser("decompose", help="trivial decomposition")
    p.add_argument("file")
    p.add_argument("--parts", required=True, help=parts_help)
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.set_defaults(run=cmd_decompose)

    p = sub.add_parser("minimize", help="compress an agent against a parameter")
    p.add_argument("agent")
    p.add_argument("--parameter", required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(run=cmd_minimize)

    p = sub.add_parser("distribute", help="decompose and compress every agent")
    p.add_argument("file")
    p.add_argument("--parts", required=True, help=parts_help)
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.add_argument("--verify", action="store_true", help="check the recomposition (closed bisimilarity)")
    p.set_defaults(run=cmd_distribute)

    p = sub.add_parser("synthesize", help="teamwork synthesis from a Mealy machine")
    p.add_argument("mealy")
    p.add_argument("--parts", required=True, help=parts_help)
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.add_argument("--depth", type=int, default=10)
    p.set_defaults(run=cmd_synthesize)

    p = sub.add_parser("check", help="strong bisimilarity of two systems")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--closed", action="store_true", help="ignore externally initiated reactions")
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("export-dot", help="render a system for Graphviz")
    p.add_argument("file")
    p.add_argument("-o", "--output")
    p.set_defaults(run=cmd_export_dot)
    return parser


def main(argv=None, stream=None) -> int:
    stream = stream or sys.stdout
    level = os.environ.get("RECONFDIST_LOG", "WARNING").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING), format="%(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.run(args, stream)
    except VerificationFailed as exc:
        print(f"verification failed: {exc}", file=stream)
        if exc.trace:
            print(f"trace: {' '.join(exc.trace)}", file=stream)
        return FAILED
    except InvalidSystem as exc:
        print(str(exc), file=stream)
        return BAD_INPUT
    except (DistributionError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=stream)
        return BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
