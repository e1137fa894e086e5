"""
Subcommands of the dsn-hiercode command line.

stdout carries JSON (or tables with --human); logs and errors go to stderr.
Exit codes: 0 success, 1 a decode left Failed nodes or a sweep failed,
2 usage or validation error with a single-line JSON diagnostic.
"""
import argparse
import json
import sys
from typing import Callable, Dict, List, Optional

import numpy as np
from loguru import logger
from pydantic import ValidationError

from dsn_hiercode.cli.files import (pattern_json, read_code, read_codeword, read_messages, read_pattern,
                                    read_topology, write_code, write_codeword, write_messages, write_pattern)
from dsn_hiercode.cli.render import (block_map_frame, hierarchy_frame, node_line, render_frame,
                                     render_recovery, render_validation, render_verdict)
from dsn_hiercode.coding.codec import ErasurePattern, encode, random_messages, random_pattern
from dsn_hiercode.coding.codegen import build_code
from dsn_hiercode.coding.decoder import RecoveryReport, hierarchical_decode
from dsn_hiercode.coding.hierarchy import hierarchy
from dsn_hiercode.coding.simulation import simulate_recovery
from dsn_hiercode.exceptions import FileAccessError, HierCodeError
from dsn_hiercode.network.coopgraph import build_cooperation_graph, check_compatible
from dsn_hiercode.options import ConstructionOptions, CostModelOptions, ErrorCode
from dsn_hiercode.settings import load_settings
from dsn_hiercode.validation.sweep import parse_budget, sweep_validate


class ArgumentParser(argparse.ArgumentParser):
    """argparse that reports usage errors as HierCodeError instead of exiting."""

    def error(self, message: str):
        raise HierCodeError(message, code=ErrorCode.usage)


def _seed(value: str) -> int:
    seed = int(value, 0)
    if not 0 <= seed < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed must be a 64-bit unsigned integer, got {value}")
    return seed


def _per_node(value: str) -> Dict[int, int]:
    """Parse "2:5,4:5" into {2: 5, 4: 5}."""
    try:
        return {int(node): int(count) for node, count in (term.split(":") for term in value.split(",") if term)}
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected node:count pairs, got {value}")


def _emit(args: argparse.Namespace, data: Dict, human: Optional[str] = None):
    if args.human and human is not None:
        sys.stdout.write(human + "\n")
    else:
        sys.stdout.write(json.dumps(data, sort_keys=True) + "\n")


def _report_data(report: RecoveryReport, trace: bool) -> Dict:
    data = report.to_dict()
    data["messages"] = {str(i): [int(v) for v in entry.message]
                        for i, entry in sorted(report.nodes.items()) if entry.message is not None}
    if trace:
        data["trace"] = report.trace_lines()
    return data


def cmd_build(args: argparse.Namespace) -> int:
    t = read_topology(args.topology)
    c = build_code(t, multi_level=args.multi_level)
    write_code(args.out, c)
    h = hierarchy(c)
    data = {
        "construction": c.construction.value,
        "field": {"theta": c.ctx.theta, "modulus": c.ctx.modulus, "q": c.ctx.q},
        "out": str(args.out),
        "nodes": [dict(h.nodes[i].to_dict(), k=c.nodes[i].params.k, r=c.nodes[i].params.r,
                       delta=c.nodes[i].params.delta, u=c.nodes[i].u, v=c.nodes[i].v) for i in c.node_ids],
    }
    human = (f"{c.construction.value} code over GF({c.ctx.q}) written to {args.out}\n"
             f"{render_frame(hierarchy_frame(h))}\n\n{block_map_frame(c).to_string()}")
    _emit(args, data, human)
    return 0


def cmd_hierarchy(args: argparse.Namespace) -> int:
    h = hierarchy(read_code(args.code))
    if args.level is not None:
        if args.node is None:
            raise HierCodeError("--level needs --node", code=ErrorCode.usage)
        W = sorted(set(args.helpers or []))
        value = h.lam(args.node, args.level, W)
        _emit(args, {"node": args.node, "level": args.level, "W": W, "lambda": value}, f"λ={value}")
    elif args.node is not None:
        entry = h.node(args.node)
        _emit(args, entry.to_dict(), node_line(entry))
    else:
        _emit(args, {"nodes": [h.nodes[i].to_dict() for i in sorted(h.nodes)]}, render_frame(hierarchy_frame(h)))
    return 0


def cmd_check_compat(args: argparse.Namespace) -> int:
    verdict = check_compatible(build_cooperation_graph(read_topology(args.topology)))
    _emit(args, verdict.to_dict(), render_verdict(verdict))
    if not verdict.compatible:
        raise HierCodeError("Cooperation graph is not compatible", code=ErrorCode.incompatible_graph,
                            violations=[v.to_dict() for v in verdict.violations])
    return 0


def cmd_encode(args: argparse.Namespace) -> int:
    c = read_code(args.code)
    if args.messages:
        m = read_messages(args.messages, c)
    else:
        m = random_messages(c, np.random.default_rng(args.seed))
        if args.messages_out:
            write_messages(args.messages_out, c, m)
    codeword = encode(c, m)
    write_codeword(args.out, c, codeword)
    _emit(args, {"out": str(args.out), "symbols": c.total_n, "q": c.ctx.q},
          f"{c.total_n} symbols over GF({c.ctx.q}) written to {args.out}")
    return 0


def cmd_corrupt(args: argparse.Namespace) -> int:
    c = read_code(args.code)
    if args.pattern:
        pattern = read_pattern(args.pattern).validate(c)
    elif args.all:
        pattern = ErasurePattern.full(c)
    else:
        pattern = random_pattern(c, args.per_node, np.random.default_rng(args.seed))
    if args.out:
        write_pattern(args.out, pattern)
    text = pattern_json(pattern)
    sys.stdout.write(text + "\n")
    return 0


def _recovery_inputs(args: argparse.Namespace):
    c = read_code(args.code)
    return c, read_codeword(args.codeword, c), read_pattern(args.pattern)


def cmd_decode(args: argparse.Namespace) -> int:
    c, codeword, pattern = _recovery_inputs(args)
    report = hierarchical_decode(c, codeword, pattern)
    human = render_recovery(report) + ("\n" + "\n".join(report.trace_lines()) if args.trace else "")
    _emit(args, _report_data(report, args.trace), human)
    return 1 if report.failed_nodes else 0


def cmd_simulate(args: argparse.Namespace) -> int:
    c, codeword, pattern = _recovery_inputs(args)
    report = simulate_recovery(c, codeword, pattern, CostModelOptions(args.cost_model))
    human = render_recovery(report) + ("\n" + "\n".join(report.trace_lines()) if args.trace else "")
    _emit(args, _report_data(report, args.trace), human)
    return 1 if report.failed_nodes else 0


def cmd_validate(args: argparse.Namespace) -> int:
    c = read_code(args.code)
    report = sweep_validate(c, parse_budget(args.budget), seed=args.seed, jobs=args.jobs)
    data = report.model_dump()
    data["claimed_failures"] = report.claimed_failures
    data["violations"] = report.violations
    _emit(args, data, render_validation(report))
    guaranteed = report.construction == ConstructionOptions.single_level.value
    return 1 if report.violations or (guaranteed and report.claimed_failures) else 0


COMMANDS: Dict[str, Callable[[argparse.Namespace], int]] = {
    "build": cmd_build,
    "hierarchy": cmd_hierarchy,
    "check-compat": cmd_check_compat,
    "encode": cmd_encode,
    "corrupt": cmd_corrupt,
    "decode": cmd_decode,
    "simulate": cmd_simulate,
    "validate": cmd_validate,
}


def build_parser() -> ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument("--human", action="store_true", help="Print tables instead of JSON")

    parser = ArgumentParser(prog="dsn-hiercode", description="Topology-aware hierarchical erasure codes for DSNs")
    sub = parser.add_subparsers(dest="command", required=True)

    build = sub.add_parser("build", parents=[common], help="Build a code from a topology document")
    build.add_argument("--topology", required=True)
    build.add_argument("--multi-level", action="store_true", help="Use the cycles of the document")
    build.add_argument("--out", required=True)

    hier = sub.add_parser("hierarchy", parents=[common], help="Show ECC hierarchies and lambda values")
    hier.add_argument("--code", required=True)
    hier.add_argument("--node", type=int)
    hier.add_argument("--level", type=int)
    hier.add_argument("--helpers", type=int, nargs="*", default=[])

    compat = sub.add_parser("check-compat", parents=[common], help="Check a cooperation graph for compatibility")
    compat.add_argument("--topology", required=True)

    enc = sub.add_parser("encode", parents=[common], help="Encode messages")
    enc.add_argument("--code", required=True)
    enc.add_argument("--messages", help="Message symbol file; random messages from --seed when omitted")
    enc.add_argument("--messages-out", help="Where to write generated messages")
    enc.add_argument("--seed", type=_seed, default=0)
    enc.add_argument("--out", required=True)

    corrupt = sub.add_parser("corrupt", parents=[common], help="Produce an erasure pattern")
    corrupt.add_argument("--code", required=True)
    corrupt.add_argument("--seed", type=_seed, default=0)
    corrupt.add_argument("--out")
    source = corrupt.add_mutually_exclusive_group(required=True)
    source.add_argument("--pattern", help="Existing pattern file to check and copy")
    source.add_argument("--per-node", type=_per_node, help="Random erasure counts, e.g. 2:5,4:5")
    source.add_argument("--all", action="store_true", help="Erase every coordinate of every node")

    for name, text in (("decode", "Hierarchical decoding"), ("simulate", "Recovery latency simulation")):
        cmd = sub.add_parser(name, parents=[common], help=text)
        cmd.add_argument("--code", required=True)
        cmd.add_argument("--codeword", required=True)
        cmd.add_argument("--pattern", required=True)
        cmd.add_argument("--trace", action="store_true", help="Include one line per decoding event")
        if name == "simulate":
            cmd.add_argument("--cost-model", choices=CostModelOptions.list(),
                             default=CostModelOptions.shortest_path.value)

    val = sub.add_parser("validate", parents=[common], help="Sweep claimed capabilities")
    val.add_argument("--code", required=True)
    val.add_argument("--budget", default="exhaustive")
    val.add_argument("--jobs", type=int, default=1)
    val.add_argument("--seed", type=_seed, default=0)
    return parser


def setup_logging():
    logger.remove()
    logger.add(sys.stderr, level=load_settings().log_level.upper())


def _fail(e: HierCodeError) -> int:
    logger.error(e.message)
    sys.stderr.write(json.dumps(e.to_dict(), sort_keys=True, default=str) + "\n")
    return 2


def run(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, run one subcommand and return its exit code."""
    setup_logging()
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args)
    except HierCodeError as e:
        return _fail(e)
    except OSError as e:
        return _fail(FileAccessError(f"Cannot access {e.filename}: {e.strerror}", path=str(e.filename)))
    except ValidationError as e:
        error = {"error": ErrorCode.schema.value, "message": "Invalid input document",
                 "detail": {"errors": json.loads(e.json())}}
        sys.stderr.write(json.dumps(error, sort_keys=True) + "\n")
        return 2
