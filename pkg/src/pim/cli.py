"""Command-line interface: ``pim discover|graph|evaluate|scores|cuts|stats``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path
from typing import Sequence

from . import bpmn
from .cuts import CutDomainError, LogShape, rank_cuts
from .discovery import DiscoveryOptions, discover_with_trace
from .eventlog import (
    CsvConfig,
    EventLog,
    LogConfigError,
    LogFormatError,
    log_stats,
    parse_csv,
    parse_variants,
    parse_xes_lite,
)
from .graphs import FILTER_SCOPES, ParameterError, build, filter_graphs
from .graphs import to_dot as graph_dot
from .quality import DEFAULT_LOOP_BOUND, evaluate
from .scores import score_table_csv
from .tree import DEFAULT_LANGUAGE_LIMIT, LanguageExplosion, TreeParseError, parse_text, to_json, to_text

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_GUARD = 0, 1, 2, 3

logger = logging.getLogger("pim")


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _infer_format(path: str) -> str:
    suffix = Path(path).suffix.lower()
    if suffix == ".xes":
        return "xes"
    if suffix in (".variants", ".var", ".tsv"):
        return "variants"
    return "csv"


def read_log(args: argparse.Namespace) -> EventLog:
    fmt = args.format or ("csv" if args.input == "-" else _infer_format(args.input))
    try:
        if args.input == "-":
            data = sys.stdin.buffer.read()
        else:
            data = Path(args.input).read_bytes()
    except OSError as exc:
        raise CliError(f"cannot read {args.input}: {exc.strerror or exc}", EXIT_IO) from None
    try:
        if fmt == "xes":
            return parse_xes_lite(data)
        if fmt == "variants":
            return parse_variants(data)
        config = CsvConfig(
            case=args.case_col,
            activity=args.activity_col,
            timestamp=args.time_col,
            delimiter=args.delimiter,
            header=not args.no_header,
        )
        return parse_csv(data, config)
    except (LogFormatError, LogConfigError, UnicodeDecodeError) as exc:
        raise CliError(f"cannot parse {args.input}: {exc}", EXIT_IO) from None


def _options(args: argparse.Namespace) -> DiscoveryOptions:
    try:
        return DiscoveryOptions(
            filter_percent=args.filter,
            max_activities=args.max_activities,
            exhaustive_limit=args.exhaustive_limit,
            filter_scope=args.filter_scope,
        )
    except ParameterError as exc:
        raise CliError(str(exc), EXIT_USAGE) from None


def _write(args: argparse.Namespace, text: str) -> None:
    if args.output and args.output != "-":
        try:
            Path(args.output).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise CliError(f"cannot write {args.output}: {exc.strerror or exc}", EXIT_IO) from None
    else:
        sys.stdout.write(text)


def _report(tree, log, args) -> str:
    try:
        report = evaluate(tree, log, args.loop_bound, limit=args.language_limit)
    except LanguageExplosion as exc:
        raise CliError(f"not computable at this scale: {exc}", EXIT_GUARD) from None
    return report.to_table()


def cmd_discover(args: argparse.Namespace) -> int:
    opts = _options(args)
    log = read_log(args)
    tree, trace = discover_with_trace(log, opts)
    if args.verbose:
        stats = log_stats(log)
        print(
            f"traces={stats.traces} events={stats.events} activities={stats.alphabet_size} "
            f"variants={stats.distinct_variants} empty={stats.empty_traces}",
            file=sys.stderr,
        )
        for step in trace.steps:
            print(step.describe(log.labels), file=sys.stderr)
    if args.emit == "tree":
        text = to_text(tree) + "\n"
    elif args.emit == "json":
        text = to_json(tree) + "\n"
    elif args.emit == "dot":
        text = bpmn.to_dot(tree)
    elif args.emit == "tree-dot":
        text = bpmn.tree_dot(tree)
    elif args.emit == "bpmn-json":
        text = bpmn.to_block_graph(tree).to_json() + "\n"
    else:
        text = to_text(tree) + "\n" + _report(tree, log, args)
    _write(args, text)
    return EXIT_OK


def cmd_graph(args: argparse.Namespace) -> int:
    opts = _options(args)
    log = read_log(args)
    graphs = filter_graphs(build(log), opts.filter_percent, opts.filter_scope)
    _write(args, graph_dot(graphs, show_removed=True, include_ifg=args.ifg))
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    try:
        tree_text = Path(args.tree).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {args.tree}: {exc.strerror or exc}", EXIT_IO) from None
    try:
        tree = parse_text(tree_text.strip())
    except TreeParseError as exc:
        raise CliError(f"cannot parse tree: {exc}", EXIT_IO) from None
    log = read_log(args)
    try:
        report = evaluate(tree, log, args.loop_bound, limit=args.language_limit)
    except LanguageExplosion as exc:
        raise CliError(f"not computable at this scale: {exc}", EXIT_GUARD) from None
    _write(args, report.to_json(indent=2) + "\n" if args.json else report.to_table())
    return EXIT_OK


def cmd_scores(args: argparse.Namespace) -> int:
    opts = _options(args)
    log = read_log(args)
    graphs = filter_graphs(build(log), opts.filter_percent, opts.filter_scope)
    _write(args, score_table_csv(graphs))
    return EXIT_OK


def cmd_cuts(args: argparse.Namespace) -> int:
    opts = _options(args)
    log = read_log(args)
    graphs = filter_graphs(build(log), opts.filter_percent, opts.filter_scope)
    try:
        cuts = rank_cuts(graphs, LogShape.of(log), exhaustive_limit=opts.exhaustive_limit, top=args.top)
    except CutDomainError as exc:
        raise CliError(str(exc), EXIT_USAGE) from None
    _write(args, "".join(c.describe(log.labels) + "\n" for c in cuts))
    return EXIT_OK


def cmd_stats(args: argparse.Namespace) -> int:
    s = log_stats(read_log(args))
    _write(
        args,
        f"traces\t{s.traces}\nevents\t{s.events}\nactivities\t{s.alphabet_size}\n"
        f"variants\t{s.distinct_variants}\nempty\t{s.empty_traces}\n",
    )
    return EXIT_OK


def _add_input(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", help="event log path, or - for standard input")
    p.add_argument("--format", choices=("csv", "xes", "variants"), help="input format (default: by extension)")
    p.add_argument("--case-col", default="case")
    p.add_argument("--activity-col", default="activity")
    p.add_argument("--time-col", default=None)
    p.add_argument("--delimiter", default=",")
    p.add_argument("--no-header", action="store_true", help="CSV has no header row; columns are indices")
    p.add_argument("--output", "-o", default=None)
    p.add_argument("--verbose", "-v", action="store_true")


def _add_mining(p: argparse.ArgumentParser) -> None:
    p.add_argument("-f", "--filter", type=float, default=99.5, help="percentage of follows edges to keep")
    p.add_argument("--filter-scope", choices=FILTER_SCOPES, default="joint")
    p.add_argument("--max-activities", type=int, default=None)
    p.add_argument("--exhaustive-limit", type=int, default=12)


def _add_quality(p: argparse.ArgumentParser) -> None:
    p.add_argument("--loop-bound", type=int, default=DEFAULT_LOOP_BOUND)
    p.add_argument("--language-limit", type=int, default=DEFAULT_LANGUAGE_LIMIT)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pim", description="Probabilistic inductive process discovery.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("discover", help="discover a process tree")
    _add_input(p)
    _add_mining(p)
    _add_quality(p)
    p.add_argument("--emit", choices=("tree", "json", "dot", "tree-dot", "bpmn-json", "report"), default="tree")
    p.set_defaults(func=cmd_discover)

    p = sub.add_parser("graph", help="directly-follows graph as DOT, removed edges dashed")
    _add_input(p)
    _add_mining(p)
    p.add_argument("--ifg", action="store_true", help="also draw indirectly-follows edges")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("evaluate", help="fitness, precision, size and CFC of a tree on a log")
    p.add_argument("tree", help="file with a tree in text notation")
    _add_input(p)
    _add_quality(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("scores", help="pairwise relation scores as CSV")
    _add_input(p)
    _add_mining(p)
    p.set_defaults(func=cmd_scores)

    p = sub.add_parser("cuts", help="top-k cuts of the top-level step")
    _add_input(p)
    _add_mining(p)
    p.add_argument("--top", type=int, default=5)
    p.set_defaults(func=cmd_cuts)

    p = sub.add_parser("stats", help="log statistics")
    _add_input(p)
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    level = logging.INFO if args.verbose or os.environ.get("PIM_TRACE", "") not in ("", "0") else logging.WARNING
    logging.basicConfig(level=level, format="%(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"pim: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
