"""The recursive discovery loop: base case, filter, find cut, split, recurse."""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass, field

from .cuts import DEFAULT_EXHAUSTIVE_LIMIT, Cut, LogShape, find_cut
from .eventlog import EventLog
from .graphs import ParameterError, build, filter_graphs, FILTER_SCOPES
from .split import BaseCaseKind, base_case, split
from .tree import TAU, ProcessTree, leaf, node, xor, loop

logger = logging.getLogger(__name__)


class RecursionGuardError(RuntimeError):
    """The recursion went deeper than the alphabet allows; indicates a splitting bug."""


@dataclass(frozen=True)
class DiscoveryOptions:
    filter_percent: float = 99.5
    max_activities: int | None = None
    exhaustive_limit: int = DEFAULT_EXHAUSTIVE_LIMIT
    max_recursion_depth: int | None = None
    filter_scope: str = "joint"
    backend: str | None = None

    def __post_init__(self) -> None:
        if not 0 <= self.filter_percent <= 100:
            raise ParameterError(f"filter_percent must be in [0, 100], got {self.filter_percent}")
        if self.max_activities is not None and self.max_activities < 1:
            raise ParameterError("max_activities must be >= 1")
        if self.exhaustive_limit < 1:
            raise ParameterError("exhaustive_limit must be >= 1")
        if self.filter_scope not in FILTER_SCOPES:
            raise ParameterError(f"filter_scope must be one of {FILTER_SCOPES}")


@dataclass(frozen=True)
class StepRecord:
    """One recursion step: either a cut (with its split) or a base case."""

    depth: int
    alphabet: frozenset[int]
    cut: Cut | None = None
    base: BaseCaseKind | None = None
    skipped: bool = False
    filtered_events: int = 0
    empty_traces: int = 0

    def describe(self, labels) -> str:
        pad = "  " * self.depth
        skip = " [skip]" if self.skipped else ""
        if self.cut is not None:
            return f"{pad}cut {self.cut.describe(labels)} filtered={self.filtered_events}{skip}"
        acts = ",".join(labels[a] for a in sorted(self.alphabet))
        return f"{pad}base {self.base.value} {{{acts}}}{skip}"


@dataclass
class DiscoveryTrace:
    steps: list[StepRecord] = field(default_factory=list)

    def cuts(self) -> list[Cut]:
        return [s.cut for s in self.steps if s.cut is not None]

    def __len__(self) -> int:
        return len(self.steps)


def top_activities(log: EventLog, k: int) -> frozenset[int]:
    """The ``k`` most frequent activities; ties go to the smaller id."""
    counts: dict[int, int] = {}
    for trace, c in log.variants.items():
        for a in trace:
            counts[a] = counts.get(a, 0) + c
    ranked = sorted(counts, key=lambda a: (-counts[a], a))
    return frozenset(ranked[:k])


def discover_with_trace(log: EventLog, opts: DiscoveryOptions | None = None) -> tuple[ProcessTree, DiscoveryTrace]:
    opts = opts or DiscoveryOptions()
    if opts.max_activities is not None:
        log = log.project(top_activities(log, opts.max_activities))
    record = DiscoveryTrace()
    guard = opts.max_recursion_depth if opts.max_recursion_depth is not None else len(log.alphabet) + 2
    verbose = os.environ.get("PIM_TRACE", "") not in ("", "0")
    tree = _discover(log, opts, record, 0, guard, verbose)
    return tree, record


def discover(log: EventLog, opts: DiscoveryOptions | None = None) -> ProcessTree:
    return discover_with_trace(log, opts)[0]


def _discover(
    log: EventLog, opts: DiscoveryOptions, record: DiscoveryTrace, depth: int, guard: int, verbose: bool
) -> ProcessTree:
    if depth > guard:
        raise RecursionGuardError(f"recursion depth {depth} exceeds guard {guard}")
    skipped = False
    bc = base_case(log)
    if bc is not None and bc.kind is BaseCaseKind.SKIP:
        skipped = True
        log = log.without_empty()
        bc = base_case(log)
    alphabet = log.alphabet

    if bc is not None:
        step = StepRecord(depth, alphabet, base=bc.kind, skipped=skipped, empty_traces=log.empty_count)
        record.steps.append(step)
        if verbose:
            logger.info(step.describe(log.labels))
        if bc.kind is BaseCaseKind.SILENT:
            tree = TAU
        elif bc.kind is BaseCaseKind.LEAF:
            tree = leaf(log.labels[bc.activity])
        else:
            tree = loop(leaf(log.labels[bc.activity]), TAU)
        return xor(TAU, tree) if skipped and not tree.is_tau else tree

    graphs = filter_graphs(build(log), opts.filter_percent, opts.filter_scope)
    cut = find_cut(graphs, LogShape.of(log), exhaustive_limit=opts.exhaustive_limit, backend=opts.backend)
    parts = split(log, cut)
    step = StepRecord(
        depth, alphabet, cut=cut, skipped=skipped, filtered_events=parts.filtered_events, empty_traces=log.empty_count
    )
    record.steps.append(step)
    if verbose:
        logger.info(step.describe(log.labels))
    for child in (parts.left, parts.right):
        if len(child.alphabet) >= len(alphabet):
            raise RecursionGuardError("a sublog did not lose any activity")
    left = _discover(parts.left, opts, record, depth + 1, guard, verbose)
    right = _discover(parts.right, opts, record, depth + 1, guard, verbose)
    tree = node(cut.operator, left, right)
    return xor(TAU, tree) if skipped else tree
