"""Splitting a log along a cut, and the recursion's base cases."""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import dataclass

from .cuts import Cut, Operator
from .eventlog import EventLog, Trace

SKIP_MAJORITY = 0.5
SINGLE_LOOP_THRESHOLD = 1.5


class SplitContractError(ValueError):
    """The cut does not cover the log's alphabet."""


@dataclass(frozen=True)
class SplitResult:
    left: EventLog
    right: EventLog
    filtered_events: int


class _Sink:
    def __init__(self) -> None:
        self.variants: Counter[Trace] = Counter()
        self.empty = 0

    def add(self, trace: Trace, count: int) -> None:
        if trace:
            self.variants[trace] += count
        else:
            self.empty += count

    def log(self, parent: EventLog) -> EventLog:
        return parent.with_variants(self.variants, self.empty + parent.empty_count)


def _best_seq_index(trace: Trace, sigma1: frozenset[int]) -> int:
    # misplaced(k) = right-side events before k + left-side events at/after k
    misplaced = sum(1 for a in trace if a in sigma1)
    best, best_k = misplaced, 0
    for k, a in enumerate(trace, start=1):
        misplaced += -1 if a in sigma1 else 1
        if misplaced < best:
            best, best_k = misplaced, k
    return best_k


def _loop_segments(trace: Trace, body: frozenset[int]) -> tuple[list[Trace], list[Trace]]:
    bodies: list[Trace] = []
    redos: list[Trace] = []
    run: list[int] = []
    in_body = trace[0] in body
    if not in_body:
        bodies.append(())
    for a in trace:
        side = a in body
        if side != in_body:
            (bodies if in_body else redos).append(tuple(run))
            run = []
            in_body = side
        run.append(a)
    (bodies if in_body else redos).append(tuple(run))
    if not in_body:
        bodies.append(())
    return bodies, redos


def split(log: EventLog, cut: Cut) -> SplitResult:
    """Split ``log`` into the sublogs of the cut's two sides, dropping deviating events.

    Both sublogs inherit all of the parent's empty traces; projections that
    become empty add further empty traces.
    """
    s1, s2 = cut.sigma1, cut.sigma2
    outside = log.alphabet - s1 - s2
    if outside:
        raise SplitContractError(f"activities {sorted(outside)} lie on neither side of the cut")
    left, right = _Sink(), _Sink()
    filtered = 0
    op = cut.operator
    for trace, count in log.variants.items():
        if op is Operator.XOR:
            n1 = sum(1 for a in trace if a in s1)
            if 2 * n1 >= len(trace):
                left.add(tuple(a for a in trace if a in s1), count)
                filtered += (len(trace) - n1) * count
            else:
                right.add(tuple(a for a in trace if a in s2), count)
                filtered += n1 * count
        elif op is Operator.SEQ:
            k = _best_seq_index(trace, s1)
            head = tuple(a for a in trace[:k] if a in s1)
            tail = tuple(a for a in trace[k:] if a in s2)
            left.add(head, count)
            right.add(tail, count)
            filtered += (len(trace) - len(head) - len(tail)) * count
        elif op is Operator.PARA:
            left.add(tuple(a for a in trace if a in s1), count)
            right.add(tuple(a for a in trace if a in s2), count)
        else:
            bodies, redos = _loop_segments(trace, s1)
            for b in bodies:
                left.add(b, count)
            for r in redos:
                right.add(r, count)
    return SplitResult(left.log(log), right.log(log), filtered)


class BaseCaseKind(enum.Enum):
    SILENT = "silent"
    SKIP = "skip"
    LEAF = "leaf"
    LOOP_LEAF = "loop_leaf"


@dataclass(frozen=True)
class BaseCase:
    kind: BaseCaseKind
    activity: int | None = None


def base_case(log: EventLog) -> BaseCase | None:
    """Trivial logs: no activities, mostly empty traces, or a single activity.

    A single activity repeated more than 1.5 times per trace on average becomes
    a self-loop instead of a plain leaf.
    """
    alphabet = log.alphabet
    if not alphabet:
        return BaseCase(BaseCaseKind.SILENT)
    if log.empty_count > SKIP_MAJORITY * log.num_traces:
        return BaseCase(BaseCaseKind.SKIP)
    if len(alphabet) == 1:
        (a,) = alphabet
        mean = log.num_events / log.num_nonempty
        kind = BaseCaseKind.LEAF if mean <= SINGLE_LOOP_THRESHOLD else BaseCaseKind.LOOP_LEAF
        return BaseCase(kind, a)
    return None
