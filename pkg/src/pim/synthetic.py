"""Random process trees and logs simulated from them, for tests and benchmarks."""

from __future__ import annotations

import random
from collections import Counter

from .cuts import Operator
from .eventlog import EventLog
from .tree import TAU, ProcessTree, leaf, node


def random_tree(
    labels: list[str],
    rng: random.Random,
    *,
    loop_prob: float = 0.15,
    tau_prob: float = 0.0,
) -> ProcessTree:
    """A binary tree using every label exactly once."""
    if len(labels) == 1:
        t = leaf(labels[0])
        if tau_prob and rng.random() < tau_prob:
            return node(Operator.XOR, t, TAU)
        return t
    cut = rng.randint(1, len(labels) - 1)
    left = random_tree(labels[:cut], rng, loop_prob=loop_prob, tau_prob=tau_prob)
    right = random_tree(labels[cut:], rng, loop_prob=loop_prob, tau_prob=tau_prob)
    if rng.random() < loop_prob:
        op = Operator.LOOP
    else:
        op = rng.choice((Operator.XOR, Operator.SEQ, Operator.PARA))
    return node(op, left, right)


def sample_trace(t: ProcessTree, rng: random.Random, *, redo_prob: float = 0.3, max_redo: int = 3) -> list[str]:
    if t.op is None:
        return [] if t.label is None else [t.label]
    if t.op is Operator.XOR:
        return sample_trace(rng.choice(t.children), rng, redo_prob=redo_prob, max_redo=max_redo)
    if t.op is Operator.SEQ:
        out: list[str] = []
        for c in t.children:
            out.extend(sample_trace(c, rng, redo_prob=redo_prob, max_redo=max_redo))
        return out
    if t.op is Operator.PARA:
        queues = [sample_trace(c, rng, redo_prob=redo_prob, max_redo=max_redo) for c in t.children]
        queues = [q[::-1] for q in queues if q]
        out = []
        while queues:
            q = rng.choice(queues)
            out.append(q.pop())
            queues = [x for x in queues if x]
        return out
    out = sample_trace(t.children[0], rng, redo_prob=redo_prob, max_redo=max_redo)
    for _ in range(max_redo):
        if rng.random() >= redo_prob:
            break
        out += sample_trace(rng.choice(t.children[1:]), rng, redo_prob=redo_prob, max_redo=max_redo)
        out += sample_trace(t.children[0], rng, redo_prob=redo_prob, max_redo=max_redo)
    return out


def sample_log(t: ProcessTree, n_traces: int, rng: random.Random, **kwargs) -> EventLog:
    counts: Counter[tuple[str, ...]] = Counter()
    for _ in range(n_traces):
        counts[tuple(sample_trace(t, rng, **kwargs))] += 1
    return EventLog.from_traces(counts)


def synthetic_log(n_traces: int, n_activities: int, seed: int = 0, **kwargs) -> EventLog:
    """Log simulated from a random tree over ``n_activities`` labels."""
    rng = random.Random(seed)
    labels = [f"a{i:02d}" for i in range(n_activities)]
    tree = random_tree(labels, rng)
    return sample_log(tree, n_traces, random.Random(seed + 1), **kwargs)
