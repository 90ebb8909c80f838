"""Desk-scale model quality: edit-distance fitness, escaping-edges precision, size and CFC.

These are approximations of the benchmark measures, computed against the
bounded language of the tree; an explosion of that language raises
``LanguageExplosion`` instead of returning a wrong number.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from . import _kernels
from .bpmn import simplicity, to_block_graph
from .eventlog import EventLog
from .tree import DEFAULT_LANGUAGE_LIMIT, ProcessTree, language

DEFAULT_LOOP_BOUND = 2


@dataclass(frozen=True)
class QualityReport:
    fitness: float
    precision: float
    f_score: float
    size: int
    cfc: int

    def to_json(self, **kwargs) -> str:
        return json.dumps(asdict(self), **kwargs)

    def to_table(self) -> str:
        rows = [
            ("fitness", f"{self.fitness:.4f}"),
            ("precision", f"{self.precision:.4f}"),
            ("f-score", f"{self.f_score:.4f}"),
            ("size", str(self.size)),
            ("cfc", str(self.cfc)),
        ]
        width = max(len(k) for k, _ in rows)
        return "\n".join(f"{k:<{width}}  {v:>8}" for k, v in rows) + "\n"


def f_score(fitness: float, precision: float) -> float:
    if fitness + precision == 0:
        return 0.0
    return 2 * fitness * precision / (fitness + precision)


def _label_traces(log: EventLog) -> list[tuple[tuple[str, ...], int]]:
    out = [(tuple(log.labels[a] for a in t), c) for t, c in log.variants.items()]
    if log.empty_count:
        out.append(((), log.empty_count))
    return out


def _encode_model(lang) -> tuple[dict[str, int], np.ndarray, np.ndarray]:
    table: dict[str, int] = {}
    traces = sorted(lang, key=lambda t: (len(t), t))
    lengths = [len(t) for t in traces]
    offsets = np.zeros(len(traces) + 1, dtype=np.int64)
    np.cumsum(lengths, out=offsets[1:])
    events = np.array(
        [table.setdefault(a, len(table)) for t in traces for a in t], dtype=np.int64
    ).reshape(-1)
    return table, events, offsets


def fitness(
    t: ProcessTree,
    log: EventLog,
    bound: int = DEFAULT_LOOP_BOUND,
    *,
    limit: int = DEFAULT_LANGUAGE_LIMIT,
) -> float:
    """Count-weighted mean of 1 - cost / (|trace| + shortest model trace).

    The cost of a trace is its insert/delete edit distance to the closest model trace.
    """
    lang = language(t, bound, limit)
    traces = _label_traces(log)
    if not traces:
        return 1.0
    table, events, offsets = _encode_model(lang)
    shortest = int(np.diff(offsets).min())
    kernels = _kernels.active()
    total = 0.0
    weight = 0
    for labels, count in traces:
        # labels the model never produces cannot match; -1 keeps them unmatched
        encoded = np.array([table.get(a, -1) for a in labels], dtype=np.int64)
        cost = kernels.min_indel(encoded, events, offsets)
        denom = len(labels) + shortest
        total += count * (1.0 - cost / denom if denom else 1.0)
        weight += count
    return total / weight


def precision(
    t: ProcessTree,
    log: EventLog,
    bound: int = DEFAULT_LOOP_BOUND,
    *,
    limit: int = DEFAULT_LANGUAGE_LIMIT,
) -> float:
    """1 - escaping / enabled, both weighted by how often the log visits each model prefix.

    A log trace contributes only along its longest prefix the model can produce.
    """
    lang = language(t, bound, limit)
    enabled: dict[tuple[str, ...], set[str]] = {}
    for trace in lang:
        for i in range(len(trace)):
            enabled.setdefault(trace[:i], set()).add(trace[i])
        enabled.setdefault(trace, set())
    visits: dict[tuple[str, ...], int] = {}
    observed: dict[tuple[str, ...], set[str]] = {}
    for labels, count in _label_traces(log):
        for i in range(len(labels) + 1):
            prefix = labels[:i]
            if prefix not in enabled:
                break
            visits[prefix] = visits.get(prefix, 0) + count
            if i < len(labels) and labels[i] in enabled[prefix]:
                observed.setdefault(prefix, set()).add(labels[i])
    escaping = 0
    total = 0
    for prefix, n in visits.items():
        options = enabled[prefix]
        total += n * len(options)
        escaping += n * len(options - observed.get(prefix, set()))
    if total == 0:
        return 1.0
    return 1.0 - escaping / total


def evaluate(
    t: ProcessTree,
    log: EventLog,
    bound: int = DEFAULT_LOOP_BOUND,
    *,
    limit: int = DEFAULT_LANGUAGE_LIMIT,
) -> QualityReport:
    fit = fitness(t, log, bound, limit=limit)
    prec = precision(t, log, bound, limit=limit)
    size, cfc = simplicity(to_block_graph(t))
    return QualityReport(fit, prec, f_score(fit, prec), size, cfc)
