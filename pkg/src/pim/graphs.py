"""Directly-follows and strictly-indirectly-follows graphs, and uniform percentile filtering."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .eventlog import EventLog

FILTER_SCOPES = ("joint", "dfg")


class ParameterError(ValueError):
    """An option is outside its allowed range."""


@dataclass(frozen=True, eq=False)
class FollowsGraphs:
    """Edge frequencies over a local activity index.

    ``activities[i]`` is the interned id of local index ``i`` (sorted ascending).
    ``unary``/``start``/``end`` always describe the log; filtering only touches
    ``dfg``/``ifg`` and ``nodes``.  ``unfiltered`` links a filtered graph back
    to the graph it came from.
    """

    activities: tuple[int, ...]
    labels: tuple[str, ...]
    dfg: np.ndarray
    ifg: np.ndarray
    unary: np.ndarray
    start: np.ndarray
    end: np.ndarray
    nodes: frozenset[int]
    unfiltered: FollowsGraphs | None = None

    @property
    def k(self) -> int:
        return len(self.activities)

    def index(self, activity: int) -> int:
        try:
            return self.activities.index(activity)
        except ValueError:
            raise KeyError(f"activity {activity} is not in this graph") from None

    def _pair(self, table: np.ndarray, a: int, b: int) -> int:
        return int(table[self.index(a), self.index(b)])

    def df(self, a: int, b: int) -> int:
        """|a -> b|"""
        return self._pair(self.dfg, a, b)

    def idf(self, a: int, b: int) -> int:
        """|a => b|"""
        return self._pair(self.ifg, a, b)

    def count(self, a: int) -> int:
        return int(self.unary[self.index(a)])

    def _edges(self, table: np.ndarray) -> dict[tuple[int, int], int]:
        rows, cols = np.nonzero(table)
        return {
            (self.activities[i], self.activities[j]): int(table[i, j])
            for i, j in zip(rows.tolist(), cols.tolist())
        }

    def dfg_edges(self) -> dict[tuple[int, int], int]:
        return self._edges(self.dfg)

    def ifg_edges(self) -> dict[tuple[int, int], int]:
        return self._edges(self.ifg)

    def start_counts(self) -> dict[int, int]:
        return {a: int(v) for a, v in zip(self.activities, self.start) if v}

    def end_counts(self) -> dict[int, int]:
        return {a: int(v) for a, v in zip(self.activities, self.end) if v}

    def unary_counts(self) -> dict[int, int]:
        return {a: int(v) for a, v in zip(self.activities, self.unary) if v}

    def labelled(self, edges: dict[tuple[int, int], int]) -> dict[tuple[str, str], int]:
        return {(self.labels[a], self.labels[b]): v for (a, b), v in edges.items()}


def flatten(log: EventLog, activities: tuple[int, ...]):
    """Variants as (events, offsets, counts) arrays over local indices."""
    local = {a: i for i, a in enumerate(activities)}
    variants = list(log.variants.items())
    lengths = np.fromiter((len(t) for t, _ in variants), dtype=np.int64, count=len(variants))
    offsets = np.zeros(len(variants) + 1, dtype=np.int64)
    np.cumsum(lengths, out=offsets[1:])
    events = np.fromiter(
        (local[a] for t, _ in variants for a in t), dtype=np.int64, count=int(offsets[-1])
    )
    counts = np.fromiter((c for _, c in variants), dtype=np.int64, count=len(variants))
    return events, offsets, counts


def build(log: EventLog) -> FollowsGraphs:
    """Count follows relations; empty traces contribute nothing."""
    activities = tuple(sorted(log.alphabet))
    k = len(activities)
    events, offsets, counts = flatten(log, activities)
    dfg, ifg, unary, start, end = _kernels.active().follows_counts(events, offsets, counts, k)
    return FollowsGraphs(
        activities=activities,
        labels=log.labels,
        dfg=dfg,
        ifg=ifg,
        unary=unary,
        start=start,
        end=end,
        nodes=frozenset(activities),
    )


def filter_cutoff(g: FollowsGraphs, f: float, scope: str = "joint") -> float:
    """Smallest edge frequency retained by percentile ``f``.

    Edges are ranked by frequency; the top ceil(f/100 * E) are kept together
    with every edge tied with the last one kept.  Returns ``inf`` when nothing
    is kept and 0 when there are no edges.
    """
    if not 0 <= f <= 100:
        raise ParameterError(f"filter percentage must be in [0, 100], got {f}")
    if scope not in FILTER_SCOPES:
        raise ParameterError(f"filter scope must be one of {FILTER_SCOPES}, got {scope!r}")
    freqs = g.dfg[g.dfg > 0]
    if scope == "joint":
        freqs = np.concatenate([freqs, g.ifg[g.ifg > 0]])
    if freqs.size == 0:
        return 0
    keep = math.ceil(f / 100 * freqs.size - 1e-9)
    if keep <= 0:
        return math.inf
    ranked = np.sort(freqs)[::-1]
    return int(ranked[keep - 1])


def filter_graphs(g: FollowsGraphs, f: float, scope: str = "joint") -> FollowsGraphs:
    """Keep the top ``f`` percent of edges (whole tie groups), drop the rest.

    ``scope="joint"`` ranks dfg and ifg edges in one list; ``scope="dfg"`` ranks
    and filters the dfg only and passes the ifg through unchanged.
    """
    cutoff = filter_cutoff(g, f, scope)
    dfg = np.where(g.dfg >= cutoff, g.dfg, 0)
    ifg = np.where(g.ifg >= cutoff, g.ifg, 0) if scope == "joint" else g.ifg.copy()
    connected = (dfg > 0).any(axis=0) | (dfg > 0).any(axis=1) | (ifg > 0).any(axis=0) | (ifg > 0).any(axis=1)
    if g.k <= 1:
        nodes = frozenset(g.activities)
    else:
        nodes = frozenset(a for a, keep in zip(g.activities, connected) if keep)
    base = g.unfiltered or g
    return replace(g, dfg=dfg, ifg=ifg, nodes=nodes, unfiltered=base)


def removed_dfg_edges(g: FollowsGraphs) -> dict[tuple[int, int], int]:
    """Dfg edges present before filtering but absent now."""
    if g.unfiltered is None:
        return {}
    mask = (g.unfiltered.dfg > 0) & (g.dfg == 0)
    return g._edges(np.where(mask, g.unfiltered.dfg, 0))


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(g: FollowsGraphs, *, show_removed: bool = True, include_ifg: bool = False) -> str:
    """Graphviz digraph of the dfg; removed edges are drawn red and dashed."""
    lines = ["digraph dfg {", "  rankdir=LR;", '  node [shape=box, style=rounded];']
    lines.append('  "__start" [shape=circle, label="", style=filled, fillcolor=green];')
    lines.append('  "__end" [shape=doublecircle, label="", style=filled, fillcolor=orange];')
    shown = set(g.nodes)
    if show_removed and g.unfiltered is not None:
        shown |= set(g.unfiltered.nodes)
    for a in g.activities:
        if a in shown:
            style = "" if a in g.nodes else ", style=dashed, color=red"
            lines.append(f"  n{a} [label={_quote(g.labels[a])}{style}];")
    for a, v in g.start_counts().items():
        if a in shown:
            lines.append(f'  "__start" -> n{a} [label="{v}"];')
    for a, v in g.end_counts().items():
        if a in shown:
            lines.append(f'  n{a} -> "__end" [label="{v}"];')
    for (a, b), v in sorted(g.dfg_edges().items()):
        lines.append(f'  n{a} -> n{b} [label="{v}"];')
    if show_removed:
        for (a, b), v in sorted(removed_dfg_edges(g).items()):
            lines.append(f'  n{a} -> n{b} [label="{v}", style=dashed, color=red];')
    if include_ifg:
        for (a, b), v in sorted(g.ifg_edges().items()):
            lines.append(f'  n{a} -> n{b} [label="{v}", style=dotted, color=gray, constraint=false];')
    lines.append("}")
    return "\n".join(lines) + "\n"
