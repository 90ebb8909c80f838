"""Aggregated cut scores and the maximum-score binary cut search."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import networkx as nx
import numpy as np

from . import _kernels
from .eventlog import EventLog
from .graphs import FollowsGraphs
from .scores import ScoreTables, score_tables

TIE_TOLERANCE = 1e-9
DEFAULT_EXHAUSTIVE_LIMIT = 12


class Operator(enum.Enum):
    XOR = "x"
    SEQ = "->"
    PARA = "/\\"
    LOOP = "loop"

    @property
    def rank(self) -> int:
        """Tie-break precedence: xor, seq, para, loop."""
        return _OP_ORDER.index(self)

    @property
    def glyph(self) -> str:
        return {"x": "×", "->": "→", "/\\": "∧", "loop": "↺"}[self.value]


_OP_ORDER = (Operator.XOR, Operator.SEQ, Operator.PARA, Operator.LOOP)


class CutDomainError(ValueError):
    """A cut or shape violates a precondition of the scoring functions."""


@dataclass(frozen=True)
class LogShape:
    trace_count: int
    event_count: int
    alphabet_size: int

    @classmethod
    def of(cls, log: EventLog) -> LogShape:
        """Shape of a log, ignoring empty traces."""
        return cls(log.num_nonempty, log.num_events, len(log.alphabet))


def repetition_factor(shape: LogShape) -> float:
    """r(L) = |L| / (||L|| / |Σ|); below 1 when activities repeat within traces."""
    if shape.event_count <= 0 or shape.alphabet_size <= 0:
        raise CutDomainError("repetition factor needs at least one event")
    return shape.trace_count / (shape.event_count / shape.alphabet_size)


@dataclass(frozen=True)
class Cut:
    operator: Operator
    sigma1: frozenset[int]
    sigma2: frozenset[int]
    score: float
    redo_starts: frozenset[int] = frozenset()
    redo_ends: frozenset[int] = frozenset()

    def __post_init__(self) -> None:
        if not self.sigma1 or not self.sigma2:
            raise CutDomainError("both sides of a cut must be non-empty")
        if self.sigma1 & self.sigma2:
            raise CutDomainError("cut sides must be disjoint")
        if self.operator is Operator.LOOP and (not self.redo_starts or not self.redo_ends):
            raise CutDomainError("loop cuts need non-empty redo start and end sets")

    def sort_key(self) -> tuple:
        return (-self.score, self.operator.rank, tuple(sorted(self.sigma1)))

    def describe(self, labels: Sequence[str]) -> str:
        def names(s: Iterable[int]) -> str:
            return "{" + ",".join(labels[a] for a in sorted(s)) + "}"

        text = f"({self.operator.glyph}, {names(self.sigma1)}, {names(self.sigma2)}"
        if self.operator is Operator.LOOP:
            text += f", S2={names(self.redo_starts)}, E2={names(self.redo_ends)}"
        return text + f") score={self.score:.4f}"


# ----------------------------------------------------------- aggregated scores


def _indices(g: FollowsGraphs, side: Iterable[int]) -> np.ndarray:
    idx = np.array(sorted(g.index(a) for a in side), dtype=np.int64)
    if idx.size == 0:
        raise CutDomainError("cut sides must be non-empty")
    return idx


def _pair_bag(table: np.ndarray, i1: np.ndarray, i2: np.ndarray) -> np.ndarray:
    return table[np.ix_(i1, i2)].ravel()


def aggregate_xor_seq(
    op: Operator, sigma1: Iterable[int], sigma2: Iterable[int], tables: ScoreTables, g: FollowsGraphs
) -> float:
    """Mean minus population standard deviation of the pair scores across the cut."""
    if op not in (Operator.XOR, Operator.SEQ):
        raise CutDomainError(f"expected xor or seq, got {op}")
    table = tables.xor if op is Operator.XOR else tables.seq
    bag = _pair_bag(table, _indices(g, sigma1), _indices(g, sigma2))
    return float(bag.mean() - bag.std())


def aggregate_para(
    sigma1: Iterable[int], sigma2: Iterable[int], tables: ScoreTables, g: FollowsGraphs, shape: LogShape
) -> float:
    bag = _pair_bag(tables.para, _indices(g, sigma1), _indices(g, sigma2))
    return float(bag.mean() * min(repetition_factor(shape), 1.0))


def loop_border(g: FollowsGraphs, sigma1: Iterable[int], sigma2: Iterable[int]) -> tuple[frozenset[int], frozenset[int]]:
    """Redo entry points (dfg edge in from the body) and exit points (dfg edge out to it).

    Either set falls back to the whole redo side when no such edge exists.
    """
    i1 = _indices(g, sigma1)
    i2 = _indices(g, sigma2)
    adj = g.dfg > 0
    starts = [g.activities[j] for j in i2 if adj[i1, j].any()]
    ends = [g.activities[j] for j in i2 if adj[j, i1].any()]
    redo = frozenset(g.activities[j] for j in i2)
    return frozenset(starts) or redo, frozenset(ends) or redo


def aggregate_loop(
    sigma1: Iterable[int],
    sigma2: Iterable[int],
    redo_starts: Iterable[int],
    redo_ends: Iterable[int],
    tables: ScoreTables,
    g: FollowsGraphs,
    shape: LogShape,
) -> float:
    """Loop score: direct loop scores on enter/exit pairs, indirect ones elsewhere, boosted by repetition.

    ``enter = End(L) × redo_starts`` and ``exit = redo_ends × Start(L)``; an end
    or start activity placed on the redo side therefore pairs with redo
    activities (possibly itself), which penalizes such cuts.
    """
    i1 = _indices(g, sigma1)
    i2 = _indices(g, sigma2)
    s2 = _indices(g, redo_starts)
    e2 = _indices(g, redo_ends)
    if not set(s2) <= set(i2) or not set(e2) <= set(i2):
        raise CutDomainError("redo start/end sets must lie on the redo side")
    k = g.k
    ends = np.nonzero(g.end > 0)[0]
    starts = np.nonzero(g.start > 0)[0]
    border = np.zeros((k, k), dtype=bool)
    border[np.ix_(ends, s2)] = True
    border[np.ix_(e2, starts)] = True
    cross = np.zeros((k, k), dtype=bool)
    cross[np.ix_(i1, i2)] = True
    inner = cross & ~border
    values = np.concatenate([tables.loop_single[border], tables.loop_indirect[inner]])
    mean = float(values.mean())
    r = min(repetition_factor(shape), 1.0)
    return mean + mean * (1.0 - r)


# ------------------------------------------------------------------ cut search


@dataclass
class _Context:
    g: FollowsGraphs
    shape: LogShape
    tables: ScoreTables
    adj: np.ndarray
    start: np.ndarray
    end: np.ndarray
    r: float
    kernels: object = field(repr=False, default=None)

    @classmethod
    def build(cls, g: FollowsGraphs, shape: LogShape, backend: str | None = None) -> _Context:
        return cls(
            g=g,
            shape=shape,
            tables=score_tables(g),
            adj=g.dfg > 0,
            start=g.start > 0,
            end=g.end > 0,
            r=repetition_factor(shape),
            kernels=_kernels.get_kernels(backend),
        )

    def args(self):
        t = self.tables
        return (t.xor, t.seq, t.para, t.loop_single, t.loop_indirect, self.adj, self.start, self.end, self.r)

    def score_members(self, member: np.ndarray) -> np.ndarray:
        return self.kernels.score_cuts(np.ascontiguousarray(member, dtype=np.bool_), *self.args())

    def enumerate_all(self) -> np.ndarray:
        return self.kernels.enumerate_cuts(self.g.k, *self.args())

    def make_cut(self, op: Operator, member: np.ndarray, score: float) -> Cut:
        acts = self.g.activities
        s1 = frozenset(acts[i] for i in np.nonzero(member)[0])
        s2 = frozenset(acts[i] for i in np.nonzero(~member)[0])
        if op is Operator.LOOP:
            starts, ends = loop_border(self.g, s1, s2)
            return Cut(op, s1, s2, float(score), starts, ends)
        return Cut(op, s1, s2, float(score))


def _select(candidates: list[tuple[float, int, tuple[int, ...]]]) -> tuple[float, int, tuple[int, ...]]:
    """Maximum score; near-ties broken by operator precedence then smallest Σ1."""
    best = max(c[0] for c in candidates)
    tied = [c for c in candidates if c[0] >= best - TIE_TOLERANCE]
    return min(tied, key=lambda c: (c[1], c[2]))


def _member_tuple(member: np.ndarray) -> tuple[int, ...]:
    return tuple(np.nonzero(member)[0].tolist())


def _from_mask(mask: int, k: int) -> np.ndarray:
    return ((mask >> np.arange(k)) & 1).astype(bool)


def rank_cuts(
    g: FollowsGraphs,
    shape: LogShape,
    *,
    exhaustive_limit: int = DEFAULT_EXHAUSTIVE_LIMIT,
    top: int | None = 1,
    backend: str | None = None,
) -> list[Cut]:
    """Best cuts first, in tie-break order.  ``top=None`` returns every evaluated candidate."""
    if g.k < 2:
        raise CutDomainError("cut search needs at least two activities")
    ctx = _Context.build(g, shape, backend)
    if g.k <= exhaustive_limit:
        scores = ctx.enumerate_all()
        if top is not None:
            # only candidates that can reach the requested ranks need tuples
            flat = np.sort(scores.ravel())[::-1]
            floor = flat[min(top, flat.size) - 1] - TIE_TOLERANCE
            rows, cols = np.nonzero(scores >= floor)
        else:
            rows, cols = np.nonzero(np.ones_like(scores, dtype=bool))
        candidates = [
            (float(scores[idx, col]), int(col), _member_tuple(_from_mask(int(idx) + 1, g.k)))
            for idx, col in zip(rows, cols)
        ]
    else:
        candidates = _heuristic_candidates(ctx)
    if top == 1:
        chosen = [_select(candidates)]
    else:
        chosen = sorted(candidates, key=lambda c: (-c[0], c[1], c[2]))
        # near-ties in float order still follow the deterministic tie-break
        chosen = _stable_near_ties(chosen)
        if top is not None:
            chosen = chosen[:top]
    out = []
    for score, col, members in chosen:
        member = np.zeros(g.k, dtype=bool)
        member[list(members)] = True
        out.append(ctx.make_cut(_OP_ORDER[col], member, score))
    return out


def _stable_near_ties(ordered: list[tuple[float, int, tuple[int, ...]]]) -> list:
    out: list = []
    group: list = []
    for c in ordered:
        if group and group[0][0] - c[0] > TIE_TOLERANCE:
            out.extend(sorted(group, key=lambda x: (x[1], x[2])))
            group = []
        group.append(c)
    out.extend(sorted(group, key=lambda x: (x[1], x[2])))
    return out


def find_cut(
    g: FollowsGraphs,
    shape: LogShape,
    *,
    exhaustive_limit: int = DEFAULT_EXHAUSTIVE_LIMIT,
    backend: str | None = None,
) -> Cut:
    """The maximum-score cut; exact for up to ``exhaustive_limit`` activities, heuristic above."""
    return rank_cuts(g, shape, exhaustive_limit=exhaustive_limit, top=1, backend=backend)[0]


# ------------------------------------------------------------- heuristic search


def _seed_members(g: FollowsGraphs) -> list[np.ndarray]:
    k = g.k
    seeds: list[np.ndarray] = []
    graph = nx.DiGraph()
    graph.add_nodes_from(range(k))
    rows, cols = np.nonzero(g.dfg)
    graph.add_edges_from((int(i), int(j)) for i, j in zip(rows, cols) if i != j)

    def add(indices: Iterable[int]) -> None:
        member = np.zeros(k, dtype=bool)
        member[list(indices)] = True
        if 0 < member.sum() < k:
            seeds.append(member)

    # xor-shaped: weakly connected components
    components = sorted((sorted(c) for c in nx.weakly_connected_components(graph)), key=lambda c: c[0])
    if len(components) > 1:
        for comp in components:
            add(comp)

    # seq-shaped: prefixes of a topological order of the strongly connected components
    cond = nx.condensation(graph)
    order = list(nx.lexicographical_topological_sort(cond, key=lambda n: min(cond.nodes[n]["members"])))
    prefix: list[int] = []
    for node in order[:-1]:
        prefix.extend(cond.nodes[node]["members"])
        add(prefix)

    # peel-offs: each activity alone, on either side
    for i in range(k):
        add([i])
        add([j for j in range(k) if j != i])

    # start activities versus the rest (loop and sequence shaped)
    add(np.nonzero(g.start > 0)[0].tolist())
    add(np.nonzero(g.end > 0)[0].tolist())

    unique: dict[tuple[int, ...], np.ndarray] = {}
    for s in seeds:
        unique.setdefault(_member_tuple(s), s)
    return list(unique.values())


def _hill_climb(ctx: _Context, member: np.ndarray, col: int, score: float, max_steps: int) -> tuple[np.ndarray, float]:
    k = ctx.g.k
    for _ in range(max_steps):
        moves = np.repeat(member[None, :], k, axis=0)
        moves[np.arange(k), np.arange(k)] ^= True
        sizes = moves.sum(axis=1)
        valid = (sizes > 0) & (sizes < k)
        if not valid.any():
            break
        moves = moves[valid]
        scores = ctx.score_members(moves)[:, col]
        best = int(np.argmax(scores))
        if scores[best] <= score + TIE_TOLERANCE:
            break
        member, score = moves[best], float(scores[best])
    return member, score


def _heuristic_candidates(ctx: _Context, beam: int = 8) -> list[tuple[float, int, tuple[int, ...]]]:
    seeds = _seed_members(ctx.g)
    member_block = np.array(seeds, dtype=bool)
    scores = ctx.score_members(member_block)
    candidates = {}
    for s_idx, member in enumerate(seeds):
        for col in range(4):
            candidates[(col, _member_tuple(member))] = float(scores[s_idx, col])
    # refine the best few seeds of every operator
    for col in range(4):
        order = np.argsort(-scores[:, col], kind="stable")[:beam]
        for s_idx in order:
            member, score = _hill_climb(ctx, seeds[s_idx].copy(), col, float(scores[s_idx, col]), 4 * ctx.g.k)
            candidates[(col, _member_tuple(member))] = score
    return [(score, col, members) for (col, members), score in candidates.items()]
