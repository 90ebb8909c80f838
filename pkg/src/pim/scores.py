"""Pairwise activity relation scores."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .graphs import FollowsGraphs


class ScoreKind(enum.Enum):
    XOR = "xor"
    SEQ = "seq"
    PARA = "para"
    LOOP_SINGLE = "loop_single"
    LOOP_INDIRECT = "loop_indirect"


class ScoreDomainError(ValueError):
    """Scores are only defined for two distinct activities."""


def _balance(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """min(x / (y + 1), y / (x + 1))"""
    return np.minimum(x / (y + 1.0), y / (x + 1.0))


def raw_sequence(g: FollowsGraphs) -> np.ndarray:
    """Sequence quotient before clamping; antisymmetric."""
    fwd = g.dfg + g.ifg
    bwd = fwd.T
    return (fwd - bwd) / (fwd + bwd + 1.0)


@dataclass(frozen=True)
class ScoreTables:
    """All five scores as (k, k) arrays over the graph's local index.

    The diagonal of ``loop_single`` is meaningful (loop cuts may pair an
    activity with itself); the other diagonals are unused.
    """

    xor: np.ndarray
    seq: np.ndarray
    para: np.ndarray
    loop_single: np.ndarray
    loop_indirect: np.ndarray

    def table(self, kind: ScoreKind) -> np.ndarray:
        return getattr(self, kind.value)


def score_tables(g: FollowsGraphs) -> ScoreTables:
    dfg = g.dfg.astype(np.float64)
    ifg = g.ifg.astype(np.float64)
    unary = g.unary.astype(np.float64)
    together = dfg + dfg.T + ifg + ifg.T
    with np.errstate(divide="ignore", invalid="ignore"):
        alone_a = np.where(unary[:, None] > 0, (unary[:, None] - together) / unary[:, None], 0.0)
        alone_b = np.where(unary[None, :] > 0, (unary[None, :] - together) / unary[None, :], 0.0)
    # each half is clamped at 0: on logs with repetitions the follows counts can exceed |a|
    xor = (np.clip(alone_a, 0.0, 1.0) + np.clip(alone_b, 0.0, 1.0)) / 2
    seq = np.clip(raw_sequence(g), 0.0, 1.0)
    para = _balance(dfg, dfg.T)
    loop_single = np.minimum(dfg / (ifg.T + 1.0), ifg.T / (dfg + 1.0))
    loop_indirect = _balance(ifg, ifg.T)
    return ScoreTables(xor, seq, para, loop_single, loop_indirect)


def score(kind: ScoreKind, a: int, b: int, g: FollowsGraphs) -> float:
    """Score of relation ``kind`` between activities ``a`` and ``b`` (interned ids)."""
    if a == b:
        raise ScoreDomainError("self-relations are not scored")
    i, j = g.index(a), g.index(b)
    if g.unary[i] <= 0 or g.unary[j] <= 0:
        raise ScoreDomainError("both activities must occur in the log")
    return float(score_tables(g).table(kind)[i, j])


def score_table_csv(g: FollowsGraphs) -> str:
    """Every ordered pair with all five scores, one CSV row per pair."""
    tables = score_tables(g)
    kinds = list(ScoreKind)
    rows = ["a,b," + ",".join(k.value for k in kinds)]
    for i, a in enumerate(g.activities):
        for j, b in enumerate(g.activities):
            if i == j:
                continue
            values = ",".join(f"{tables.table(k)[i, j]:.6f}" for k in kinds)
            rows.append(f"{_csv_cell(g.labels[a])},{_csv_cell(g.labels[b])},{values}")
    return "\n".join(rows) + "\n"


def _csv_cell(text: str) -> str:
    if any(ch in text for ch in ',"\n'):
        return '"' + text.replace('"', '""') + '"'
    return text
