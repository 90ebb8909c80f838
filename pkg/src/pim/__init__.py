"""Probabilistic inductive process discovery.

Discovers block-structured process trees from event logs by scoring pairwise
activity relations, picking the most likely binary cut and recursing.
"""

from .cuts import Cut, LogShape, Operator, find_cut, rank_cuts, repetition_factor
from .discovery import DiscoveryOptions, discover, discover_with_trace
from .eventlog import CsvConfig, EventLog, log_stats, parse_csv, parse_variants, parse_xes_lite
from .graphs import FollowsGraphs, build, filter_graphs
from .quality import QualityReport, evaluate
from .scores import ScoreKind, score
from .tree import ProcessTree, language, normalize, parse_text, to_text

__version__ = "0.1.0"

__all__ = [
    "CsvConfig",
    "Cut",
    "DiscoveryOptions",
    "EventLog",
    "FollowsGraphs",
    "LogShape",
    "Operator",
    "ProcessTree",
    "QualityReport",
    "ScoreKind",
    "build",
    "discover",
    "discover_with_trace",
    "evaluate",
    "filter_graphs",
    "find_cut",
    "language",
    "log_stats",
    "normalize",
    "parse_csv",
    "parse_text",
    "parse_variants",
    "parse_xes_lite",
    "rank_cuts",
    "repetition_factor",
    "score",
    "to_text",
]
