from __future__ import annotations

import logging
import random

import pytest
from hypothesis import given, settings

from pim.cuts import Operator
from pim.discovery import DiscoveryOptions, RecursionGuardError, discover, discover_with_trace, top_activities
from pim.eventlog import EventLog
from pim.graphs import ParameterError
from pim.split import BaseCaseKind
from pim.synthetic import random_tree, sample_log
from pim.tree import TAU, canonical, leaf, loop, parse_text, to_text, xor

from .conftest import L0_TREE, small_logs


def test_l0_default_recovers_reference(l0):
    assert canonical(discover(l0)) == canonical(parse_text(L0_TREE))


@pytest.mark.parametrize("opts", [DiscoveryOptions(filter_percent=81), DiscoveryOptions(filter_percent=70, filter_scope="dfg")])
def test_l0_with_frequency_one_edges_removed(l0, opts):
    assert canonical(discover(l0, opts)) == canonical(parse_text(L0_TREE))


def test_empty_log_is_tau():
    assert discover(EventLog.from_traces({})) == TAU
    assert discover(EventLog.from_traces({(): 4})) == TAU


def test_single_activity_cases():
    assert discover(EventLog.from_traces({("a",): 3})) == leaf("a")
    assert discover(EventLog.from_traces({("a", "a", "a"): 4})) == loop(leaf("a"), TAU)
    assert discover(EventLog.from_traces({("a",): 1, (): 3})) == xor(TAU, leaf("a"))


def test_skip_majority():
    t = discover(EventLog.from_traces({(): 6, ("a", "b"): 4}))
    assert t.op is Operator.XOR and t.children[0] == TAU
    t = discover(EventLog.from_traces({(): 4, ("a", "b"): 6}))
    assert not (t.op is Operator.XOR and TAU in t.children)


def test_trace_records_every_step(l0):
    _, trace = discover_with_trace(l0)
    assert len(trace.cuts()) == 6
    leaves = [s for s in trace.steps if s.base is BaseCaseKind.LEAF]
    assert len(leaves) == 7
    text = "\n".join(s.describe(l0.labels) for s in trace.steps)
    assert f"cut ({Operator.LOOP.glyph}, {{b,c}}, {{d}}" in text


def test_pim_trace_env_logs(l0, monkeypatch, caplog):
    monkeypatch.setenv("PIM_TRACE", "1")
    with caplog.at_level(logging.INFO, logger="pim.discovery"):
        discover(l0)
    assert any("cut" in r.message for r in caplog.records)


def test_top_activities_projection(l0):
    keep = top_activities(l0, 3)
    assert {l0.labels[a] for a in keep} == {"a", "c", "b"}
    t = discover(l0, DiscoveryOptions(max_activities=3))
    assert set(t.leaves()) == {"a", "b", "c"}


def test_options_validation():
    with pytest.raises(ParameterError):
        DiscoveryOptions(filter_percent=120)
    with pytest.raises(ParameterError):
        DiscoveryOptions(max_activities=0)
    with pytest.raises(ParameterError):
        DiscoveryOptions(exhaustive_limit=0)
    with pytest.raises(ParameterError):
        DiscoveryOptions(filter_scope="ifg")


def test_recursion_guard(l0):
    with pytest.raises(RecursionGuardError):
        discover(l0, DiscoveryOptions(max_recursion_depth=1))


@given(small_logs())
@settings(max_examples=200)
def test_terminates_deterministic_and_covers_alphabet(log):
    t1, trace = discover_with_trace(log)
    t2 = discover(log)
    assert t1 == t2
    # xor splits may drop a minority activity, but no label is duplicated or invented
    leaves = t1.leaves()
    assert len(leaves) == len(set(leaves))
    assert set(leaves) <= {log.labels[a] for a in log.alphabet}
    assert len(trace) <= 2 * len(log.alphabet) + 1


def test_backends_give_same_tree(l0):
    assert discover(l0, DiscoveryOptions(backend="numpy")) == discover(l0, DiscoveryOptions(backend="numba"))


def test_recovers_loop_free_trees():
    rng = random.Random(11)
    hits = 0
    for _ in range(20):
        tree = random_tree(list("abcde"), rng, loop_prob=0.0)
        log = sample_log(tree, 2000, rng)
        hits += canonical(discover(log, DiscoveryOptions(filter_percent=100))) == canonical(tree)
    assert hits >= 15
