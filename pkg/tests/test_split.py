from __future__ import annotations

import random

import pytest
from hypothesis import assume, given, settings

from pim.cuts import Cut, Operator
from pim.eventlog import EventLog
from pim.split import BaseCaseKind, SplitContractError, base_case, split

from .conftest import L0_TRACES, small_logs


def cut(log, op, left, right, **kw):
    s1 = frozenset(log.activity_id(x) for x in left)
    s2 = frozenset(log.activity_id(x) for x in right)
    if op is Operator.LOOP:
        kw.setdefault("redo_starts", s2)
        kw.setdefault("redo_ends", s2)
    return Cut(op, s1, s2, 0.0, **kw)


def labelled(log):
    out = dict(log.traces())
    if log.empty_count:
        out[()] = log.empty_count
    return out


def test_l5_loop_split(l5):
    parts = split(l5, cut(l5, Operator.LOOP, "bc", "d"))
    assert labelled(parts.left) == {("b", "c"): 6, ("c", "b"): 5}
    assert labelled(parts.right) == {("d",): 5}
    assert parts.filtered_events == 0


def test_l2_xor_split_drops_minority_events():
    l2 = EventLog.from_traces({t[1:]: c for t, c in L0_TRACES.items()})
    parts = split(l2, cut(l2, Operator.XOR, "bcdef", "g"))
    assert labelled(parts.right) == {("g",): 9, ("g", "g"): 1}
    assert parts.filtered_events == 1


def test_xor_tie_goes_left():
    log = EventLog.from_traces([("a", "b")])
    parts = split(log, cut(log, Operator.XOR, "a", "b"))
    assert labelled(parts.left) == {("a",): 1}
    assert parts.right.num_traces == 0


def test_seq_split_minimizes_misplaced_events():
    log = EventLog.from_traces({("a", "b", "a", "b"): 1, ("b", "a"): 1})
    parts = split(log, cut(log, Operator.SEQ, "a", "b"))
    # abab: best index 1 or 3 (both misplace 1); the smaller wins
    assert labelled(parts.left) == {("a",): 1, (): 1}
    assert labelled(parts.right) == {("b", "b"): 1, ("b",): 1}
    assert parts.filtered_events == 2


def test_para_split_projects():
    log = EventLog.from_traces([("a", "b", "a", "c")])
    parts = split(log, cut(log, Operator.PARA, "ac", "b"))
    assert labelled(parts.left) == {("a", "a", "c"): 1}
    assert labelled(parts.right) == {("b",): 1}


def test_loop_split_leading_and_trailing_redo():
    log = EventLog.from_traces([("r", "a", "r")])
    parts = split(log, cut(log, Operator.LOOP, "a", "r"))
    assert labelled(parts.left) == {(): 2, ("a",): 1}
    assert labelled(parts.right) == {("r",): 2}


def test_empty_traces_copied_to_both_children():
    log = EventLog.from_traces({("a", "b"): 1, (): 2})
    parts = split(log, cut(log, Operator.SEQ, "a", "b"))
    assert parts.left.empty_count == 2
    assert parts.right.empty_count == 2


def test_cut_must_cover_alphabet():
    log = EventLog.from_traces([("a", "b", "c")])
    with pytest.raises(SplitContractError):
        split(log, cut(log, Operator.SEQ, "a", "b"))


@given(small_logs())
@settings(max_examples=200)
def test_split_conserves_events(log):
    acts = sorted(log.alphabet)
    assume(len(acts) >= 2)
    rng = random.Random(log.num_events)
    s1 = frozenset(rng.sample(acts, rng.randint(1, len(acts) - 1)))
    s2 = frozenset(acts) - s1
    for op in Operator:
        kw = {"redo_starts": s2, "redo_ends": s2} if op is Operator.LOOP else {}
        parts = split(log, Cut(op, s1, s2, 0.0, **kw))
        assert parts.left.num_events + parts.right.num_events + parts.filtered_events == log.num_events
        assert parts.left.alphabet <= s1 and parts.right.alphabet <= s2
        if op in (Operator.SEQ, Operator.PARA):
            assert parts.left.num_traces == log.num_traces == parts.right.num_traces
        if op in (Operator.PARA, Operator.LOOP):
            assert parts.filtered_events == 0


def test_base_cases():
    assert base_case(EventLog.from_traces({(): 3})).kind is BaseCaseKind.SILENT
    assert base_case(EventLog.from_traces({(): 6, ("a", "b"): 4})).kind is BaseCaseKind.SKIP
    assert base_case(EventLog.from_traces({(): 4, ("a", "b"): 6})) is None
    assert base_case(EventLog.from_traces({("a",): 3, ("a", "a"): 1})).kind is BaseCaseKind.LEAF
    bc = base_case(EventLog.from_traces({("a", "a", "a"): 4}))
    assert bc.kind is BaseCaseKind.LOOP_LEAF and bc.activity == 0
    # exactly half empty is not a majority
    assert base_case(EventLog.from_traces({(): 5, ("a",): 5})).kind is BaseCaseKind.LEAF
