from __future__ import annotations

import json
import random

import pytest

from pim.bpmn import (
    AND_SPLIT,
    XOR_SPLIT,
    BlockGraph,
    block_graph_dot,
    check_block_structure,
    simplicity,
    to_block_graph,
    to_dot,
    tree_dot,
)
from pim.synthetic import random_tree
from pim.tree import TAU, leaf, loop, par, parse_text, xor

from .conftest import L0_TREE


@pytest.mark.parametrize(
    "tree, size, cfc",
    [
        (leaf("a"), 3, 0),
        (xor(leaf("a"), leaf("b")), 6, 2),
        (par(leaf("a"), leaf("b")), 6, 1),
        (xor(leaf("a"), TAU), 5, 2),
        (xor(leaf("a"), leaf("b"), leaf("c")), 7, 3),
    ],
)
def test_size_and_cfc(tree, size, cfc):
    assert simplicity(to_block_graph(tree)) == (size, cfc)


def test_loop_translation():
    g = to_block_graph(loop(leaf("a"), leaf("b")))
    assert check_block_structure(g) == []
    # xor join, a, xor split, b plus start/end
    assert g.size == 6
    assert simplicity(g)[1] == 2


def test_l0_tree_is_sound():
    g = to_block_graph(parse_text(L0_TREE))
    assert check_block_structure(g) == []
    assert {k for k in g.kinds if k.endswith("split")} == {XOR_SPLIT, AND_SPLIT}
    assert json.loads(g.to_json())["nodes"][0]["kind"] == "start"


def test_random_trees_are_sound():
    rng = random.Random(1)
    for _ in range(100):
        t = random_tree(list("abcdef"), rng, loop_prob=0.3, tau_prob=0.3)
        assert check_block_structure(to_block_graph(t)) == []


def test_checker_catches_broken_graphs():
    g = BlockGraph()
    s = g.add("start")
    x = g.add("xor_split")
    a = g.add("task", "a")
    e = g.add("end")
    g.connect(s, x)
    g.connect(x, a)
    g.connect(a, e)
    problems = check_block_structure(g)
    assert any("matching join" in p for p in problems)


def test_dot_outputs():
    t = parse_text(L0_TREE)
    assert to_dot(t).startswith("digraph")
    assert block_graph_dot(to_block_graph(t)) == to_dot(to_block_graph(t))
    assert "loop" in tree_dot(t) or "↺" in tree_dot(t)
