"""Translation of process trees into block-structured graphs with XOR and AND gateways."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

from .cuts import Operator
from .tree import ProcessTree

START, END, TASK, XOR_SPLIT, XOR_JOIN, AND_SPLIT, AND_JOIN = (
    "start", "end", "task", "xor_split", "xor_join", "and_split", "and_join",
)
GATEWAY_KINDS = {XOR_SPLIT, XOR_JOIN, AND_SPLIT, AND_JOIN}


@dataclass
class BlockGraph:
    kinds: list[str] = field(default_factory=list)
    labels: list[str | None] = field(default_factory=list)
    edges: list[tuple[int, int]] = field(default_factory=list)
    # split gateway id -> matching join gateway id
    pairs: dict[int, int] = field(default_factory=dict)

    def add(self, kind: str, label: str | None = None) -> int:
        self.kinds.append(kind)
        self.labels.append(label)
        return len(self.kinds) - 1

    def connect(self, a: int, b: int) -> None:
        self.edges.append((a, b))

    @property
    def size(self) -> int:
        return len(self.kinds)

    def out_degree(self, n: int) -> int:
        return sum(1 for a, _ in self.edges if a == n)

    def in_degree(self, n: int) -> int:
        return sum(1 for _, b in self.edges if b == n)

    def to_json(self, **kwargs) -> str:
        return json.dumps(
            {
                "nodes": [{"id": i, "kind": k, "label": lab} for i, (k, lab) in enumerate(zip(self.kinds, self.labels))],
                "edges": [list(e) for e in self.edges],
                "gateway_pairs": {str(s): j for s, j in self.pairs.items()},
            },
            **kwargs,
        )


def _fragment(g: BlockGraph, t: ProcessTree) -> tuple[int, int] | None:
    """Add ``t`` to ``g``; return its (entry, exit) nodes or None for a silent block."""
    if t.op is None:
        if t.label is None:
            return None
        n = g.add(TASK, t.label)
        return n, n
    if t.op is Operator.SEQ:
        parts = [f for f in (_fragment(g, c) for c in t.children) if f is not None]
        if not parts:
            return None
        for (_, out), (nxt, _) in zip(parts, parts[1:]):
            g.connect(out, nxt)
        return parts[0][0], parts[-1][1]
    if t.op in (Operator.XOR, Operator.PARA):
        split_kind, join_kind = (XOR_SPLIT, XOR_JOIN) if t.op is Operator.XOR else (AND_SPLIT, AND_JOIN)
        split = g.add(split_kind)
        join = g.add(join_kind)
        g.pairs[split] = join
        for c in t.children:
            frag = _fragment(g, c)
            if frag is None:
                g.connect(split, join)
            else:
                g.connect(split, frag[0])
                g.connect(frag[1], join)
        return split, join
    # loop: xor-join entry, body, xor-split exit with back paths through the redo children
    join = g.add(XOR_JOIN)
    split = g.add(XOR_SPLIT)
    g.pairs[split] = join
    body = _fragment(g, t.children[0])
    if body is None:
        g.connect(join, split)
    else:
        g.connect(join, body[0])
        g.connect(body[1], split)
    for c in t.children[1:]:
        frag = _fragment(g, c)
        if frag is None:
            g.connect(split, join)
        else:
            g.connect(split, frag[0])
            g.connect(frag[1], join)
    return join, split


def to_block_graph(t: ProcessTree) -> BlockGraph:
    g = BlockGraph()
    start = g.add(START)
    end = g.add(END)
    frag = _fragment(g, t)
    if frag is None:
        g.connect(start, end)
    else:
        g.connect(start, frag[0])
        g.connect(frag[1], end)
    return g


def _reach(n: int, adjacency: dict[int, list[int]]) -> set[int]:
    seen = {n}
    queue = deque([n])
    while queue:
        x = queue.popleft()
        for y in adjacency.get(x, ()):
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return seen


def check_block_structure(g: BlockGraph) -> list[str]:
    """Structural problems of ``g``; an empty list means the graph is sound by construction."""
    problems = []
    starts = [i for i, k in enumerate(g.kinds) if k == START]
    ends = [i for i, k in enumerate(g.kinds) if k == END]
    if len(starts) != 1 or len(ends) != 1:
        return [f"expected one start and one end, got {len(starts)} and {len(ends)}"]
    start, end = starts[0], ends[0]
    if g.in_degree(start) or g.out_degree(start) != 1:
        problems.append("start must have no incoming and exactly one outgoing edge")
    if g.out_degree(end) or g.in_degree(end) != 1:
        problems.append("end must have exactly one incoming and no outgoing edge")
    for i, kind in enumerate(g.kinds):
        if kind not in GATEWAY_KINDS | {START, END, TASK}:
            problems.append(f"node {i} has unsupported kind {kind!r}")
        if kind == TASK and (g.in_degree(i) != 1 or g.out_degree(i) != 1):
            problems.append(f"task {i} must have one incoming and one outgoing edge")
    splits = {i for i, k in enumerate(g.kinds) if k in (XOR_SPLIT, AND_SPLIT)}
    joins = {i for i, k in enumerate(g.kinds) if k in (XOR_JOIN, AND_JOIN)}
    if set(g.pairs) != splits:
        problems.append("every split gateway needs exactly one matching join")
    if sorted(g.pairs.values()) != sorted(joins):
        problems.append("every join gateway needs exactly one matching split")
    for s, j in g.pairs.items():
        if g.kinds[s].split("_")[0] != g.kinds[j].split("_")[0]:
            problems.append(f"gateway pair {s}/{j} mixes gateway types")
    fwd: dict[int, list[int]] = {}
    bwd: dict[int, list[int]] = {}
    for a, b in g.edges:
        fwd.setdefault(a, []).append(b)
        bwd.setdefault(b, []).append(a)
    on_path = _reach(start, fwd) & _reach(end, bwd)
    stray = set(range(g.size)) - on_path
    if stray:
        problems.append(f"nodes not on a start-to-end path: {sorted(stray)}")
    return problems


def simplicity(g: BlockGraph) -> tuple[int, int]:
    """(size, control-flow complexity); xor splits add their fan-out, and splits add 1."""
    cfc = 0
    for i, kind in enumerate(g.kinds):
        if kind == XOR_SPLIT:
            cfc += g.out_degree(i)
        elif kind == AND_SPLIT:
            cfc += 1
    return g.size, cfc


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


_GATEWAY_STYLE = {
    XOR_SPLIT: "×", XOR_JOIN: "×", AND_SPLIT: "+", AND_JOIN: "+",
}


def block_graph_dot(g: BlockGraph) -> str:
    lines = ["digraph model {", "  rankdir=LR;"]
    for i, (kind, label) in enumerate(zip(g.kinds, g.labels)):
        if kind == START:
            attrs = 'shape=circle, label="", style=filled, fillcolor=green'
        elif kind == END:
            attrs = 'shape=doublecircle, label="", style=filled, fillcolor=orange'
        elif kind == TASK:
            attrs = f"shape=box, style=rounded, label={_dot_quote(label or '')}"
        else:
            attrs = f'shape=diamond, label="{_GATEWAY_STYLE[kind]}"'
        lines.append(f"  n{i} [{attrs}];")
    for a, b in g.edges:
        lines.append(f"  n{a} -> n{b};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def tree_dot(t: ProcessTree) -> str:
    """The tree itself as a graphviz digraph, operators drawn with their glyphs."""
    lines = ["digraph tree {", "  node [shape=circle];"]
    counter = [0]

    def visit(x: ProcessTree) -> int:
        n = counter[0]
        counter[0] += 1
        if x.op is None:
            text = "τ" if x.label is None else x.label
            shape = "box" if x.label is not None else "point"
            lines.append(f"  n{n} [label={_dot_quote(text)}, shape={shape}];")
        else:
            lines.append(f"  n{n} [label={_dot_quote(x.op.glyph)}];")
            for c in x.children:
                lines.append(f"  n{n} -> n{visit(c)};")
        return n

    visit(t)
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_dot(t: ProcessTree | BlockGraph) -> str:
    """DOT for a block graph, translating a tree first when given one."""
    if isinstance(t, ProcessTree):
        t = to_block_graph(t)
    return block_graph_dot(t)
