"""Process trees: construction, text/JSON formats, normalization and bounded language."""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product
from typing import Any, Iterable

from .cuts import Operator

DEFAULT_LANGUAGE_LIMIT = 200_000

_OP_BY_TOKEN = {op.value: op for op in Operator}


class TreeParseError(ValueError):
    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{message} at position {position}")


class TreeArityError(ValueError):
    pass


class LanguageExplosion(RuntimeError):
    """The bounded language exceeds the configured trace limit."""


@dataclass(frozen=True)
class ProcessTree:
    """A leaf (``op is None``; ``label is None`` means silent) or an operator node."""

    op: Operator | None = None
    label: str | None = None
    children: tuple[ProcessTree, ...] = ()

    def __post_init__(self) -> None:
        if self.op is None:
            if self.children:
                raise TreeArityError("leaves have no children")
        else:
            if self.label is not None:
                raise TreeArityError("operator nodes carry no label")
            if len(self.children) < 2:
                raise TreeArityError(f"{self.op.value} needs at least two children, got {len(self.children)}")

    @property
    def is_leaf(self) -> bool:
        return self.op is None

    @property
    def is_tau(self) -> bool:
        return self.op is None and self.label is None

    def leaves(self) -> list[str]:
        if self.op is None:
            return [] if self.label is None else [self.label]
        return [a for c in self.children for a in c.leaves()]

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)

    def __str__(self) -> str:
        return to_text(self)


TAU = ProcessTree()


def leaf(label: str) -> ProcessTree:
    return ProcessTree(label=label)


def node(op: Operator | str, *children: ProcessTree) -> ProcessTree:
    if isinstance(op, str):
        op = _OP_BY_TOKEN[op]
    return ProcessTree(op=op, children=tuple(children))


def xor(*children: ProcessTree) -> ProcessTree:
    return node(Operator.XOR, *children)


def seq(*children: ProcessTree) -> ProcessTree:
    return node(Operator.SEQ, *children)


def par(*children: ProcessTree) -> ProcessTree:
    return node(Operator.PARA, *children)


def loop(*children: ProcessTree) -> ProcessTree:
    return node(Operator.LOOP, *children)


# ------------------------------------------------------------------ text format

_SPECIAL = set(" \t\r\n,()'\"")


def _label_text(label: str) -> str:
    if label == "tau" or not label or any(ch in _SPECIAL for ch in label):
        return "'" + label.replace("\\", "\\\\").replace("'", "\\'") + "'"
    return label


def to_text(t: ProcessTree) -> str:
    """ASCII notation, e.g. ``->(a, x(g, tau))``."""
    if t.op is None:
        return "tau" if t.label is None else _label_text(t.label)
    return f"{t.op.value}({', '.join(to_text(c) for c in t.children)})"


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            found = repr(self.text[self.pos]) if self.pos < len(self.text) else "end of input"
            raise TreeParseError(f"expected {ch!r}, found {found}", self.pos)
        self.pos += 1

    def token(self) -> tuple[str, bool]:
        """(text, quoted)"""
        self.skip()
        start = self.pos
        if self.pos >= len(self.text):
            raise TreeParseError("unexpected end of input", self.pos)
        if self.text[self.pos] == "'":
            self.pos += 1
            out = []
            while self.pos < len(self.text):
                ch = self.text[self.pos]
                if ch == "\\" and self.pos + 1 < len(self.text):
                    out.append(self.text[self.pos + 1])
                    self.pos += 2
                elif ch == "'":
                    self.pos += 1
                    return "".join(out), True
                else:
                    out.append(ch)
                    self.pos += 1
            raise TreeParseError("unterminated quoted label", start)
        while self.pos < len(self.text) and self.text[self.pos] not in _SPECIAL:
            self.pos += 1
        if self.pos == start:
            raise TreeParseError(f"unexpected {self.text[start]!r}", start)
        return self.text[start:self.pos], False

    def tree(self) -> ProcessTree:
        start = self.pos
        word, quoted = self.token()
        if not quoted and self.peek() == "(":
            if word not in _OP_BY_TOKEN:
                raise TreeParseError(f"unknown operator {word!r}", start)
            self.expect("(")
            children = [self.tree()]
            while self.peek() == ",":
                self.pos += 1
                children.append(self.tree())
            self.expect(")")
            if len(children) < 2:
                raise TreeParseError(f"operator {word!r} needs at least two children", start)
            return node(_OP_BY_TOKEN[word], *children)
        if not quoted and word == "tau":
            return TAU
        return leaf(word)


def parse_text(text: str) -> ProcessTree:
    parser = _Parser(text)
    t = parser.tree()
    parser.skip()
    if parser.pos != len(text):
        raise TreeParseError("trailing input", parser.pos)
    return t


# ------------------------------------------------------------------ JSON format


def to_json_obj(t: ProcessTree) -> dict[str, Any]:
    if t.op is None:
        return {"op": "tau"} if t.label is None else {"label": t.label}
    return {"op": t.op.value, "children": [to_json_obj(c) for c in t.children]}


def from_json_obj(obj: dict[str, Any]) -> ProcessTree:
    if "label" in obj:
        return leaf(str(obj["label"]))
    op = obj.get("op")
    if op == "tau":
        return TAU
    if op not in _OP_BY_TOKEN:
        raise ValueError(f"unknown operator {op!r}")
    return node(_OP_BY_TOKEN[op], *(from_json_obj(c) for c in obj.get("children", [])))


def to_json(t: ProcessTree, **kwargs: Any) -> str:
    return json.dumps(to_json_obj(t), **kwargs)


# ---------------------------------------------------------------- normalization


def normalize(t: ProcessTree) -> ProcessTree:
    """Flatten nested xor/seq/para children of the same operator; loops are kept as they are."""
    if t.op is None:
        return t
    children = [normalize(c) for c in t.children]
    if t.op is Operator.LOOP:
        return ProcessTree(op=t.op, children=tuple(children))
    flat: list[ProcessTree] = []
    for c in children:
        if c.op is t.op:
            flat.extend(c.children)
        else:
            flat.append(c)
    return ProcessTree(op=t.op, children=tuple(flat))


def canonical(t: ProcessTree) -> ProcessTree:
    """Normalized tree with commutative (xor, para) children sorted; for order-free comparisons."""
    t = normalize(t)
    if t.op is None:
        return t
    children = [canonical(c) for c in t.children]
    if t.op in (Operator.XOR, Operator.PARA):
        children.sort(key=to_text)
    return ProcessTree(op=t.op, children=tuple(children))


# --------------------------------------------------------------------- language

Lang = frozenset[tuple[str, ...]]


def _guard(traces: set, limit: int) -> None:
    if len(traces) > limit:
        raise LanguageExplosion(f"language exceeds {limit} traces")


def _shuffle(a: tuple[str, ...], b: tuple[str, ...], memo: dict) -> set[tuple[str, ...]]:
    key = (a, b)
    if key in memo:
        return memo[key]
    if not a or not b:
        out = {a + b}
    else:
        out = {(a[0],) + rest for rest in _shuffle(a[1:], b, memo)}
        out |= {(b[0],) + rest for rest in _shuffle(a, b[1:], memo)}
    memo[key] = out
    return out


def _concat(left: Iterable[tuple[str, ...]], right: Iterable[tuple[str, ...]], limit: int) -> set:
    right = list(right)
    out: set = set()
    for x, y in product(left, right):
        out.add(x + y)
        if len(out) > limit:
            _guard(out, limit)
    return out


def language(t: ProcessTree, max_loop_iterations: int = 1, limit: int = DEFAULT_LANGUAGE_LIMIT) -> Lang:
    """All traces of ``t`` with every loop taking its redo part at most ``max_loop_iterations`` times."""
    if max_loop_iterations < 0:
        raise ValueError("max_loop_iterations must be >= 0")
    return frozenset(_language(t, max_loop_iterations, limit))


def _language(t: ProcessTree, bound: int, limit: int) -> set[tuple[str, ...]]:
    if t.op is None:
        return {()} if t.label is None else {(t.label,)}
    langs = [_language(c, bound, limit) for c in t.children]
    if t.op is Operator.XOR:
        out = set().union(*langs)
    elif t.op is Operator.SEQ:
        out = langs[0]
        for nxt in langs[1:]:
            out = _concat(out, nxt, limit)
    elif t.op is Operator.PARA:
        out = langs[0]
        for nxt in langs[1:]:
            memo: dict = {}
            merged: set = set()
            for x, y in product(out, nxt):
                merged |= _shuffle(x, y, memo)
                _guard(merged, limit)
            out = merged
    else:
        body = langs[0]
        redo = set().union(*langs[1:])
        out = set(body)
        frontier = set(body)
        step = _concat(redo, body, limit)
        for _ in range(bound):
            frontier = _concat(frontier, step, limit)
            out |= frontier
            _guard(out, limit)
    _guard(out, limit)
    return out
