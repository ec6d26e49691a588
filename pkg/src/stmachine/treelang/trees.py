"""Unranked trees and their first-child/last-child binary encodings."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .events import BACHELOR, CLOSE, OPEN, Event, check_well_formed, tokenize

FCNS = "fcns"
LCNS = "lcns"


@dataclass
class Node:
    label: str
    index: int
    parent: Optional["Node"] = None
    children: list = field(default_factory=list)

    def __repr__(self) -> str:
        return f"Node({self.label!r}, {self.index})"


class UnrankedTree:
    """Nodes are numbered 1.. in document order."""

    def __init__(self, root: Node) -> None:
        self.root = root
        self.nodes: list[Node] = []
        stack = [root]
        while stack:
            v = stack.pop()
            self.nodes.append(v)
            stack.extend(reversed(v.children))
        for i, v in enumerate(self.nodes, start=1):
            v.index = i

    @classmethod
    def from_events(cls, events: Iterable[Event]) -> "UnrankedTree":
        events = list(events)
        check_well_formed(events)
        stack: list[Node] = []
        root = None
        for ev in events:
            if ev.kind in (OPEN, BACHELOR):
                v = Node(ev.tag, 0, stack[-1] if stack else None)
                if stack:
                    stack[-1].children.append(v)
                else:
                    root = v
                if ev.kind == OPEN:
                    stack.append(v)
            elif ev.kind == CLOSE:
                stack.pop()
        return cls(root)

    @classmethod
    def parse(cls, doc) -> "UnrankedTree":
        return cls.from_events(tokenize(doc))

    @classmethod
    def build(cls, spec) -> "UnrankedTree":
        """From nested tuples ``(label, [children...])`` or a bare label."""

        def make(s, parent):
            label, kids = (s, []) if isinstance(s, str) else s
            v = Node(label, 0, parent)
            v.children = [make(k, v) for k in kids]
            return v

        return cls(make(spec, None))

    def __len__(self) -> int:
        return len(self.nodes)

    def node(self, index: int) -> Node:
        return self.nodes[index - 1]

    def events(self, bachelors: bool = True) -> list[Event]:
        out: list[Event] = []

        def walk(v: Node) -> None:
            if not v.children and bachelors:
                out.append(Event(BACHELOR, v.label))
                return
            out.append(Event(OPEN, v.label))
            for c in v.children:
                walk(c)
            out.append(Event(CLOSE, v.label))

        walk(self.root)
        return out

    def depth(self) -> int:
        """Maximum number of edges on a root-to-leaf path."""
        best = 0
        stack = [(self.root, 0)]
        while stack:
            v, d = stack.pop()
            best = max(best, d)
            stack.extend((c, d + 1) for c in v.children)
        return best

    def node_depth(self, v: Node) -> int:
        d = 0
        while v.parent is not None:
            v = v.parent
            d += 1
        return d

    def labels(self) -> set[str]:
        return {v.label for v in self.nodes}


@dataclass
class BinNode:
    label: str
    index: int
    left: Optional["BinNode"] = None
    right: Optional["BinNode"] = None


def bin_encode(tree: UnrankedTree, mode: str = FCNS) -> BinNode:
    """fcns: left = first child, right = next sibling.
    lcns: left = last child, right = previous sibling."""
    if mode not in (FCNS, LCNS):
        raise ValueError(f"unknown encoding {mode!r}")

    def chain(siblings: list) -> Optional[BinNode]:
        order = siblings if mode == FCNS else list(reversed(siblings))
        head = None
        for v in reversed(order):
            head = BinNode(v.label, v.index, chain(v.children), head)
        return head

    return chain([tree.root])


def random_tree(rng: random.Random, size: int, labels: list[str]) -> UnrankedTree:
    """Uniform-ish random unranked tree: each new node picks a random parent."""
    nodes = [Node(rng.choice(labels), 0)]
    for _ in range(size - 1):
        parent = rng.choice(nodes)
        v = Node(rng.choice(labels), 0, parent)
        parent.children.append(v)
        nodes.append(v)
    return UnrankedTree(nodes[0])


def path_tree(depth: int, label: str = "a") -> UnrankedTree:
    spec = label
    for _ in range(depth):
        spec = (label, [spec])
    return UnrankedTree.build(spec)
