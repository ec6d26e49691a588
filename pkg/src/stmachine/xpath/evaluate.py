"""Reference evaluation of Core XPath by literal set-valued recursion.

Nodes are document-order indices 1..N. Absolute paths start at a virtual
document node (index 0) whose only child is the root element, as in the
XPath data model; it carries no label, so no node test ever matches it and
it never appears in a result.
"""
from __future__ import annotations

from collections import defaultdict
from typing import Union

from ..treelang.trees import UnrankedTree
from .parser import (
    WILDCARD,
    And,
    CoreXPathAst,
    LocationPath,
    Not,
    Or,
    Step,
    UnsupportedAxisError,
    parse_corexpath,
)

DOC = 0


class _Tree:
    def __init__(self, tree: UnrankedTree) -> None:
        self.tree = tree
        self.nodes = frozenset(range(1, len(tree) + 1))
        self.label = {v.index: v.label for v in tree.nodes}
        self.children: dict[int, list[int]] = {DOC: [tree.root.index]}
        self.parent: dict[int, int] = {tree.root.index: DOC}
        for v in tree.nodes:
            self.children[v.index] = [c.index for c in v.children]
            for c in v.children:
                self.parent[c.index] = v.index

    def axis(self, name: str, x: int) -> list[int]:
        if name == "child":
            return self.children[x]
        if name == "parent":
            return [self.parent[x]] if x in self.parent else []
        if name == "descendant":
            out, stack = [], list(self.children[x])
            while stack:
                y = stack.pop()
                out.append(y)
                stack.extend(self.children[y])
            return out
        if name == "ancestor":
            out = []
            while x in self.parent:
                x = self.parent[x]
                out.append(x)
            return out
        raise UnsupportedAxisError(name, 0)


def _S(t: _Tree, path: LocationPath) -> set[tuple[int, int]]:
    """S[path] as a set of (context, result) pairs over nodes and DOC."""
    rel = _S_step(t, path.steps[0])
    for step in path.steps[1:]:
        nxt = defaultdict(set)
        for x, y in _S_step(t, step):
            nxt[x].add(y)
        rel = {(x, z) for x, y in rel for z in nxt.get(y, ())}
    if path.absolute:
        finals = {y for x, y in rel if x == DOC}
        rel = {(x, y) for x in t.nodes for y in finals}
    return rel


def _S_step(t: _Tree, step: Step) -> set[tuple[int, int]]:
    ok = _E(t, step.pred) if step.pred is not None else t.nodes
    return {
        (x, y)
        for x in t.nodes | {DOC}
        for y in t.axis(step.axis, x)
        if y != DOC and y in ok and (step.test == WILDCARD or t.label.get(y) == step.test)
    }


def _E(t: _Tree, pred) -> frozenset:
    if isinstance(pred, And):
        return _E(t, pred.left) & _E(t, pred.right)
    if isinstance(pred, Or):
        return _E(t, pred.left) | _E(t, pred.right)
    if isinstance(pred, Not):
        return t.nodes - _E(t, pred.arg)
    if isinstance(pred, LocationPath):
        return frozenset(x for x, _ in _S(t, pred) if x != DOC)
    raise TypeError(f"not a predicate: {pred!r}")


def eval_reference(ast: Union[CoreXPathAst, str], tree: UnrankedTree) -> frozenset:
    """Eval(Q, T): the set of result nodes, as document-order indices."""
    if isinstance(ast, str):
        ast = parse_corexpath(ast)
    t = _Tree(tree)
    return frozenset(y for x, y in _S(t, ast) if x != DOC and y != DOC)
