"""Compilation of downward Core XPath into tree automata.

For a location path ``P = s_0/.../s_k`` and every step index ``j`` the
bottom-up automaton works with two node-local attributes:

* ``H(P, j)``: the node passes test and predicate of ``s_j`` and (unless
  ``j = k``) satisfies ``E(P, j+1)``;
* ``E(P, j)``: some node on the ``s_j`` axis from this node has ``H(P, j)``,
  i.e. the node is a context from which ``s_j/.../s_k`` succeeds.

``E`` at a node only needs aggregates from its first (or last) child in the
binary encoding: "some node in this sibling chain has H" for the child
axis, "some node in this binary subtree has H" for the descendant axis.
A state holds the predicate bit of every main-path step followed by the
aggregates, so the annotation written on the tape also tells the top-down
pass which predicates hold at the node. The same tables serve fcns and
lcns, since neither aggregate depends on sibling order.

The top-down automaton carries, for the main path, which prefixes
``s_0..s_j`` end at the node (``C``) and at the node or one of its
ancestors (``A``), together with the parent's vectors so that a sibling
step can hand them on.
"""
from __future__ import annotations

from typing import Iterable, Optional, Union

from ..treelang.automata import ANY, BOT, FIRST, NEXT, BottomUpBDTA, SelectionPair, TopDownAutomaton
from ..treelang.trees import FCNS, LCNS
from .parser import (
    DOWNWARD_AXES,
    WILDCARD,
    And,
    CoreXPathAst,
    LocationPath,
    Not,
    Or,
    iter_steps,
    parse_corexpath,
)


class NotCompilableError(ValueError):
    pass


def _check_fragment(ast: LocationPath) -> None:
    for step in iter_steps(ast):
        if step.axis not in DOWNWARD_AXES:
            raise NotCompilableError(f"axis {step.axis!r} is outside the downward fragment")
    for path in _pred_paths(ast):
        if path.absolute:
            raise NotCompilableError("absolute paths inside predicates are not subtree-local")


def _pred_paths(path: LocationPath) -> list[LocationPath]:
    out: list[LocationPath] = []

    def walk(p) -> None:
        if isinstance(p, LocationPath):
            out.append(p)
            for s in p.steps:
                if s.pred is not None:
                    walk(s.pred)
        elif isinstance(p, Not):
            walk(p.arg)
        elif isinstance(p, (And, Or)):
            walk(p.left)
            walk(p.right)

    for s in path.steps:
        if s.pred is not None:
            walk(s.pred)
    return out


def _agg_kind(axis: str) -> str:
    return "S" if axis == "child" else "D"


class _Attributes:
    """Attribute layout and the transition function over attribute vectors.

    A vector is ``(bits, mask)``: ``bits`` holds the predicate value of each
    main-path step (read by the top-down pass), ``mask`` has one bit per
    aggregate (read by the parent). Node-local attributes are recomputed
    from the left child's mask on every transition and never stored.
    """

    def __init__(self, query: LocationPath) -> None:
        self.query = query
        aggs: list = []
        for p in dict.fromkeys([query] + _pred_paths(query)):
            for j, step in enumerate(p.steps):
                aggs.append((_agg_kind(step.axis), ("H", p, j)))
        if not query.absolute:
            aggs.append(("D", ("E", query, 0)))
        self.aggs = list(dict.fromkeys(aggs))
        self.bit = {a: 1 << i for i, a in enumerate(self.aggs)}
        self.desc_mask = sum(self.bit[a] for a in self.aggs if a[0] == "D")
        self.labels = sorted({s.test for s in iter_steps(query) if s.test != WILDCARD})

    def local(self, label: str, left: Optional[tuple]) -> tuple[tuple, int]:
        """Predicate bits of the node and the part of its mask not owed to the right sibling."""
        left_mask = left[1] if left else 0
        memo: dict = {}

        def val(attr) -> bool:
            if attr in memo:
                return memo[attr]
            kind, p, j = attr
            step = p.steps[j]
            if kind == "E":
                v = bool(left_mask & self.bit[(_agg_kind(step.axis), ("H", p, j))])
            else:
                v = _test(step.test, label) and (step.pred is None or pred(step.pred))
                if v and j + 1 < len(p.steps):
                    v = val(("E", p, j + 1))
            memo[attr] = v
            return v

        def pred(e) -> bool:
            if isinstance(e, And):
                return pred(e.left) and pred(e.right)
            if isinstance(e, Or):
                return pred(e.left) or pred(e.right)
            if isinstance(e, Not):
                return not pred(e.arg)
            return val(("E", e, 0))

        bits = tuple(step.pred is None or pred(step.pred) for step in self.query.steps)
        base = left_mask & self.desc_mask
        for a in self.aggs:
            if val(a[1]):
                base |= self.bit[a]
        return bits, base

    def delta(self, label: str, left: Optional[tuple], right: Optional[tuple]) -> tuple:
        bits, base = self.local(label, left)
        return bits, base | (right[1] if right else 0)

    def pred_holds(self, j: int, vec: tuple) -> bool:
        return vec[0][j]

    def accepting(self, vec: tuple) -> bool:
        q = self.query
        if q.absolute:
            key = (_agg_kind(q.steps[0].axis), ("H", q, 0))
        else:
            key = ("D", ("E", q, 0))
        return bool(vec[1] & self.bit[key])


def _test(test: str, label: str) -> bool:
    return test == WILDCARD or (label != ANY and label == test)


class CompiledQuery:
    """Reachable attribute-vector automaton for one query.

    ``vectors`` maps each attribute vector to its state name ``a0, a1, ...``.
    """

    def __init__(self, ast: Union[CoreXPathAst, str]) -> None:
        if isinstance(ast, str):
            ast = parse_corexpath(ast)
        _check_fragment(ast)
        self.ast = ast
        self.attrs = _Attributes(ast)
        self.labels = self.attrs.labels + [ANY]
        self.vectors: dict[tuple, str] = {}
        self.delta: dict = {}
        self._explore()

    def _explore(self) -> None:
        # semi-naive closure: every (left, right) pair is combined exactly once
        local: dict = {}
        done: list = []
        queue: list = []

        def add(vec) -> str:
            if vec not in self.vectors:
                self.vectors[vec] = f"a{len(self.vectors)}"
                queue.append(vec)
            return self.vectors[vec]

        def combine(left, right) -> None:
            for lab in self.labels:
                if (lab, left) not in local:
                    local[(lab, left)] = self.attrs.local(lab, left)
                bits, base = local[(lab, left)]
                self.delta[(lab, left, right)] = add((bits, base | (right[1] if right else 0)))

        combine(None, None)
        while queue:
            vec = queue.pop()
            done.append(vec)
            combine(vec, None)
            combine(None, vec)
            for other in done:
                combine(vec, other)
                if other is not vec:
                    combine(other, vec)
        self.by_name = {name: vec for vec, name in self.vectors.items()}

    def automaton(self, encoding: str = FCNS) -> BottomUpBDTA:
        delta = {
            (lab, BOT if l is None else self.vectors[l], BOT if r is None else self.vectors[r]): q
            for (lab, l, r), q in self.delta.items()
        }
        final = frozenset(name for vec, name in self.vectors.items() if self.attrs.accepting(vec))
        return BottomUpBDTA(tuple(self.by_name), delta, final, encoding)

    # -- top-down part --------------------------------------------------------
    def _td_step(self, label: str, qa: tuple, side: str, parent: tuple) -> tuple:
        p_c, p_a, c, a = parent
        if side == FIRST:
            p_c, p_a = c, a
        steps = self.ast.steps
        own_c = [not self.ast.absolute]
        for j, step in enumerate(steps, start=1):
            ctx = p_c[j - 1] if step.axis == "child" else p_a[j - 1]
            own_c.append(ctx and _test(step.test, label) and self.attrs.pred_holds(j - 1, qa))
        own_a = [cj or aj for cj, aj in zip(own_c, p_a)]
        return (p_c, p_a, tuple(own_c), tuple(own_a))

    def selection_pair(self, encoding: str = FCNS) -> SelectionPair:
        width = len(self.ast.steps) + 1
        zeros = (False,) * width
        doc_c = (self.ast.absolute,) + (False,) * (width - 1)
        start = (zeros, zeros, doc_c, doc_c)
        names = {start: "b0"}
        delta = {}
        todo = [start]
        cache: dict = {}
        while todo:
            qb = todo.pop()
            for lab in self.labels:
                for qa, qa_name in self.vectors.items():
                    for side in (FIRST, NEXT):
                        key = (lab, qa[0], side, qb)
                        if key not in cache:
                            nxt = cache[key] = self._td_step(lab, qa, side, qb)
                            if nxt not in names:
                                names[nxt] = f"b{len(names)}"
                                todo.append(nxt)
                        delta[((lab, qa_name), side, names[qb])] = names[cache[key]]
        td = TopDownAutomaton(tuple(names.values()), "b0", delta)
        select = frozenset((ANY, name) for vec, name in names.items() if vec is not start and vec[2][-1])
        return SelectionPair(self.automaton(encoding), td, select)


def compile_filter(ast: Union[CoreXPathAst, str], encoding: str = FCNS) -> BottomUpBDTA:
    """Bottom-up automaton accepting exactly the trees with a nonempty result."""
    return CompiledQuery(ast).automaton(encoding)


def compile_selector(ast: Union[CoreXPathAst, str], encoding: str = FCNS) -> SelectionPair:
    """Selection pair whose selected nodes are exactly the query result."""
    return CompiledQuery(ast).selection_pair(encoding)


def query_tags(ast: Union[CoreXPathAst, str], extra: Iterable[str] = ()) -> list[str]:
    if isinstance(ast, str):
        ast = parse_corexpath(ast)
    return sorted({s.test for s in iter_steps(ast) if s.test != WILDCARD} | set(extra))
