"""Deterministic bottom-up and top-down automata on binary-encoded trees."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Optional

from .trees import FCNS, LCNS, BinNode, UnrankedTree, bin_encode

BOT = None  # absent child
ANY = "*"  # label fallback
FIRST = "first"  # edge to the first (fcns) or last (lcns) child
NEXT = "next"  # edge to the next (fcns) or previous (lcns) sibling


class AutomatonError(ValueError):
    pass


@dataclass
class BottomUpBDTA:
    states: tuple
    delta: dict  # (label, q_left | None, q_right | None) -> q
    final: frozenset
    encoding: str = FCNS

    def __post_init__(self) -> None:
        if self.encoding not in (FCNS, LCNS):
            raise AutomatonError(f"unknown encoding {self.encoding!r}")
        self.final = frozenset(self.final)

    @property
    def labels(self) -> set:
        return {lab for (lab, _, _) in self.delta}

    def step(self, label: str, q1, q2):
        try:
            return self.delta[(label, q1, q2)]
        except KeyError:
            pass
        try:
            return self.delta[(ANY, q1, q2)]
        except KeyError:
            raise AutomatonError(f"no transition for ({label}, {q1}, {q2})") from None

    def knows(self, label: str) -> bool:
        return label in self.labels or ANY in self.labels

    def check_total(self) -> None:
        opts = (BOT,) + tuple(self.states)
        for lab in self.labels:
            for q1, q2 in itertools.product(opts, opts):
                if (lab, q1, q2) not in self.delta:
                    raise AutomatonError(f"delta undefined on ({lab}, {q1}, {q2})")


def run_bottom_up_reference(aut: BottomUpBDTA, tree: UnrankedTree) -> tuple[dict, bool]:
    """State of every binary node (keyed by document-order index) and the verdict."""
    states: dict[int, Hashable] = {}

    def ev(b: Optional[BinNode]):
        if b is None:
            return BOT
        # right spine iteratively so long sibling lists do not blow the stack
        spine = []
        while b is not None:
            spine.append(b)
            b = b.right
        q_right = BOT
        for node in reversed(spine):
            q = aut.step(node.label, ev(node.left), q_right)
            states[node.index] = q
            q_right = q
        return q_right

    root_state = ev(bin_encode(tree, aut.encoding))
    return states, root_state in aut.final


@dataclass
class TopDownAutomaton:
    states: tuple
    start: Hashable
    delta: dict  # ((label, qA), side, q_parent) -> q

    def step(self, label: str, qa, side: str, q_parent):
        for lab in (label, ANY):
            key = ((lab, qa), side, q_parent)
            if key in self.delta:
                return self.delta[key]
        raise AutomatonError(f"no top-down transition for ({label}@{qa}, {side}, {q_parent})")


@dataclass
class SelectionPair:
    bottom_up: BottomUpBDTA
    top_down: TopDownAutomaton
    select: frozenset = field(default_factory=frozenset)  # pairs (qA | "*", qB)

    @property
    def encoding(self) -> str:
        return self.bottom_up.encoding

    def selects(self, qa, qb) -> bool:
        return (qa, qb) in self.select or (ANY, qb) in self.select


def run_selection_reference(pair: SelectionPair, tree: UnrankedTree) -> list[int]:
    """Document-order indices selected by the pair, ascending."""
    qa, _ = run_bottom_up_reference(pair.bottom_up, tree)
    selected = []
    stack = [(bin_encode(tree, pair.encoding), FIRST, pair.top_down.start)]
    while stack:
        b, side, parent = stack.pop()
        q = pair.top_down.step(b.label, qa[b.index], side, parent)
        if pair.selects(qa[b.index], q):
            selected.append(b.index)
        if b.right is not None:
            stack.append((b.right, NEXT, q))
        if b.left is not None:
            stack.append((b.left, FIRST, q))
    return sorted(selected)


# -- text format ------------------------------------------------------------------

def _tok(q) -> str:
    return "_" if q is BOT else str(q)


def dump_automaton(aut: BottomUpBDTA) -> str:
    lines = [
        f"encoding: {aut.encoding}",
        "states: " + " ".join(map(str, aut.states)),
        "final: " + " ".join(str(q) for q in aut.states if q in aut.final),
    ]
    for (lab, q1, q2), q in sorted(aut.delta.items(), key=lambda kv: tuple(map(_tok, kv[0]))):
        lines.append(f"{lab} {_tok(q1)} {_tok(q2)} -> {q}")
    return "\n".join(lines) + "\n"


def dump_selection_pair(pair: SelectionPair) -> str:
    td = pair.top_down
    lines = [dump_automaton(pair.bottom_up).rstrip("\n")]
    lines.append("topdown-states: " + " ".join(map(str, td.states)))
    lines.append(f"start: {td.start}")
    for ((lab, qa), side, qp), q in sorted(td.delta.items(), key=lambda kv: str(kv[0])):
        lines.append(f"topdown: {lab}@{qa} {side} {qp} -> {q}")
    pairs = " ".join(f"({qa},{qb})" for qa, qb in sorted(pair.select, key=str))
    lines.append(f"select: {pairs}")
    return "\n".join(lines) + "\n"


def _state(tok: str):
    return BOT if tok == "_" else tok


def load_automaton(text: str) -> BottomUpBDTA:
    aut, _ = _load(text)
    return aut


def load_selection_pair(text: str) -> SelectionPair:
    aut, extra = _load(text)
    if "start" not in extra:
        raise AutomatonError("selection pair needs a 'start:' line")
    td = TopDownAutomaton(tuple(extra["td_states"]), extra["start"], extra["td_delta"])
    return SelectionPair(aut, td, frozenset(extra["select"]))


def _load(text: str):
    encoding, states, final, delta = FCNS, None, (), {}
    extra: dict = {"td_states": [], "td_delta": {}, "select": []}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, colon, rest = line.partition(":")
        key = key.strip()
        try:
            if colon and key == "encoding":
                encoding = rest.strip()
            elif colon and key == "states":
                states = tuple(rest.split())
            elif colon and key == "final":
                final = tuple(rest.split())
            elif colon and key == "topdown-states":
                extra["td_states"] = rest.split()
            elif colon and key == "start":
                extra["start"] = rest.strip()
            elif colon and key == "topdown":
                lhs, rhs = rest.split("->")
                labq, side, qp = lhs.split()
                lab, qa = labq.split("@")
                extra["td_delta"][((lab, qa), side, qp)] = rhs.strip()
            elif colon and key == "select":
                for item in rest.split():
                    qa, qb = item.strip("()").split(",")
                    extra["select"].append((qa, qb))
            else:
                lhs, rhs = line.split("->")
                lab, q1, q2 = lhs.split()
                delta[(lab, _state(q1), _state(q2))] = rhs.strip()
        except ValueError:
            raise AutomatonError(f"line {lineno}: cannot parse {raw!r}") from None
    if states is None:
        raise AutomatonError("missing 'states:' line")
    aut = BottomUpBDTA(states, delta, frozenset(final), encoding)
    unknown = {q for q in delta.values() if q not in states} | set(final) - set(states)
    if unknown:
        raise AutomatonError(f"undeclared states {sorted(unknown)}")
    return aut, extra


# -- random automata -------------------------------------------------------------

def random_bdta(rng: random.Random, labels: Iterable[str], nstates: int, encoding: str = FCNS) -> BottomUpBDTA:
    states = tuple(f"q{i}" for i in range(nstates))
    opts = (BOT,) + states
    delta = {
        (lab, q1, q2): rng.choice(states)
        for lab in labels
        for q1 in opts
        for q2 in opts
    }
    final = frozenset(q for q in states if rng.random() < 0.5)
    return BottomUpBDTA(states, delta, final, encoding)


def constant_pair(encoding: str, select_all: bool) -> SelectionPair:
    """One-state pair that selects every node or none."""
    bu = BottomUpBDTA(("a",), {(ANY, q1, q2): "a" for q1 in (BOT, "a") for q2 in (BOT, "a")}, frozenset({"a"}), encoding)
    td = TopDownAutomaton(("t",), "t", {((ANY, "a"), side, "t"): "t" for side in (FIRST, NEXT)})
    return SelectionPair(bu, td, frozenset({(ANY, "t")}) if select_all else frozenset())
