"""Streaming tree-automaton passes as metered step machines.

A bottom-up pass keeps one stack cell per open node. Scanning forward the
roles are the natural ones (opening tags open, closing tags close) and the
automaton runs on the last-child/previous-sibling encoding; scanning
backward the roles swap and it runs on first-child/next-sibling.

Stack cells are triples ``(tag, state, is_root)``. An *open* cell belongs
to a node whose opener has been seen: it holds the node's tag and the
state of the sibling seen just before it (or BOT). A *closed* cell has
``tag=None`` and holds the state of a finished node. Keeping the tag in the
same cell is what lets the pass reject interleaved tags without extra space.
"""
from __future__ import annotations

from typing import Iterable, Optional, Sequence

from ..meter import (
    ACCEPT,
    DONE,
    LEFT,
    LEFT_END,
    REJECT,
    RIGHT,
    RIGHT_END,
    STAY,
    Action,
    ControlProgram,
    ExternalTape,
    RunReport,
    load_tape,
    run,
)
from .automata import BOT, FIRST, NEXT, BottomUpBDTA, SelectionPair
from .events import CLOSE, OPEN, Event, expand_bachelors, tag_alphabet, tokenize
from .trees import FCNS, LCNS

STACK = "stack"
SIB = "sib"
COUNT = "cnt"

# previous-symbol bookkeeping, kept in the control state
_NONE, _OPENER, _CLOSER, _ROOT_DONE = "none", "opener", "closer", "root-done"


def _stack_alphabet(tags: Iterable[str], states: Sequence) -> list:
    tags = sorted(tags)
    opts = [BOT] + list(states)
    cells = [(t, q, r) for t in tags for q in opts for r in (False, True)]
    cells += [(None, q, False) for q in states]
    return cells


class _BottomUpPass:
    """One scan of the stack algorithm. ``direction`` fixes the opener role."""

    def __init__(self, aut: BottomUpBDTA, tags: Iterable[str], direction: int) -> None:
        self.aut = aut
        self.tags = frozenset(tags)
        self.direction = direction
        self.opener = OPEN if direction == RIGHT else CLOSE

    def handle(self, prev: str, ev: Event, arena) -> tuple[Optional[str], object]:
        """Process one tag. Returns (new prev marker, computed state) or (None, None) on error."""
        if prev == _ROOT_DONE or ev.kind not in (OPEN, CLOSE) or ev.tag not in self.tags:
            return None, None
        if ev.kind == self.opener:
            if prev in (_NONE, _OPENER):
                arena.push(STACK, (ev.tag, BOT, prev == _NONE))
            else:
                _, q, _ = arena.pop(STACK)
                arena.push(STACK, (ev.tag, q, False))
            return _OPENER, None
        if prev == _NONE:
            return None, None
        if prev == _OPENER:
            q1 = BOT
        else:
            _, q1, _ = arena.pop(STACK)
        cell = arena.pop(STACK) if arena.size(STACK) else None
        if cell is None or cell[0] != ev.tag:
            return None, None
        _, q2, is_root = cell
        q = self.aut.step(ev.tag, q1, q2)
        arena.push(STACK, (None, q, False))
        return (_ROOT_DONE if is_root else _CLOSER), q


def _document_tags(aut: BottomUpBDTA, tags: Optional[Iterable[str]]) -> frozenset:
    if tags is None:
        tags = aut.labels - {"*"}
    return frozenset(tags)


class StreamFilter(ControlProgram):
    """Accepts a document iff the bottom-up automaton accepts its encoding.

    fcns automata run backward after a first scan to the right end (two
    scans); lcns automata run in one forward scan.
    """

    def __init__(self, aut: BottomUpBDTA, tags: Optional[Iterable[str]] = None) -> None:
        self.aut = aut
        self.tags = _document_tags(aut, tags)
        self.backward = aut.encoding == FCNS
        direction = LEFT if self.backward else RIGHT
        self.pass_ = _BottomUpPass(aut, self.tags, direction)
        self.direction = direction
        self.name = "filter-backward" if self.backward else "filter-forward"
        self.states = ("to_end",) + tuple(f"scan:{p}" for p in (_NONE, _OPENER, _CLOSER, _ROOT_DONE))
        self.start = "to_end" if self.backward else f"scan:{_NONE}"
        self.registers = (STACK,)
        self.internal_alphabet = tuple(_stack_alphabet(self.tags, aut.states))

    def step(self, state, symbol, arena) -> Action:
        if state == "to_end":
            if symbol is RIGHT_END:
                return Action(f"scan:{_NONE}", move=LEFT)
            return Action(state, move=RIGHT)
        prev = state.split(":", 1)[1]
        if symbol is LEFT_END or symbol is RIGHT_END:
            if prev != _ROOT_DONE:
                return Action(REJECT)
            _, q, _ = arena.top(STACK)
            return Action(ACCEPT if q in self.aut.final else REJECT)
        nxt, _ = self.pass_.handle(prev, symbol, arena)
        if nxt is None:
            return Action(REJECT)
        return Action(f"scan:{nxt}", move=self.direction)


def stream_filter_backward(aut: BottomUpBDTA, tags=None) -> StreamFilter:
    if aut.encoding != FCNS:
        raise ValueError("the backward filter runs fcns automata")
    return StreamFilter(aut, tags)


def stream_filter_forward(aut: BottomUpBDTA, tags=None) -> StreamFilter:
    if aut.encoding != LCNS:
        raise ValueError("the forward filter runs lcns automata")
    return StreamFilter(aut, tags)


class _Selector(ControlProgram):
    def __init__(self, pair: SelectionPair, tags: Optional[Iterable[str]]) -> None:
        self.pair = pair
        self.tags = _document_tags(pair.bottom_up, tags)
        qa_states = pair.bottom_up.states
        qb_states = pair.top_down.states
        alphabet = _stack_alphabet(self.tags, qa_states)
        alphabet += list(qb_states) + [(q, s) for q in qb_states for s in (False, True)]
        alphabet += ["0", "1"]
        self.internal_alphabet = tuple(alphabet)
        self.registers = (STACK, SIB, COUNT)

    def tape_alphabet(self) -> list:
        out = tag_alphabet(self.tags)
        for t in self.tags:
            for q in self.pair.bottom_up.states:
                out += [Event(OPEN, t, q), Event(CLOSE, t, q)]
        return out

    def _top_down(self, prev: str, ev: Event, arena):
        if prev == _NONE:
            parent, side = self.pair.top_down.start, FIRST
        elif prev == _OPENER:
            parent, side = arena.top(STACK), FIRST
            if isinstance(parent, tuple):
                parent = parent[0]
        else:
            parent, side = arena.get(SIB)[0], NEXT
        qb = self.pair.top_down.step(ev.tag, ev.annotation, side, parent)
        return qb, self.pair.selects(ev.annotation, qb)


class SelectAscending(_Selector):
    """Three scans: to the end, bottom-up backward writing states into the
    opening tags, then top-down forward emitting document-order indices."""

    name = "select-ascending"

    def __init__(self, pair: SelectionPair, tags=None) -> None:
        if pair.encoding != FCNS:
            raise ValueError("ascending selection runs fcns automata")
        super().__init__(pair, tags)
        self.bu = _BottomUpPass(pair.bottom_up, self.tags, LEFT)
        self.states = ("to_end",) + tuple(f"bu:{p}" for p in (_NONE, _OPENER, _CLOSER, _ROOT_DONE)) + tuple(
            f"td:{p}" for p in (_NONE, _OPENER, _CLOSER)
        )
        self.start = "to_end"

    def step(self, state, symbol, arena) -> Action:
        phase, _, prev = state.partition(":")
        if phase == "to_end":
            if symbol is RIGHT_END:
                return Action(f"bu:{_NONE}", move=LEFT)
            return Action(state, move=RIGHT)
        if phase == "bu":
            if symbol is LEFT_END:
                if prev != _ROOT_DONE:
                    return Action(REJECT)
                arena.clear(STACK)
                arena.put_int(COUNT, 0)
                return Action(f"td:{_NONE}", move=RIGHT)
            if symbol is RIGHT_END:
                return Action(REJECT)
            nxt, q = self.bu.handle(prev, symbol, arena)
            if nxt is None:
                return Action(REJECT)
            write = Event(OPEN, symbol.tag, q) if symbol.kind == OPEN else None
            return Action(f"bu:{nxt}", move=LEFT, write=write)
        # top-down, forward
        if symbol is RIGHT_END:
            return Action(DONE)
        if symbol.kind == OPEN:
            qb, chosen = self._top_down(prev, symbol, arena)
            arena.push(STACK, qb)
            count = arena.get_int(COUNT) + 1
            arena.put_int(COUNT, count)
            emit = (count,) if chosen else ()
            return Action(f"td:{_OPENER}", move=RIGHT, emit=emit)
        arena.put(SIB, [arena.pop(STACK)])
        return Action(f"td:{_CLOSER}", move=RIGHT)


class SelectDescending(_Selector):
    """Two scans: bottom-up forward writing lcns states into the closing
    tags while counting nodes, then top-down backward emitting indices."""

    name = "select-descending"

    def __init__(self, pair: SelectionPair, tags=None) -> None:
        if pair.encoding != LCNS:
            raise ValueError("descending selection runs lcns automata")
        super().__init__(pair, tags)
        self.bu = _BottomUpPass(pair.bottom_up, self.tags, RIGHT)
        self.states = tuple(f"bu:{p}" for p in (_NONE, _OPENER, _CLOSER, _ROOT_DONE)) + tuple(
            f"td:{p}" for p in (_NONE, _OPENER, _CLOSER)
        )
        self.start = f"bu:{_NONE}"

    def init_arena(self, arena) -> None:
        arena.put_int(COUNT, 0)

    def step(self, state, symbol, arena) -> Action:
        phase, _, prev = state.partition(":")
        if phase == "bu":
            if symbol is RIGHT_END:
                if prev != _ROOT_DONE:
                    return Action(REJECT)
                arena.clear(STACK)
                return Action(f"td:{_NONE}", move=LEFT)
            nxt, q = self.bu.handle(prev, symbol, arena)
            if nxt is None:
                return Action(REJECT)
            write = None
            if symbol.kind == OPEN:
                arena.put_int(COUNT, arena.get_int(COUNT) + 1)
            else:
                write = Event(CLOSE, symbol.tag, q)
            return Action(f"bu:{nxt}", move=RIGHT, write=write)
        # top-down, backward: closing tags open nodes
        if symbol is LEFT_END:
            return Action(DONE)
        if symbol.kind == CLOSE:
            qb, chosen = self._top_down(prev, symbol, arena)
            arena.push(STACK, (qb, chosen))
            return Action(f"td:{_OPENER}", move=LEFT)
        qb, chosen = arena.pop(STACK)
        arena.put(SIB, [qb])
        count = arena.get_int(COUNT)
        arena.put_int(COUNT, count - 1)
        return Action(f"td:{_CLOSER}", move=LEFT, emit=(count,) if chosen else ())


def select_ascending(pair: SelectionPair, tags=None) -> SelectAscending:
    return SelectAscending(pair, tags)


def select_descending(pair: SelectionPair, tags=None) -> SelectDescending:
    return SelectDescending(pair, tags)


# -- convenience -----------------------------------------------------------------

def document_tape(doc, writable: bool = False) -> ExternalTape:
    """Tape holding a document with bachelor tags expanded."""
    events = doc if doc and isinstance(doc[0], Event) else tokenize(doc, check=False)
    return load_tape(expand_bachelors(events), writable=writable)


def run_filter(aut: BottomUpBDTA, doc, tags=None) -> tuple[bool, RunReport]:
    prog = StreamFilter(aut, tags)
    _, report = run(prog, document_tape(doc))
    return report.halted == "accept", report


def run_selection(pair: SelectionPair, doc, tags=None) -> tuple[list[int], RunReport]:
    prog = SelectAscending(pair, tags) if pair.encoding == FCNS else SelectDescending(pair, tags)
    out, report = run(prog, document_tape(doc, writable=True))
    return out, report
