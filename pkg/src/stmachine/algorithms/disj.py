"""Deciding set disjointness for inputs ``x#y``."""
from __future__ import annotations

from ..meter import ACCEPT, LEFT, LEFT_END, REJECT, RIGHT, RIGHT_END, Action, ControlProgram

BITS = ("0", "1")
DISJ_ALPHABET = ("0", "1", "#")

# transitions taken once per cell are shared instead of rebuilt each step
_GO = {state: Action(state, move=RIGHT) for state in ("read_x", "read_y", "scan0_x", "scan0_y", "skip_x", "load", "to_hash", "skip_y", "check", "tail")}
_BACK = Action("back", move=LEFT)
_REJECT = Action(REJECT)


class DisjTrivial(ControlProgram):
    """One forward scan: queue x in memory, then match y against it."""

    name = "disj-trivial"
    states = ("read_x", "read_y")
    start = "read_x"
    registers = ("x",)
    internal_alphabet = BITS

    def step(self, state, symbol, arena) -> Action:
        if state == "read_x":
            if symbol in BITS:
                arena.push("x", symbol)
                return _GO["read_x"]
            if symbol == "#":
                return _GO["read_y"]
            return _REJECT
        if symbol in BITS:
            if not arena.size("x"):
                return _REJECT
            if arena.popleft("x") == "1" == symbol:
                return _REJECT
            return _GO["read_y"]
        if symbol is RIGHT_END and not arena.size("x"):
            return Action(ACCEPT)
        return _REJECT


class DisjChunked(ControlProgram):
    """Compare x and y ``c`` positions at a time.

    Round 0 is a single forward scan that validates the input, measures
    ``len = |x|`` and checks the first chunk. Every later round walks back
    to the left end, skips ``start`` bits of x, loads the next chunk,
    skips to the same offset in y and checks the chunk there. Registers:
    ``buf`` (the chunk), ``start``, ``k`` (a countdown), ``len``.
    """

    registers = ("buf", "start", "k", "len")
    internal_alphabet = BITS
    states = ("scan0_x", "scan0_y", "back", "skip_x", "load", "to_hash", "skip_y", "check", "tail")
    start = "scan0_x"

    def __init__(self, c: int) -> None:
        if c < 1:
            raise ValueError("chunk size must be at least 1")
        self.c = c
        self.name = f"disj-chunked(c={c})"
        self._handlers = {state: getattr(self, "_" + state) for state in self.states}

    def init_arena(self, arena) -> None:
        arena.put_int("len", 0)

    def step(self, state, symbol, arena) -> Action:
        return self._handlers[state](symbol, arena)

    # round 0 -----------------------------------------------------------------
    def _scan0_x(self, symbol, arena) -> Action:
        if symbol in BITS:
            arena.increment("len")
            if arena.size("buf") < self.c:
                arena.push("buf", symbol)
            return _GO["scan0_x"]
        if symbol == "#":
            arena.put_int("k", arena.get_int("len"))
            return _GO["scan0_y"]
        return _REJECT

    def _scan0_y(self, symbol, arena) -> Action:
        if symbol in BITS:
            if not arena.decrement("k"):
                return _REJECT
            if arena.size("buf") and arena.popleft("buf") == "1" == symbol:
                return _REJECT
            return _GO["scan0_y"]
        if symbol is RIGHT_END and arena.get_int("k") == 0:
            return self._round_done(arena)
        return _REJECT

    # later rounds ------------------------------------------------------------
    def _back(self, symbol, arena) -> Action:
        if symbol is LEFT_END:
            arena.put_int("k", arena.get_int("start"))
            return _GO["skip_x"]
        return _BACK

    def _skip_x(self, symbol, arena) -> Action:
        if arena.decrement("k"):
            return _GO["skip_x"]
        return self._load(symbol, arena)

    def _load(self, symbol, arena) -> Action:
        if symbol in BITS and arena.size("buf") < self.c:
            arena.push("buf", symbol)
            return _GO["load"]
        return self._to_hash(symbol, arena)

    def _to_hash(self, symbol, arena) -> Action:
        if symbol == "#":
            arena.put_int("k", arena.get_int("start"))
            return _GO["skip_y"]
        return _GO["to_hash"]

    def _skip_y(self, symbol, arena) -> Action:
        if arena.decrement("k"):
            return _GO["skip_y"]
        return self._check(symbol, arena)

    def _check(self, symbol, arena) -> Action:
        if arena.size("buf"):
            if arena.popleft("buf") == "1" == symbol:
                return _REJECT
            return _GO["check"]
        return self._tail(symbol, arena)

    def _tail(self, symbol, arena) -> Action:
        if symbol is RIGHT_END:
            return self._round_done(arena)
        return _GO["tail"]

    def _round_done(self, arena) -> Action:
        start = (arena.get_int("start") or 0) + self.c
        if start >= arena.get_int("len"):
            return Action(ACCEPT)
        arena.put_int("start", start)
        arena.clear("k")
        return _BACK


def disj_trivial() -> DisjTrivial:
    return DisjTrivial()


def disj_chunked(c: int) -> DisjChunked:
    return DisjChunked(c)
