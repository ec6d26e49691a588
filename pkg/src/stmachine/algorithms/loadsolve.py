"""One scan that copies the input into memory, then an arbitrary decider."""
from __future__ import annotations

from typing import Callable, Hashable, Iterable, Sequence

from ..instances import DocumentParseError, decode_relpair, disj_oracle, join1_oracle
from ..meter import ACCEPT, REJECT, RIGHT, RIGHT_END, Action, ControlProgram

INPUT = "input"

RELPAIR_ALPHABET = (
    "<rels>", "</rels>", "<rel1>", "</rel1>", "<rel2>", "</rel2>",
    "<tuple>", "</tuple>", "<no1>", "</no1>", "<no2>", "</no2>", "<0/>", "<1/>",
)
DISJ_TOKENS = ("0", "1", "#")


class LoadAndSolve(ControlProgram):
    def __init__(self, decider: Callable[[tuple], bool], alphabet: Iterable[Hashable], name: str = "load-and-solve") -> None:
        self.decider = decider
        self.name = name
        self.states = ("load",)
        self.start = "load"
        self.registers = (INPUT,)
        self.internal_alphabet = tuple(dict.fromkeys(alphabet))

    def step(self, state, symbol, arena) -> Action:
        if symbol is RIGHT_END:
            return Action(ACCEPT if self.decider(arena.get(INPUT)) else REJECT)
        if symbol not in self.internal_alphabet:
            return Action(REJECT)
        arena.push(INPUT, symbol)
        return Action(state, move=RIGHT)


def load_and_solve(decider: Callable[[tuple], bool], alphabet: Iterable[Hashable] = DISJ_TOKENS) -> LoadAndSolve:
    """Single-scan program with verdict ``decider(input)``.

    Symbols outside ``alphabet`` cannot be stored and are rejected.
    """
    return LoadAndSolve(decider, alphabet)


def join_emptiness(tokens: Sequence[str]) -> bool:
    """True iff the encoded pair (A, B) has an empty first-column join."""
    try:
        a, b = decode_relpair(tokens)
    except DocumentParseError:
        return False
    return not join1_oracle(a, b)


def disj_decider(tokens: Sequence[str]) -> bool:
    text = "".join(tokens)
    if text.count("#") != 1:
        return False
    x, y = text.split("#")
    if len(x) != len(y):
        return False
    return disj_oracle(x, y)


def join_emptiness_program() -> LoadAndSolve:
    return LoadAndSolve(join_emptiness, RELPAIR_ALPHABET, name="load-and-solve(join-empty)")
