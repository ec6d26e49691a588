"""A small program that uses random access, for exercising the seek meter."""
from __future__ import annotations

from typing import Sequence

from ..meter import ADDRESS_REGISTER, DONE, RIGHT, RIGHT_END, SEEK, Action, ControlProgram


class SeekFixture(ControlProgram):
    """Reads the cells at ``addresses`` in order, with ``walk`` rightward
    moves after each read, and emits every symbol it reads.

    The addresses are part of the finite control; only the address register
    lives in the arena.
    """

    def __init__(self, addresses: Sequence[int], walk: int = 1) -> None:
        self.addresses = tuple(addresses)
        self.walk = walk
        self.name = "seek-fixture"
        q = len(self.addresses)
        self.states = ("scan",) + tuple(
            f"{phase}:{i}" for i in range(q) for phase in ("seek", "read")
        ) + tuple(f"walk:{i}:{w}" for i in range(q) for w in range(1, walk + 1))
        self.start = "scan"
        self.registers = (ADDRESS_REGISTER,)

    def _next(self, i: int) -> str:
        return f"seek:{i}" if i < len(self.addresses) else DONE

    def step(self, state, symbol, arena) -> Action:
        if state == "scan":
            # one plain forward scan first, so the seeks interrupt a direction
            if symbol is RIGHT_END:
                return Action(self._next(0))
            return Action(state, move=RIGHT)
        phase, _, rest = state.partition(":")
        if phase == "seek":
            arena.put_int(ADDRESS_REGISTER, self.addresses[int(rest)])
            return Action(f"read:{rest}", move=SEEK)
        if phase == "read":
            i = int(rest)
            if self.walk and symbol is not RIGHT_END:
                return Action(f"walk:{i}:1", move=RIGHT, emit=(symbol,))
            return Action(self._next(i + 1), emit=(symbol,))
        i, w = map(int, rest.split(":"))
        if w < self.walk and symbol is not RIGHT_END:
            return Action(f"walk:{i}:{w + 1}", move=RIGHT)
        return Action(self._next(i + 1))


def seek_fixture(addresses: Sequence[int], walk: int = 1) -> SeekFixture:
    return SeekFixture(addresses, walk)
