"""Replacing random accesses by head walks."""
from __future__ import annotations

from .arena import ADDRESS_REGISTER
from .machine import Action, ControlProgram, SEEK, SeekError
from .tape import LEFT, RIGHT, RIGHT_END, STAY

_POS = "_pos"
_WALK = "_walk"


class SeekFreeRewrite(ControlProgram):
    """Wraps a seek-using program into one that walks to each address.

    The wrapper keeps the head position in a binary register. A seek turns
    into a walk toward the target; this costs at most two direction changes
    per seek (one to turn toward the target, one when the inner program
    resumes), which is where ``r + 2q`` comes from.
    """

    def __init__(self, inner: ControlProgram) -> None:
        self.inner = inner
        self.name = f"seek-free({inner.name})"
        self.states = tuple(inner.control_states) + tuple(f"{_WALK}:{s}" for s in inner.control_states)
        self.start = inner.start
        self.registers = tuple(inner.registers) + (_POS,)
        alphabet = list(inner.internal_alphabet)
        for bit in ("0", "1"):
            if bit not in alphabet:
                alphabet.append(bit)
        self.internal_alphabet = tuple(alphabet)

    def init_arena(self, arena) -> None:
        self.inner.init_arena(arena)
        arena.put_int(_POS, 1)

    def _moved(self, arena, move: int) -> None:
        if move != STAY:
            arena.put_int(_POS, arena.get_int(_POS) + move)

    def step(self, state, symbol, arena) -> Action:
        if state.startswith(_WALK + ":"):
            resume = state[len(_WALK) + 1:]
            pos = arena.get_int(_POS)
            target = arena.get_int(ADDRESS_REGISTER)
            if target < 1 or (symbol is RIGHT_END and target >= pos):
                raise SeekError(f"seek address {target} is outside the tape")
            if pos == target:
                arena.clear(ADDRESS_REGISTER)
                return Action(resume)
            move = RIGHT if target > pos else LEFT
            self._moved(arena, move)
            return Action(state, move=move)
        action = self.inner.step(state, symbol, arena)
        if action.move == SEEK:
            target = arena.get_int(ADDRESS_REGISTER)
            if target is None:
                raise SeekError("seek with an empty address register")
            return Action(f"{_WALK}:{action.state}", write=action.write, emit=action.emit)
        self._moved(arena, action.move)
        return action
