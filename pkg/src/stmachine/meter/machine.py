"""Deterministic step machines over an external tape and a metered arena."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Callable, Hashable, NamedTuple, Optional, Sequence

from .arena import ADDRESS_REGISTER, Arena
from .tape import LEFT, RIGHT, STAY, ExternalTape, MeterError

SEEK = "seek"

ACCEPT = "accept"
REJECT = "reject"
DONE = "done"
HALTING = (ACCEPT, REJECT, DONE)
_HALTING = frozenset(HALTING)
_MOVES = frozenset((LEFT, STAY, RIGHT))
_OUTCOME = {ACCEPT: "accept", REJECT: "reject", DONE: "output-complete"}


class NonTerminationError(MeterError):
    pass


class ProgramError(MeterError):
    """The program broke its own contract (undeclared state, bad move, ...)."""


class SeekError(MeterError):
    pass


class Action(NamedTuple):
    state: str
    move: object = STAY
    write: Optional[Hashable] = None
    emit: tuple = ()


class ControlProgram:
    """A finite control driving the tape head.

    Subclasses declare their control ``states``, ``start`` state, arena
    ``registers`` and ``internal_alphabet``, and implement ``step``. The
    contract: everything mutable lives in the control state and the arena.
    ``step`` may inspect and mutate the arena but must not keep anything on
    ``self``.
    """

    name = "program"
    states: Sequence[str] = ()
    start: str = ""
    registers: Sequence[str] = ()
    internal_alphabet: Sequence[Hashable] = ("0", "1")

    @property
    def control_states(self) -> tuple:
        extra = tuple(h for h in HALTING if h not in self.states)
        return tuple(self.states) + extra

    @property
    def snapshot_constant(self) -> int:
        # register terminators plus byte padding, see Arena.snapshot
        return len(self.registers) + 8

    def new_arena(self) -> Arena:
        arena = Arena(self.internal_alphabet, self.registers)
        self.init_arena(arena)
        return arena

    def init_arena(self, arena: Arena) -> None:
        pass

    def step(self, state: str, symbol, arena: Arena) -> Action:
        raise NotImplementedError


@dataclass(frozen=True)
class RunReport:
    n: int
    reversals: int
    r_used: int
    s_peak: int
    q_used: int
    external_writes: int
    halted: str
    steps: int

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def default_step_limit(n: int) -> int:
    return max(64, 64 * n * (n + 2))


@dataclass
class Machine:
    """One run in progress. ``run`` drives it to completion."""

    program: ControlProgram
    tape: ExternalTape
    arena: Arena
    state: str
    output: list = field(default_factory=list)
    steps: int = 0
    legal: frozenset = field(init=False, repr=False)
    _transition: Callable = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.legal = frozenset(self.program.control_states)
        self._transition = self.program.step

    @classmethod
    def boot(cls, program: ControlProgram, tape: ExternalTape) -> "Machine":
        return cls(program, tape, program.new_arena(), program.start)

    @property
    def halted(self) -> bool:
        return self.state in HALTING

    def step(self) -> Action:
        tape = self.tape
        action = self._transition(self.state, tape.read(), self.arena)
        if type(action) is not Action:
            raise ProgramError(f"step returned {action!r}, expected an Action")
        state, move, write, emit = action
        if state not in self.legal:
            raise ProgramError(f"undeclared control state {state!r}")
        if write is not None:
            tape.write(write)
        if emit:
            self.output.extend(emit)
        if move == SEEK:
            seek(tape, self.arena)
        elif move in _MOVES:
            tape.move(move)
        else:
            raise ProgramError(f"bad move {move!r}")
        self.state = state
        self.steps += 1
        return action

    def report(self) -> RunReport:
        return RunReport(
            n=self.tape.n,
            reversals=self.tape.reversals,
            r_used=self.tape.reversals + 1,
            s_peak=self.arena.peak,
            q_used=self.tape.random_accesses,
            external_writes=self.tape.external_writes,
            halted=_OUTCOME.get(self.state, "running"),
            steps=self.steps,
        )


def seek(tape: ExternalTape, arena: Arena) -> None:
    """Jump to the address held in the arena's address register, then clear it."""
    address = arena.get_int(ADDRESS_REGISTER)
    if address is None:
        raise SeekError("seek with an empty address register")
    if not 1 <= address <= tape.n:
        raise SeekError(f"seek address {address} outside 1..{tape.n}")
    tape.seek(address)
    arena.clear(ADDRESS_REGISTER)


def run(
    program: ControlProgram,
    tape: ExternalTape,
    step_limit: Optional[int] = None,
    on_step: Optional[Callable[[Machine, int], None]] = None,
) -> tuple[list, RunReport]:
    """Run ``program`` on ``tape`` until it halts.

    ``on_step`` is called after every step with the machine and the head
    position before the step.
    """
    if step_limit is None:
        step_limit = default_step_limit(tape.n)
    if step_limit <= 0:
        raise ValueError("step_limit must be positive")
    m = Machine.boot(program, tape)
    if on_step is None:
        step = m.step
        while m.state not in _HALTING:
            if m.steps >= step_limit:
                raise NonTerminationError(f"{program.name}: no halt within {step_limit} steps")
            step()
        return m.output, m.report()
    while m.state not in _HALTING:
        if m.steps >= step_limit:
            raise NonTerminationError(f"{program.name}: no halt within {step_limit} steps")
        before = tape.head
        m.step()
        on_step(m, before)
    return m.output, m.report()


def ra_equivalent_reversals(report: RunReport) -> int:
    """Scan bound of an ordinary machine simulating the run's random accesses."""
    return report.r_used + 2 * report.q_used
