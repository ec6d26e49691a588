"""Two-party protocols extracted from metered runs.

Splitting the input at a boundary ``p`` gives Alice cells 1..p and Bob
cells p+1..n. Whenever the head crosses the boundary the machine's whole
configuration minus the tape (control state plus arena) is handed to the
other side, so the number of messages is bounded by the number of scans.
"""
from __future__ import annotations

import copy
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .machine import ControlProgram, Machine, default_step_limit, NonTerminationError, SEEK
from .tape import ExternalTape, MeterError


class ExtractionError(MeterError):
    """The run cannot be split into a two-party protocol (it used seek)."""


class IntegrityError(MeterError):
    """A replayed protocol diverged from its transcript."""


@dataclass(frozen=True)
class Message:
    direction: str  # "right" (Alice to Bob) or "left" (Bob to Alice)
    state_id: int
    snapshot: bytes

    def bits(self, state_bits: int) -> int:
        return state_bits + 8 * len(self.snapshot)


@dataclass
class ProtocolTranscript:
    boundary: int
    state_bits: int
    messages: list = field(default_factory=list)
    halted: str = ""
    output: list = field(default_factory=list)
    r_used: int = 0
    s_peak: int = 0

    @property
    def total_bits(self) -> int:
        return sum(m.bits(self.state_bits) for m in self.messages)

    def to_dict(self) -> dict:
        return {
            "boundary": self.boundary,
            "state_bits": self.state_bits,
            "messages": [
                {"direction": m.direction, "state_id": m.state_id, "snapshot": m.snapshot.hex()}
                for m in self.messages
            ],
            "total_bits": self.total_bits,
            "halted": self.halted,
            "r_used": self.r_used,
            "s_peak": self.s_peak,
        }


def _state_bits(program: ControlProgram) -> int:
    return max(1, math.ceil(math.log2(len(program.control_states))))


def _crossing(before: int, after: int, boundary: int) -> Optional[str]:
    if before <= boundary < after:
        return "right"
    if after <= boundary < before:
        return "left"
    return None


def extract_protocol(
    program: ControlProgram,
    tape: ExternalTape,
    boundary: int,
    step_limit: Optional[int] = None,
) -> ProtocolTranscript:
    if not 1 <= boundary <= tape.n:
        raise ValueError(f"boundary {boundary} outside 1..{tape.n}")
    if step_limit is None:
        step_limit = default_step_limit(tape.n)
    states = program.control_states
    transcript = ProtocolTranscript(boundary=boundary, state_bits=_state_bits(program))
    m = Machine.boot(program, tape)
    while not m.halted:
        if m.steps >= step_limit:
            raise NonTerminationError(f"{program.name}: no halt within {step_limit} steps")
        before = tape.head
        action = m.step()
        if action.move == SEEK:
            raise ExtractionError("random access cannot be split between two parties")
        side = _crossing(before, tape.head, boundary)
        if side is not None:
            transcript.messages.append(Message(side, states.index(m.state), m.arena.snapshot()))
    report = m.report()
    transcript.halted = report.halted
    transcript.output = list(m.output)
    transcript.r_used = report.r_used
    transcript.s_peak = report.s_peak
    return transcript


class _Hidden:
    def __repr__(self) -> str:
        return "HIDDEN"


HIDDEN = _Hidden()


def replay_protocol(
    program: ControlProgram,
    u: Sequence,
    v: Sequence,
    transcript: ProtocolTranscript,
    writable: bool = False,
    step_limit: Optional[int] = None,
) -> bool:
    """Re-run the protocol with each party seeing only its half of the input.

    Returns True iff the two-party run halts like the transcript's run and
    writes the same output. Raises IntegrityError as soon as a message
    differs from the transcript; that can only happen when the program
    keeps state outside its control state and arena.
    """
    p = len(u)
    if p != transcript.boundary:
        raise IntegrityError(f"split at {p} but transcript boundary is {transcript.boundary}")
    n = p + len(v)
    if step_limit is None:
        step_limit = default_step_limit(n)
    states = program.control_states
    parties = {
        "alice": ExternalTape(list(u) + [HIDDEN] * len(v), writable=writable),
        "bob": ExternalTape([HIDDEN] * p + list(v), writable=writable),
    }
    programs = {"alice": copy.deepcopy(program), "bob": copy.deepcopy(program)}
    who = "alice"
    m = Machine.boot(programs[who], parties[who])
    output: list = []
    expected = iter(transcript.messages)
    steps = 0
    while not m.halted:
        if steps >= step_limit:
            raise NonTerminationError("replayed protocol does not halt")
        if m.tape.read() is HIDDEN:
            raise IntegrityError(f"{who} read a cell owned by the other party")
        before = m.tape.head
        action = m.step()
        steps += 1
        output.extend(action.emit)
        if action.move == SEEK:
            raise ExtractionError("random access cannot be split between two parties")
        side = _crossing(before, m.tape.head, p)
        if side is None:
            continue
        msg = Message(side, states.index(m.state), m.arena.snapshot())
        want = next(expected, None)
        if want != msg:
            raise IntegrityError(f"message {msg} from {who} does not match transcript {want}")
        other = "bob" if who == "alice" else "alice"
        tape = parties[other]
        tape.head = m.tape.head
        tape.last_direction = m.tape.last_direction
        arena = programs[other].new_arena()
        arena.restore(msg.snapshot)
        m = Machine(programs[other], tape, arena, states[msg.state_id])
        who = other
    if next(expected, None) is not None:
        raise IntegrityError("transcript has messages the replay never produced")
    return m.report().halted == transcript.halted and output == transcript.output
