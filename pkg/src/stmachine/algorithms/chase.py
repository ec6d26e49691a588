"""Pointer chasing on ``1^m # w_0 ... w_{2^m-1}``.

Block ``i`` (the word ``w_i``) occupies tape cells ``m+2+i*m .. m+1+(i+1)*m``.
Both programs track the head position in a binary register and derive the
block index and bit offset from it, so neither needs random access.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from ..meter import ACCEPT, LEFT, REJECT, RIGHT, RIGHT_END, STAY, Action, ControlProgram

BITS = ("0", "1")
CHASE_ALPHABET = ("0", "1", "#")


def _locate(pos: int, m: int) -> tuple[int, int]:
    """Block index and offset of tape position ``pos``."""
    return divmod(pos - m - 2, m)


def _well_sized(arena) -> bool:
    m = arena.get_int("m")
    return arena.get_int("pos") - 1 == m + 1 + m * 2 ** m


class ChaseIndices(ControlProgram):
    """Deterministic chain following with at most ``k`` direction changes.

    The first forward scan validates the whole input and picks up every
    chain word lying ahead of the head. Each remaining word costs at most
    one reversal, and at most ``k`` words remain after the first scan.
    Registers: ``m``, ``pos`` (head position), ``word``, ``tgt`` (block
    wanted next), ``cnt`` (words read so far; ``k+2`` are needed).
    """

    registers = ("m", "pos", "word", "tgt", "cnt")
    internal_alphabet = BITS
    states = ("count", "first", "first_done_acc", "first_done_rej", "walk_left", "walk_right")
    start = "count"

    def __init__(self, k: int) -> None:
        if k < 1:
            raise ValueError("k must be at least 1")
        self.k = k
        self.name = f"chase(k={k})"

    def init_arena(self, arena) -> None:
        arena.put_int("m", 0)
        arena.put_int("cnt", 0)
        arena.put_int("tgt", 0)

    def _consume_word(self, arena, block: int):
        """Apply the word of ``block``; returns ACCEPT/REJECT once decided, else None."""
        m = arena.get_int("m")
        word = "".join(arena.get("word"))
        while True:
            cnt = arena.get_int("cnt") + 1
            arena.put_int("cnt", cnt)
            if cnt == self.k + 2:
                return ACCEPT if word == "1" * m else REJECT
            nxt = int(word, 2) if word else 0
            arena.put_int("tgt", nxt)
            if nxt != block:
                arena.clear("word")
                return None

    def step(self, state, symbol, arena) -> Action:
        if state == "count":
            if symbol == "1":
                arena.put_int("m", arena.get_int("m") + 1)
                return Action("count", move=RIGHT)
            if symbol != "#":
                return Action(REJECT)
            m = arena.get_int("m")
            arena.put_int("pos", m + 2)
            if m == 0:
                # single empty word: every chain ends at 0 = 2^0 - 1
                return Action("first_done_acc", move=RIGHT)
            return Action("first", move=RIGHT)

        if state.startswith("first_done"):
            if symbol in BITS:
                arena.put_int("pos", arena.get_int("pos") + 1)
                return Action(state, move=RIGHT)
            if symbol is RIGHT_END and _well_sized(arena):
                return Action(ACCEPT if state == "first_done_acc" else REJECT)
            return Action(REJECT)

        m = arena.get_int("m")
        pos = arena.get_int("pos")
        if state == "first":
            if symbol is RIGHT_END:
                if not _well_sized(arena):
                    return Action(REJECT)
                return self._walk_toward(arena, pos, LEFT)
            if symbol not in BITS:
                return Action(REJECT)
            block, off = _locate(pos, m)
            arena.put_int("pos", pos + 1)
            if block == arena.get_int("tgt") and arena.get_int("cnt") < self.k + 2:
                arena.push("word", symbol)
                if off == m - 1:
                    verdict = self._consume_word(arena, block)
                    if verdict is not None:
                        return Action(f"first_done_{verdict[:3]}", move=RIGHT)
            return Action("first", move=RIGHT)

        # walking after the first scan; the input is known to be well formed
        direction = LEFT if state == "walk_left" else RIGHT
        block, off = _locate(pos, m)
        tgt = arena.get_int("tgt")
        if symbol in BITS and block == tgt:
            arena.push("word", symbol)
            edge = 0 if direction == LEFT else m - 1
            if off == edge:
                if direction == LEFT:
                    arena.put("word", reversed(arena.get("word")))
                verdict = self._consume_word(arena, block)
                if verdict is not None:
                    return Action(verdict)
                tgt = arena.get_int("tgt")
                direction = LEFT if tgt < block else RIGHT
                return self._walk_toward(arena, pos, direction)
            return self._walk_toward(arena, pos, direction)
        return self._walk_toward(arena, pos, LEFT if tgt < block else RIGHT)

    def _walk_toward(self, arena, pos: int, direction: int) -> Action:
        arena.put_int("pos", pos + direction)
        return Action("walk_left" if direction == LEFT else "walk_right", move=direction)


@dataclass(frozen=True)
class Certificate:
    """Guessed chain ``j_1 .. j_{k+1}``."""

    indices: tuple

    @property
    def k(self) -> int:
        return len(self.indices) - 1


class VerifyChaseCertificate(ControlProgram):
    """Single forward scan checking a preloaded certificate.

    Checks ``w_0 = j_1``, ``w_{j_i} = j_{i+1}`` and ``w_{j_{k+1}} = 2^m - 1``
    as the blocks go by. The certificate sits in registers ``j1 .. j{k+1}``.
    """

    internal_alphabet = BITS
    states = ("count", "scan")
    start = "count"

    def __init__(self, k: int, cert: Certificate) -> None:
        if len(cert.indices) != k + 1:
            raise ValueError(f"certificate for k={k} needs {k + 1} indices")
        self.k = k
        self.cert = cert
        self.name = f"chase-cert(k={k})"
        self.slots = tuple(f"j{i}" for i in range(1, k + 2))
        self.registers = ("m", "pos", "word") + self.slots

    def init_arena(self, arena) -> None:
        arena.put_int("m", 0)
        for reg, j in zip(self.slots, self.cert.indices):
            arena.put_int(reg, j)

    def _expected(self, arena, block: int) -> list:
        js = [arena.get_int(r) for r in self.slots]
        want = [js[0]] if block == 0 else []
        want += [js[i + 1] for i in range(self.k) if js[i] == block]
        if js[-1] == block:
            want.append(2 ** arena.get_int("m") - 1)
        return want

    def step(self, state, symbol, arena) -> Action:
        if state == "count":
            if symbol == "1":
                arena.put_int("m", arena.get_int("m") + 1)
                return Action("count", move=RIGHT)
            if symbol != "#":
                return Action(REJECT)
            arena.put_int("pos", arena.get_int("m") + 2)
            return Action("scan", move=RIGHT)
        m = arena.get_int("m")
        pos = arena.get_int("pos")
        if symbol is RIGHT_END:
            in_range = all(arena.get_int(r) < 2 ** m for r in self.slots)
            if m == 0:
                return Action(ACCEPT if in_range and pos == 2 else REJECT)
            return Action(ACCEPT if in_range and _well_sized(arena) else REJECT)
        if symbol not in BITS or m == 0:
            return Action(REJECT)
        block, off = _locate(pos, m)
        arena.put_int("pos", pos + 1)
        arena.push("word", symbol)
        if off == m - 1:
            value = int("".join(arena.get("word")), 2)
            arena.clear("word")
            if any(w != value for w in self._expected(arena, block)):
                return Action(REJECT)
        return Action("scan", move=RIGHT)


def chase_indices(k: int) -> ChaseIndices:
    return ChaseIndices(k)


def verify_chase_certificate(k: int, cert) -> VerifyChaseCertificate:
    if not isinstance(cert, Certificate):
        cert = Certificate(tuple(cert))
    return VerifyChaseCertificate(k, cert)
