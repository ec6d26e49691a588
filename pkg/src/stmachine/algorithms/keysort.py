"""KEYSORT on a read-only tape by repeated selection scans.

Records are flat: ``key:value;`` with one character per tape cell. Join
inputs hold two relations separated by ``#``. Keys compare as character
strings, so generated keys are zero-padded to a fixed width.

Each pass scans the whole tape, alternating direction, and keeps the ``b``
smallest records strictly above the last record emitted; at the end marker
it emits them in order. Progress is measured on (key, original position),
which makes duplicate keys safe and gives a stable sort. A pass that finds
fewer than ``b`` records is the last one, so ``ceil(N/b) + 1`` passes
suffice.
"""
from __future__ import annotations

import random
import string
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from ..meter import (
    DONE,
    LEFT,
    LEFT_END,
    REJECT,
    RIGHT,
    RIGHT_END,
    STAY,
    Action,
    ControlProgram,
)

RECORD_CHARS = tuple(string.digits + string.ascii_letters)
FIELD_SEP, RECORD_SEP, RELATION_SEP = ":", ";", "#"
FLAT_ALPHABET = RECORD_CHARS + (FIELD_SEP, RECORD_SEP, RELATION_SEP)

REL_B, REL_A = 0, 1  # B-records sort before A-records within equal (K, I_B)


class RecordFormatError(ValueError):
    pass


# -- flat record codec --------------------------------------------------------

def encode_flat(records: Iterable[tuple]) -> list[str]:
    out: list[str] = []
    for key, value in records:
        key, value = str(key), str(value)
        if not key or set(key + value) - set(RECORD_CHARS):
            raise RecordFormatError(f"record {(key, value)!r} has characters outside [0-9A-Za-z]")
        out += list(key) + [FIELD_SEP] + list(value) + [RECORD_SEP]
    return out


def encode_flat_join(a: Iterable[tuple], b: Iterable[tuple]) -> list[str]:
    return encode_flat(a) + [RELATION_SEP] + encode_flat(b)


def parse_flat(tokens: Sequence[str]) -> list[tuple[str, str]]:
    text = "".join(tokens)
    if not text:
        return []
    if not text.endswith(RECORD_SEP):
        raise RecordFormatError("input does not end with ';'")
    out = []
    for i, rec in enumerate(text[:-1].split(RECORD_SEP), start=1):
        key, sep, value = rec.partition(FIELD_SEP)
        if not sep or not key or FIELD_SEP in value or set(key + value) - set(RECORD_CHARS):
            raise RecordFormatError(f"record {i} ({rec!r}) is not key:value")
        out.append((key, value))
    return out


def parse_flat_join(tokens: Sequence[str]) -> tuple[list, list]:
    text = "".join(tokens)
    if text.count(RELATION_SEP) != 1:
        raise RecordFormatError("join input needs exactly one '#'")
    a, _, b = text.partition(RELATION_SEP)
    return parse_flat(a), parse_flat(b)


def random_records(rng: random.Random, count: int, key_space: int, width: Optional[int] = None) -> list[tuple]:
    """Records with zero-padded numeric keys and short lowercase values."""
    width = width or len(str(max(key_space - 1, 0)))
    return [
        (str(rng.randrange(key_space)).zfill(width), "".join(rng.choice("abcdefgh") for _ in range(rng.randint(1, 2))))
        for _ in range(count)
    ]


def keysort_oracle(records: Sequence[tuple]) -> list[tuple]:
    return sorted(records, key=lambda r: r[0])  # sorted() is stable


@dataclass(frozen=True)
class SorterSpec:
    buffer_tuples: int = 1
    key: str = "key field, compared character by character"
    tie_break: str = "original position on the tape"

    def __post_init__(self) -> None:
        if self.buffer_tuples < 1:
            raise ValueError("buffer must hold at least one tuple")

    def bound_scans(self, records: int) -> int:
        """Scan bound 2*ceil(N/b) + 1 for N records."""
        return 2 * -(-records // self.buffer_tuples) + 1


# -- the scan engine ------------------------------------------------------------

class _ScanEngine(ControlProgram):
    """Record parser for both scan directions plus the virtual A-replication.

    Control states are ``mode:part:region``. In join mode the A-region
    precedes ``#`` and each completed A-record is replayed ``sizeB`` times
    through stay-steps, with ``iteratorA`` running up on forward scans and down on
    backward ones; B-records get ``currentBidx`` = their rank among B-records.
    """

    join = False

    def __init__(self) -> None:
        regs = ["ord", "cnt", "ck", "cv"]
        if self.join:
            regs += ["sizeB", "currentBidx", "iteratorA"]
        self.registers = tuple(regs) + tuple(self.extra_registers())
        self.internal_alphabet = RECORD_CHARS
        modes = ("count", "fwd", "bwd", "rep")
        parts = ("key", "val", "rec", "f", "b", "-")
        self.states = tuple(f"{m}:{p}:{r}" for m in modes for p in parts for r in "AB") + ("rewind:-:-",)

    def extra_registers(self) -> list:
        return []

    def init_arena(self, arena) -> None:
        arena.put_int("ord", 0)
        arena.put_int("cnt", 0)
        if self.join:
            arena.put_int("sizeB", 0)
            arena.put_int("currentBidx", 0)

    # hooks
    def on_record(self, arena, sort_key: tuple, value: tuple) -> tuple:
        raise NotImplementedError

    def on_pass_end(self, arena, at_right: bool) -> Action:
        raise NotImplementedError

    # helpers
    def _next_pass(self, arena, at_right: bool, emit: tuple = ()) -> Action:
        if at_right:
            arena.put_int("ord", arena.get_int("cnt") + 1)
            if self.join:
                arena.put_int("currentBidx", arena.get_int("sizeB") + 1)
            return Action("bwd:rec:B" if self.join else "bwd:rec:A", move=LEFT, emit=emit)
        arena.put_int("ord", 0)
        if self.join:
            arena.put_int("currentBidx", 0)
        return Action("fwd:key:A", move=RIGHT, emit=emit)

    def _after_backward(self, symbol, region: str, arena, emit: tuple = ()) -> Action:
        if symbol == RECORD_SEP:
            return Action(f"bwd:val:{region}", move=LEFT, emit=emit)
        if symbol == RELATION_SEP:
            return Action("bwd:rec:A", move=LEFT, emit=emit)
        action = self.on_pass_end(arena, at_right=False)
        return Action(action.state, move=action.move, emit=emit + action.emit)

    def _done_record(self, arena, region: str, forward: bool, symbol, emit: tuple) -> Action:
        arena.clear("ck")
        arena.clear("cv")
        if forward:
            return Action(f"fwd:key:{region}", move=RIGHT, emit=emit)
        return self._after_backward(symbol, region, arena, emit)

    def _complete(self, mode: str, region: str, symbol, arena) -> Action:
        forward = mode != "bwd"
        if mode == "count":
            arena.put_int("cnt", arena.get_int("cnt") + 1)
            if region == "B":
                arena.put_int("sizeB", arena.get_int("sizeB") + 1)
            arena.clear("ck")
            arena.clear("cv")
            return Action(f"count:key:{region}", move=RIGHT)
        if not forward:
            arena.put("ck", reversed(arena.get("ck")))
            arena.put("cv", reversed(arena.get("cv")))
        order = arena.get_int("ord") + (1 if forward else -1)
        arena.put_int("ord", order)
        key, value = arena.get("ck"), arena.get("cv")
        if not self.join:
            emit = self.on_record(arena, (key, 0, REL_B, order), value)
            return self._done_record(arena, region, forward, symbol, emit)
        if region == "B":
            bidx = arena.get_int("currentBidx") + (1 if forward else -1)
            arena.put_int("currentBidx", bidx)
            emit = self.on_record(arena, (key, bidx, REL_B, order), value)
            return self._done_record(arena, region, forward, symbol, emit)
        size_b = arena.get_int("sizeB")
        if size_b == 0:
            return self._done_record(arena, region, forward, symbol, ())
        arena.put_int("iteratorA", 1 if forward else size_b)
        return Action(f"rep:{'f' if forward else 'b'}:A", move=STAY)

    def _replicate(self, direction: str, symbol, arena) -> Action:
        it = arena.get_int("iteratorA")
        key, value = arena.get("ck"), arena.get("cv")
        emit = self.on_record(arena, (key, it, REL_A, arena.get_int("ord")), value)
        nxt = it + 1 if direction == "f" else it - 1
        if 1 <= nxt <= arena.get_int("sizeB"):
            arena.put_int("iteratorA", nxt)
            return Action(f"rep:{direction}:A", move=STAY, emit=emit)
        arena.clear("iteratorA")
        return self._done_record(arena, "A", direction == "f", symbol, emit)

    def step(self, state, symbol, arena) -> Action:
        mode, part, region = state.split(":")
        if mode == "rewind":
            if symbol is LEFT_END:
                return self.after_rewind(arena)
            return Action(state, move=LEFT)
        if mode == "rep":
            return self._replicate(part, symbol, arena)
        if mode == "bwd":
            return self._backward(part, region, symbol, arena)
        return self._forward(mode, part, region, symbol, arena)

    def after_rewind(self, arena) -> Action:
        return self._next_pass(arena, at_right=False)

    def _forward(self, mode: str, part: str, region: str, symbol, arena) -> Action:
        if part == "val":
            if symbol == RECORD_SEP:
                return self._complete(mode, region, symbol, arena)
            if symbol in RECORD_CHARS:
                arena.push("cv", symbol)
                return Action(f"{mode}:val:{region}", move=RIGHT)
            return Action(REJECT)
        if symbol is RIGHT_END:
            if arena.size("ck") or (self.join and region == "A"):
                return Action(REJECT)
            if mode == "count":
                return Action("rewind:-:-", move=LEFT) if self.rewinds() else self.after_count(arena)
            arena.put_int("cnt", arena.get_int("ord"))
            return self.on_pass_end(arena, at_right=True)
        if symbol == RELATION_SEP:
            if self.join and region == "A" and not arena.size("ck"):
                return Action(f"{mode}:key:B", move=RIGHT)
            return Action(REJECT)
        if symbol == FIELD_SEP:
            if not arena.size("ck"):
                return Action(REJECT)
            return Action(f"{mode}:val:{region}", move=RIGHT)
        if symbol in RECORD_CHARS:
            arena.push("ck", symbol)
            return Action(f"{mode}:key:{region}", move=RIGHT)
        return Action(REJECT)

    def rewinds(self) -> bool:
        return True

    def after_count(self, arena) -> Action:
        return self._next_pass(arena, at_right=True)

    def _backward(self, part: str, region: str, symbol, arena) -> Action:
        if part == "rec":
            if symbol == RECORD_SEP:
                return Action(f"bwd:val:{region}", move=LEFT)
            if symbol == RELATION_SEP and region == "B":
                return Action("bwd:rec:A", move=LEFT)
            if symbol is LEFT_END:
                return self.on_pass_end(arena, at_right=False)
            return Action(REJECT)
        if part == "val":
            if symbol == FIELD_SEP:
                return Action(f"bwd:key:{region}", move=LEFT)
            arena.push("cv", symbol)
            return Action(f"bwd:val:{region}", move=LEFT)
        if symbol in RECORD_CHARS:
            arena.push("ck", symbol)
            return Action(f"bwd:key:{region}", move=LEFT)
        return self._complete("bwd", region, symbol, arena)


def _sort_tuple(key: tuple, ib: int, rel: int, pos: int) -> tuple:
    return (key, ib, rel, pos)


class _SelectionSorter(_ScanEngine):
    """Selection buffer of ``b`` slots on top of the scan engine."""

    def __init__(self, spec: SorterSpec) -> None:
        self.spec = spec
        self.b = spec.buffer_tuples
        super().__init__()

    def extra_registers(self) -> list:
        regs = ["lk", "lp"] + (["lb", "lr"] if self.join else [])
        for i in range(self.b):
            regs += [f"s{i}k", f"s{i}v", f"s{i}p"] + ([f"s{i}b", f"s{i}r"] if self.join else [])
        return regs

    # slots ---------------------------------------------------------------
    def _read(self, arena, prefix: str) -> Optional[tuple]:
        pos = arena.get_int(f"{prefix}p")
        if pos is None:
            return None
        ib = rel = 0
        if self.join:
            ib = arena.get_int(f"{prefix}b")
            rel = REL_A if arena.get(f"{prefix}r") == ("A",) else REL_B
        return _sort_tuple(arena.get(f"{prefix}k"), ib, rel, pos)

    def _write(self, arena, prefix: str, sort_key: tuple, value: Optional[tuple]) -> None:
        key, ib, rel, pos = sort_key
        arena.put(f"{prefix}k", key)
        arena.put_int(f"{prefix}p", pos)
        if value is not None:
            arena.put(f"{prefix}v", value)
        if self.join:
            arena.put_int(f"{prefix}b", ib)
            arena.put(f"{prefix}r", ["A" if rel == REL_A else "B"])

    def _clear(self, arena, prefix: str) -> None:
        for suffix in ("k", "v", "p") + (("b", "r") if self.join else ()):
            arena.clear(f"{prefix}{suffix}")

    def on_record(self, arena, sort_key: tuple, value: tuple) -> tuple:
        last = arena.get_int("lp") is not None and self._read(arena, "l")
        if last and sort_key <= last:
            return ()
        worst, worst_slot = None, None
        for i in range(self.b):
            held = self._read(arena, f"s{i}")
            if held is None:
                self._write(arena, f"s{i}", sort_key, value)
                return ()
            if worst is None or held > worst:
                worst, worst_slot = held, i
        if sort_key < worst:
            self._write(arena, f"s{worst_slot}", sort_key, value)
        return ()

    def on_pass_end(self, arena, at_right: bool) -> Action:
        held = []
        for i in range(self.b):
            rec = self._read(arena, f"s{i}")
            if rec is not None:
                held.append((rec, arena.get(f"s{i}v")))
                self._clear(arena, f"s{i}")
        held.sort()
        emit = self.emit_sorted(arena, held)
        if held:
            self._write(arena, "l", held[-1][0], None)
        if len(held) < self.b:
            return Action(DONE, emit=emit)
        return self._next_pass(arena, at_right, emit)

    def emit_sorted(self, arena, held: list) -> tuple:
        return tuple(("".join(rec[0]), "".join(value)) for rec, value in held)


class KeySort(_SelectionSorter):
    """Stable sort of flat records by key. Emits ``(key, value)`` pairs."""

    def __init__(self, spec: SorterSpec) -> None:
        super().__init__(spec)
        self.name = f"keysort(b={spec.buffer_tuples})"
        self.start = "fwd:key:A"

    def step(self, state, symbol, arena) -> Action:
        if state.startswith("count"):
            # plain sorting needs no counting pass: the first pass counts
            state = "fwd" + state[len("count"):]
        return super().step(state, symbol, arena)



def keysort_scan(b) -> KeySort:
    spec = b if isinstance(b, SorterSpec) else SorterSpec(b)
    return KeySort(spec)
