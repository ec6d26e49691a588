"""Metered internal memory.

All internal tapes of the machine are modelled as one arena of named
registers, each holding a sequence of cells over a finite internal
alphabet. Only the summed space matters for the resource bound, so the
arena tracks ``used`` (cells currently occupied) and ``peak``.
"""
from __future__ import annotations

import math
from collections import deque
from typing import Hashable, Iterable, Optional, Sequence

from .tape import MeterError

ADDRESS_REGISTER = "addr"


class ArenaError(MeterError):
    pass


class Arena:
    def __init__(self, alphabet: Sequence[Hashable], registers: Iterable[str]) -> None:
        self.alphabet = tuple(alphabet)
        self._code = {sym: i for i, sym in enumerate(self.alphabet)}
        if len(self._code) != len(self.alphabet):
            raise ArenaError("internal alphabet contains duplicates")
        self._binary = "0" in self._code and "1" in self._code
        self.registers = tuple(registers)
        self._regs: dict[str, deque] = {name: deque() for name in self.registers}
        self.used = 0
        self.peak = 0

    # -- bookkeeping -------------------------------------------------------
    def _reg(self, name: str) -> deque:
        try:
            return self._regs[name]
        except KeyError:
            raise ArenaError(f"undeclared register {name!r}") from None

    def _check(self, symbol: Hashable) -> None:
        if symbol not in self._code:
            raise ArenaError(f"symbol {symbol!r} is not in the internal alphabet")

    def _grow(self, delta: int) -> None:
        used = self.used = self.used + delta
        if used > self.peak:
            self.peak = used

    # -- register access ---------------------------------------------------
    def get(self, name: str) -> tuple:
        return tuple(self._reg(name))

    def size(self, name: str) -> int:
        return len(self._reg(name))

    def put(self, name: str, cells: Iterable[Hashable]) -> None:
        reg = self._reg(name)
        cells = list(cells)
        code = self._code
        for c in cells:
            if c not in code:
                self._check(c)
        old = len(reg)
        reg.clear()
        reg.extend(cells)
        self._grow(len(cells) - old)

    def clear(self, name: str) -> None:
        reg = self._reg(name)
        self.used -= len(reg)
        reg.clear()

    def push(self, name: str, symbol: Hashable) -> None:
        self._check(symbol)
        self._reg(name).append(symbol)
        self._grow(1)

    def pop(self, name: str):
        reg = self._reg(name)
        if not reg:
            raise ArenaError(f"pop from empty register {name!r}")
        self.used -= 1
        return reg.pop()

    def popleft(self, name: str):
        reg = self._reg(name)
        if not reg:
            raise ArenaError(f"popleft from empty register {name!r}")
        self.used -= 1
        return reg.popleft()

    def top(self, name: str):
        reg = self._reg(name)
        return reg[-1] if reg else None

    def get_int(self, name: str) -> Optional[int]:
        """Register read as a binary number; None when empty."""
        reg = self._reg(name)
        if not reg:
            return None
        return int("".join(reg), 2)

    def put_int(self, name: str, value: int) -> None:
        if value < 0:
            raise ArenaError("registers hold naturals only")
        cells = format(value, "b")
        if not self._binary:
            for c in cells:
                self._check(c)
        reg = self._reg(name)
        old = len(reg)
        reg.clear()
        reg.extend(cells)
        self._grow(len(cells) - old)

    def increment(self, name: str) -> None:
        """Add one to a binary register in place (amortized O(1))."""
        reg = self._reg(name)
        old = len(reg)
        ones = 0
        while reg and reg[-1] == "1":
            reg.pop()
            ones += 1
        if reg:
            reg.pop()
        reg.append("1")
        reg.extend("0" * ones)
        self._grow(len(reg) - old)

    def decrement(self, name: str) -> bool:
        """Subtract one from a binary register in place; False (no change) at zero.

        Only the trailing bits are touched, so a countdown costs amortized
        O(1) per call. An empty register counts as zero.
        """
        reg = self._reg(name)
        if "1" not in reg:
            return False
        old = len(reg)
        zeros = 0
        while reg[-1] == "0":
            reg.pop()
            zeros += 1
        reg.pop()
        if reg:
            reg.append("0")
        elif not zeros:
            reg.append("0")
        reg.extend("1" * zeros)
        self._grow(len(reg) - old)
        return True

    # -- snapshots ----------------------------------------------------------
    @property
    def bits_per_cell(self) -> int:
        # one extra code terminates each register
        return max(1, math.ceil(math.log2(len(self.alphabet) + 1)))

    def snapshot(self) -> bytes:
        """Pack every register, in declaration order, into bytes."""
        bpc = self.bits_per_cell
        stop = len(self.alphabet)
        value = 0
        nbits = 0
        for name in self.registers:
            for sym in self._regs[name]:
                value = (value << bpc) | self._code[sym]
                nbits += bpc
            value = (value << bpc) | stop
            nbits += bpc
        nbytes = (nbits + 7) // 8
        return (value << (nbytes * 8 - nbits)).to_bytes(nbytes, "big") if nbytes else b""

    def restore(self, data: bytes) -> None:
        """Overwrite all registers from a snapshot produced by ``snapshot``."""
        bpc = self.bits_per_cell
        stop = len(self.alphabet)
        total = len(data) * 8
        value = int.from_bytes(data, "big") if data else 0
        offset = 0
        contents: list[list] = []
        for _ in self.registers:
            cells = []
            while True:
                if offset + bpc > total:
                    raise ArenaError("truncated arena snapshot")
                code = (value >> (total - offset - bpc)) & ((1 << bpc) - 1)
                offset += bpc
                if code == stop:
                    break
                if code > stop:
                    raise ArenaError("corrupt arena snapshot")
                cells.append(self.alphabet[code])
            contents.append(cells)
        for name, cells in zip(self.registers, contents):
            self.put(name, cells)

    def snapshot_bytes(self) -> int:
        return math.ceil((self.used + len(self.registers)) * self.bits_per_cell / 8)

    def __repr__(self) -> str:
        regs = {k: "".join(map(str, v)) for k, v in self._regs.items() if v}
        return f"Arena(used={self.used}, peak={self.peak}, {regs})"
