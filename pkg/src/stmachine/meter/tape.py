"""External memory tape with head-reversal, random-access and write counters."""
from __future__ import annotations

from typing import Hashable, Iterable, Optional, Sequence

LEFT = -1
STAY = 0
RIGHT = 1


class _EndMarker:
    __slots__ = ("name",)

    def __init__(self, name: str) -> None:
        self.name = name

    def __repr__(self) -> str:
        return self.name

    def __reduce__(self):
        return (_end_marker, (self.name,))


def _end_marker(name: str) -> "_EndMarker":
    return LEFT_END if name == "LEFT_END" else RIGHT_END


# Read at positions 0 and n+1; they are never stored in the cells.
LEFT_END = _EndMarker("LEFT_END")
RIGHT_END = _EndMarker("RIGHT_END")


class MeterError(Exception):
    """Base class for runtime errors raised by the metered machine."""


class TapeFormatError(MeterError):
    pass


class HeadOutOfRangeError(MeterError):
    pass


class ReadOnlyTapeError(MeterError):
    """Write attempted on a tape loaded read-only (ST- discipline)."""


class Alphabet:
    """Finite ordered set of tape symbols."""

    def __init__(self, symbols: Iterable[Hashable]) -> None:
        symbols = tuple(symbols)
        if not symbols:
            raise ValueError("alphabet must be non-empty")
        if len(set(symbols)) != len(symbols):
            raise ValueError("alphabet contains duplicate symbols")
        self.symbols = symbols
        self._members = frozenset(symbols)

    def __contains__(self, symbol: object) -> bool:
        return symbol in self._members

    def __len__(self) -> int:
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __repr__(self) -> str:
        return f"Alphabet({list(self.symbols)!r})"


class ExternalTape:
    """The external tape: cells 1..n plus end markers at 0 and n+1.

    ``reversals`` counts how often a left/right move differs from the last
    non-stay move. A seek resets the remembered direction, so the first
    move after a seek never counts as a reversal.
    """

    def __init__(self, cells: Sequence[Hashable], writable: bool = False) -> None:
        self.cells = list(cells)
        self.writable = writable
        self.head = 1
        self.last_direction = STAY
        self.reversals = 0
        self.random_accesses = 0
        self.external_writes = 0

    def __len__(self) -> int:
        return len(self.cells)

    @property
    def n(self) -> int:
        return len(self.cells)

    def read(self):
        if self.head == 0:
            return LEFT_END
        if self.head == len(self.cells) + 1:
            return RIGHT_END
        return self.cells[self.head - 1]

    def write(self, symbol: Hashable) -> None:
        if not self.writable:
            raise ReadOnlyTapeError(f"write of {symbol!r} at {self.head} on a read-only tape")
        if not 1 <= self.head <= len(self.cells):
            raise HeadOutOfRangeError(f"cannot overwrite an end marker at position {self.head}")
        self.cells[self.head - 1] = symbol
        self.external_writes += 1

    def move(self, direction: int) -> None:
        if direction == STAY:
            return
        if direction != LEFT and direction != RIGHT:
            raise ValueError(f"bad move {direction!r}")
        target = self.head + direction
        if target < 0 or target > len(self.cells) + 1:
            raise HeadOutOfRangeError(f"head moved past the end marker (to {target})")
        last = self.last_direction
        if direction != last and last != STAY:
            self.reversals += 1
        self.last_direction = direction
        self.head = target

    def seek(self, address: int) -> None:
        if not 1 <= address <= len(self.cells):
            raise HeadOutOfRangeError(f"seek address {address} outside 1..{len(self.cells)}")
        self.head = address
        self.random_accesses += 1
        self.last_direction = STAY


def load_tape(
    tokens: Iterable[Hashable],
    writable: bool = False,
    alphabet: Optional[Iterable[Hashable]] = None,
) -> ExternalTape:
    tokens = list(tokens)
    if alphabet is not None:
        allowed = alphabet if isinstance(alphabet, Alphabet) else Alphabet(alphabet)
        for pos, tok in enumerate(tokens, start=1):
            if tok not in allowed:
                raise TapeFormatError(f"symbol {tok!r} at position {pos} is not in the alphabet")
    return ExternalTape(tokens, writable=writable)
