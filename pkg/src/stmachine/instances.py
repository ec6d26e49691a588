"""Hard-instance generators, document codecs and brute-force oracles.

Documents are lists of tag tokens (``"<a>"``, ``"</a>"``, ``"<a/>"``), one
token per tape cell. Bitstrings and chase strings are lists of
one-character tokens.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence


class InstanceFormatError(ValueError):
    pass


class DocumentParseError(ValueError):
    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} (token {position})")
        self.position = position


# -- sets and bitstrings ----------------------------------------------------

@dataclass(frozen=True)
class BitSet:
    n: int
    members: frozenset

    def __post_init__(self) -> None:
        bad = [i for i in self.members if not 1 <= i <= self.n]
        if bad:
            raise InstanceFormatError(f"members {sorted(bad)} outside 1..{self.n}")

    @classmethod
    def of(cls, n: int, members: Iterable[int] = ()) -> "BitSet":
        return cls(n, frozenset(members))

    @classmethod
    def from_bits(cls, bits: str) -> "BitSet":
        return cls(len(bits), frozenset(i for i, b in enumerate(bits, 1) if b == "1"))

    def bits(self) -> str:
        return "".join("1" if i in self.members else "0" for i in range(1, self.n + 1))


def make_disj_string(x: str, y: str) -> list[str]:
    if len(x) != len(y):
        raise InstanceFormatError(f"|x| = {len(x)} but |y| = {len(y)}")
    if set(x + y) - {"0", "1"}:
        raise InstanceFormatError("x and y must be bitstrings")
    return list(x) + ["#"] + list(y)


def disj_oracle(x: str, y: str) -> bool:
    if len(x) != len(y):
        raise InstanceFormatError(f"|x| = {len(x)} but |y| = {len(y)}")
    return not any(a == b == "1" for a, b in zip(x, y))


# -- pointer chasing ----------------------------------------------------------

@dataclass(frozen=True)
class FunctionTable:
    m: int
    values: tuple

    def __post_init__(self) -> None:
        if len(self.values) != 2 ** self.m:
            raise InstanceFormatError(f"need 2^{self.m} values, got {len(self.values)}")
        for w in self.values:
            if len(w) != self.m or set(w) - {"0", "1"}:
                raise InstanceFormatError(f"value {w!r} is not an {self.m}-bit string")

    @classmethod
    def from_ints(cls, m: int, ints: Sequence[int]) -> "FunctionTable":
        return cls(m, tuple(format(v, f"0{m}b") if m else "" for v in ints))

    def ints(self) -> list[int]:
        return [int(w, 2) if w else 0 for w in self.values]


def make_chase_string(m: int, table: FunctionTable) -> list[str]:
    if table.m != m:
        raise InstanceFormatError(f"table has width {table.m}, expected {m}")
    return ["1"] * m + ["#"] + [c for w in table.values for c in w]


def parse_chase_string(s: Sequence[str]) -> Optional[FunctionTable]:
    """The function table encoded by ``1^m # w_0 ... w_{2^m-1}``, or None."""
    s = "".join(s)
    head, sep, body = s.partition("#")
    if not sep or set(head) - {"1"} or set(body) - {"0", "1"}:
        return None
    m = len(head)
    if len(body) != m * 2 ** m:
        return None
    return FunctionTable(m, tuple(body[i * m:(i + 1) * m] for i in range(2 ** m)))


def chase_oracle(k: int, s: Sequence[str]) -> bool:
    """Membership in the k+1 pointer-chasing language by direct chain evaluation."""
    table = parse_chase_string(s)
    if table is None:
        return False
    f = table.ints()
    j = f[0]
    for _ in range(k):
        j = f[j]
    return f[j] == 2 ** table.m - 1


def chase_bruteforce(k: int, s: Sequence[str]) -> bool:
    """Same language, by searching all index tuples j_1..j_{k+1}."""
    table = parse_chase_string(s)
    if table is None:
        return False
    f = table.ints()
    top = 2 ** table.m - 1
    for js in itertools.product(range(2 ** table.m), repeat=k + 1):
        if f[0] != js[0]:
            continue
        if all(f[js[i]] == js[i + 1] for i in range(k)) and f[js[k]] == top:
            return True
    return False


# -- relations and their documents -------------------------------------------

def canonical(relation: Iterable[tuple]) -> tuple:
    return tuple(sorted(set(tuple(t) for t in relation)))


def bin_digits(i: int) -> str:
    if i < 0:
        raise InstanceFormatError("tuple components must be natural numbers")
    return format(i, "b")


def encode_tuple(i: int, j: int) -> list[str]:
    return (
        ["<tuple>", "<no1>"]
        + [f"<{b}/>" for b in bin_digits(i)]
        + ["</no1>", "<no2>"]
        + [f"<{b}/>" for b in bin_digits(j)]
        + ["</no2>", "</tuple>"]
    )


def encode_relpair(a: Iterable[tuple], b: Iterable[tuple]) -> list[str]:
    out = ["<rels>", "<rel1>"]
    for t in canonical(a):
        out += encode_tuple(*t)
    out += ["</rel1>", "<rel2>"]
    for t in canonical(b):
        out += encode_tuple(*t)
    out += ["</rel2>", "</rels>"]
    return out


def decode_relpair(tokens: Sequence[str]) -> tuple[tuple, tuple]:
    toks = list(tokens)
    pos = 0

    def expect(tok: str) -> None:
        nonlocal pos
        if pos >= len(toks):
            raise DocumentParseError(f"expected {tok} but input ended", pos + 1)
        if toks[pos] != tok:
            raise DocumentParseError(f"expected {tok}, found {toks[pos]}", pos + 1)
        pos += 1

    def number(close: str) -> int:
        nonlocal pos
        digits = ""
        while pos < len(toks) and toks[pos] in ("<0/>", "<1/>"):
            digits += toks[pos][1]
            pos += 1
        if not digits:
            raise DocumentParseError("empty number", pos + 1)
        if len(digits) > 1 and digits[0] == "0":
            raise DocumentParseError("leading zero in number", pos + 1)
        expect(close)
        return int(digits, 2)

    def relation(close: str) -> tuple:
        nonlocal pos
        tuples = []
        while pos < len(toks) and toks[pos] == "<tuple>":
            pos += 1
            expect("<no1>")
            i = number("</no1>")
            expect("<no2>")
            j = number("</no2>")
            expect("</tuple>")
            tuples.append((i, j))
        expect(close)
        if tuples != sorted(set(tuples)):
            raise DocumentParseError("tuples not in canonical order", pos)
        return tuple(tuples)

    expect("<rels>")
    expect("<rel1>")
    a = relation("</rel1>")
    expect("<rel2>")
    b = relation("</rel2>")
    expect("</rels>")
    if pos != len(toks):
        raise DocumentParseError("trailing tokens after </rels>", pos + 1)
    return a, b


def join1_oracle(a: Iterable[tuple], b: Iterable[tuple]) -> tuple:
    """Join on the first component: {(x, y) : A(z, x) and B(z, y)}."""
    a, b = list(a), list(b)
    return canonical((x, y) for (z, x) in a for (w, y) in b if z == w)


def reduce_disj_to_join(x: BitSet, y: BitSet) -> tuple[tuple, tuple]:
    return canonical((i, 1) for i in x.members), canonical((i, 2) for i in y.members)


def natural_join_oracle(a: Iterable[tuple], b: Iterable[tuple]) -> list[tuple]:
    """Nested-loop natural join on the key column, as a multiset (sorted list)."""
    return sorted((ka, va, vb) for (ka, va) in a for (kb, vb) in b if ka == kb)


# -- the sets tree family ------------------------------------------------------

@dataclass(frozen=True)
class SetsTreeInstance:
    n: int
    x: BitSet
    y: BitSet
    document: tuple
    split: int

    @property
    def prefix(self) -> tuple:
        return self.document[: self.split]

    @property
    def suffix(self) -> tuple:
        return self.document[self.split:]


def _leaf(bit: bool) -> str:
    return "<1/>" if bit else "<0/>"


def make_sets_tree(n: int, x: BitSet, y: BitSet) -> SetsTreeInstance:
    """Doc(T_n(X, Y)).

    Level i contributes ``<z><left><x_i/> ... </left><right><right><y_i/>
    </right></right></z>`` where ``z`` is "root" at level 1 and "left"
    below; the hole is the next level, and the innermost hole is the
    bachelor ``<left/>`` whose position is the split.
    """
    if n < 1:
        raise InstanceFormatError("n must be at least 1")
    if x.n != n or y.n != n:
        raise InstanceFormatError("X and Y must be subsets of 1..n")
    prefix: list[str] = []
    suffix: list[str] = []
    for i in range(1, n + 1):
        z = "root" if i == 1 else "left"
        prefix += [f"<{z}>", "<left>", _leaf(i in x.members)]
        suffix = ["</left>", "<right>", "<right>", _leaf(i in y.members), "</right>", "</right>", f"</{z}>"] + suffix
    prefix.append("<left/>")
    doc = tuple(prefix + suffix)
    assert len(doc) == 10 * n + 1
    return SetsTreeInstance(n, x, y, doc, split=len(prefix))


def sets_tree_x_indices(n: int) -> list[int]:
    """Document-order node index of x_1..x_n (opening and bachelor tags, 1-based)."""
    # each level opens z, left, then the x leaf: three nodes per level
    return [3 * i for i in range(1, n + 1)]


def sets_tree_oracle(instance: SetsTreeInstance) -> set[int]:
    xs = sets_tree_x_indices(instance.n)
    return {xs[i - 1] for i in instance.x.members & instance.y.members}


_NODE_TOKEN = re.compile(r"^<[^/][^>]*>$")


def node_indices(document: Sequence[str]) -> list[int]:
    """Positions (1-based, in tokens) of opening and bachelor tags."""
    return [p for p, tok in enumerate(document, 1) if _NODE_TOKEN.match(tok)]
