"""Natural join by sorting a virtually expanded tape.

Every A-tuple is presented once per B-tuple, tagged with the B-index it is
paired with; every B-tuple carries its own index. Sorting on
(key, B-index, relation) with B before A puts each B-record directly in front
of the A-records it joins with, so one register ``tup`` holding the last
B-record is enough to emit the join during sorted output.
"""
from __future__ import annotations

from ..meter import DONE, RIGHT, Action
from .keysort import REL_A, SorterSpec, _ScanEngine, _SelectionSorter


class VirtualExpandedTape(_ScanEngine):
    """Traverses the virtual sequence A' followed by B' and emits it.

    Emits ``(key, I_B, rel, value)`` per virtual record. The expansion lives
    entirely in the registers ``sizeB``, ``currentBidx`` and ``iteratorA``,
    exactly as the sorter sees it; this program only exposes it.
    """

    join = True

    def __init__(self, direction: int = RIGHT) -> None:
        super().__init__()
        self.direction = direction
        self.name = "virtual-expanded-tape"
        self.start = "count:key:A"

    def rewinds(self) -> bool:
        return self.direction == RIGHT

    def on_record(self, arena, sort_key: tuple, value: tuple) -> tuple:
        key, ib, rel, _ = sort_key
        return (("".join(key), ib, "A" if rel == REL_A else "B", "".join(value)),)

    def on_pass_end(self, arena, at_right: bool) -> Action:
        return Action(DONE)


class JoinViaSort(_SelectionSorter):
    """Emits ``(K, V_A, V_B)`` for every pair of A- and B-tuples sharing K."""

    join = True

    def __init__(self, spec: SorterSpec) -> None:
        super().__init__(spec)
        self.name = f"join-via-sort(b={spec.buffer_tuples})"
        self.start = "count:key:A"

    def extra_registers(self) -> list:
        return super().extra_registers() + ["tupK", "tupIB", "tupV"]

    def emit_sorted(self, arena, held: list) -> tuple:
        out = []
        for (key, ib, rel, _), value in held:
            if rel != REL_A:
                arena.put("tupK", key)
                arena.put_int("tupIB", ib)
                arena.put("tupV", value)
            elif arena.get("tupK") == key and arena.get_int("tupIB") == ib:
                out.append(("".join(key), "".join(value), "".join(arena.get("tupV"))))
        return tuple(out)


def join_via_sort(sorter=None) -> JoinViaSort:
    """Join program around a sorter. Accepts a SorterSpec, a KeySort or a buffer size."""
    if sorter is None:
        sorter = SorterSpec()
    elif isinstance(sorter, int):
        sorter = SorterSpec(sorter)
    elif not isinstance(sorter, SorterSpec):
        sorter = sorter.spec
    return JoinViaSort(sorter)


def join_scan_bound(spec: SorterSpec, records: int) -> int:
    """r_sorter(N^2) + 2: the sorter's bound on N^2 records plus the counting pass."""
    return spec.bound_scans(records * records) + 2
