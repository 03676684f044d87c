"""Counters specialized to commuting writers.

``IncrementOnlyCounter`` drops the universal fetch-add a general counter
needs: every writer thread increments its own segment cell with plain
stores, and ``read`` folds a snapshot of all cells.  That is exactly the
concurrent counter whose add/add pairs commute and whose readers tolerate
an in-window value, so the relaxation is behavior-preserving for blind
increments plus reads.
"""

from __future__ import annotations

import threading

from ..segmentation import Segmentation, fold_read


class _Cell:
    __slots__ = ("value",)

    def __init__(self):
        self.value = 0


class IncrementOnlyCounter:
    """Per-writer segment cells; reads fold over one array snapshot.

    inc() is wait-free for a registered writer (one plain load + store on a
    cell nobody else writes).  read() returns a value between the counter's
    total at the call's start and at its end, and successive reads by one
    thread are monotone because cells only grow and the segment array is
    copy-on-write with aliased prefixes.
    """

    def __init__(self, sc_escalation: bool = False):
        self._seg = Segmentation(_Cell)
        self._guard = threading.Lock() if sc_escalation else None

    def inc(self, delta: int = 1, thread=None) -> None:
        if delta < 0:
            raise ValueError("increment-only counter cannot add %d" % delta)
        cell = self._seg.segment_for_write(thread)
        if __debug__:
            self._seg.assert_writer(
                self._seg.writer_index(thread), thread
            )
        if self._guard is not None:
            with self._guard:
                cell.value += delta
        else:
            cell.value += delta

    def read(self) -> int:
        return fold_read(
            self._seg, lambda a, b: a + b, read=lambda c: c.value, initial=0
        )
