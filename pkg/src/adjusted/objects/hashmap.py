"""Single-writer multi-reader chained hash map.

With one writer, every mutation is a single publication: prepend a fresh
entry, overwrite an entry's value slot, or splice one link.  Readers walk
a snapshot of the bin array and never see a torn chain, because resize
copies entries into brand-new nodes and publishes the new array last —
a reader mid-traversal keeps following the intact old chain.
"""

from __future__ import annotations

import threading

from ..seqspec import BOTTOM
from ..segmentation import stable_hash


class _Entry:
    __slots__ = ("key", "hsh", "value", "nxt")

    def __init__(self, key, hsh, value, nxt):
        self.key = key
        self.hsh = hsh
        self.value = value
        self.nxt = nxt


class SwmrHashMap:
    """Chained buckets, one writer thread, wait-free readers.

    The bin array starts at 16 and doubles when the load factor crosses
    0.75.  put returns the previous value (or the absent marker), remove
    returns what it removed, get/contains are safe from any thread at any
    time.  All writer calls must come from one thread; debug runs assert
    it.
    """

    INITIAL_BINS = 16
    LOAD_FACTOR = 0.75

    def __init__(self, initial_capacity: int | None = None,
                 sc_escalation: bool = False):
        bins = self.INITIAL_BINS
        if initial_capacity is not None:
            while bins * self.LOAD_FACTOR < initial_capacity:
                bins *= 2
        self._table: list = [None] * bins
        self._count = 0
        self._writer = None
        self._guard = threading.Lock() if sc_escalation else None

    # -- writer side ---------------------------------------------------------

    def _check_writer(self, thread=None):
        if __debug__:
            me = threading.get_ident() if thread is None else thread
            if self._writer is None:
                self._writer = me
            assert self._writer == me, (
                "mutation from %r but the writer is %r" % (me, self._writer)
            )

    def put(self, key, value, thread=None):
        self._check_writer(thread)
        if self._guard is not None:
            with self._guard:
                return self._put(key, value)
        return self._put(key, value)

    def _put(self, key, value):
        hsh = stable_hash(key)
        table = self._table
        idx = hsh % len(table)
        entry = table[idx]
        while entry is not None:
            if entry.hsh == hsh and entry.key == key:
                old = entry.value
                entry.value = value  # in-place overwrite, single store
                return old
            entry = entry.nxt
        table[idx] = _Entry(key, hsh, value, table[idx])
        self._count += 1
        if self._count > len(table) * self.LOAD_FACTOR:
            self._grow(table)
        return BOTTOM

    def _grow(self, old_table):
        new_table: list = [None] * (len(old_table) * 2)
        for head in old_table:
            entry = head
            while entry is not None:
                idx = entry.hsh % len(new_table)
                # fresh nodes: readers on the old chains stay undisturbed
                new_table[idx] = _Entry(entry.key, entry.hsh, entry.value,
                                        new_table[idx])
                entry = entry.nxt
        self._table = new_table

    def remove(self, key, thread=None):
        self._check_writer(thread)
        if self._guard is not None:
            with self._guard:
                return self._remove(key)
        return self._remove(key)

    def _remove(self, key):
        hsh = stable_hash(key)
        table = self._table
        idx = hsh % len(table)
        prev = None
        entry = table[idx]
        while entry is not None:
            if entry.hsh == hsh and entry.key == key:
                if prev is None:
                    table[idx] = entry.nxt
                else:
                    prev.nxt = entry.nxt  # one splice; entry keeps its nxt
                self._count -= 1
                return entry.value
            prev, entry = entry, entry.nxt
        return BOTTOM

    # -- reader side ---------------------------------------------------------

    def get(self, key):
        hsh = stable_hash(key)
        table = self._table  # one snapshot per call
        entry = table[hsh % len(table)]
        while entry is not None:
            if entry.hsh == hsh and entry.key == key:
                return entry.value
            entry = entry.nxt
        return BOTTOM

    def contains(self, key) -> bool:
        return self.get(key) is not BOTTOM

    def __len__(self):
        return self._count

    def items(self):
        """Point-in-time-ish iteration; safe against the single writer."""
        table = self._table
        for head in table:
            entry = head
            while entry is not None:
                yield entry.key, entry.value
                entry = entry.nxt
