"""Single-writer multi-reader skip-list map.

The writer pre-links a new tower's successors before revealing the node,
then publishes predecessor links top level first and the bottom level —
the level that defines membership — last.  Readers navigate by key order
and only ever decide presence on the bottom level, so a half-published
tower is at worst an unused shortcut.
"""

from __future__ import annotations

import random
import threading

from ..seqspec import BOTTOM

MAX_LEVEL = 16
_P = 0.5


class _Node:
    __slots__ = ("key", "value", "nxt")

    def __init__(self, key, value, height):
        self.key = key
        self.value = value
        self.nxt: list = [None] * height

    @property
    def height(self):
        return len(self.nxt)


class SwmrSkipListMap:
    """Ordered map; one writer, any number of wait-free readers.

    Towers are sampled with coin probability 0.5 up to 16 levels from a
    seedable generator, so layouts are reproducible in tests.  Membership
    changes happen exactly at the bottom-level splice; upper links are
    hints that may briefly lead to a node that is not yet (or no longer)
    a member, which readers tolerate by always finishing on level 0.
    """

    def __init__(self, seed=None, sc_escalation: bool = False):
        self._rng = random.Random(seed)
        self._head = _Node(None, None, MAX_LEVEL)
        self._count = 0
        self._writer = None
        self._guard = threading.Lock() if sc_escalation else None

    def _check_writer(self, thread=None):
        if __debug__:
            me = threading.get_ident() if thread is None else thread
            if self._writer is None:
                self._writer = me
            assert self._writer == me, (
                "mutation from %r but the writer is %r" % (me, self._writer)
            )

    def _sample_height(self) -> int:
        h = 1
        while h < MAX_LEVEL and self._rng.random() < _P:
            h += 1
        return h

    def _predecessors(self, key):
        preds = [self._head] * MAX_LEVEL
        node = self._head
        for level in range(MAX_LEVEL - 1, -1, -1):
            nxt = node.nxt[level]
            while nxt is not None and nxt.key < key:
                node = nxt
                nxt = node.nxt[level]
            preds[level] = node
        return preds

    # -- writer side ---------------------------------------------------------

    def put(self, key, value, thread=None):
        self._check_writer(thread)
        if self._guard is not None:
            with self._guard:
                return self._put(key, value)
        return self._put(key, value)

    def _put(self, key, value):
        preds = self._predecessors(key)
        hit = preds[0].nxt[0]
        if hit is not None and hit.key == key:
            old = hit.value
            hit.value = value
            return old
        height = self._sample_height()
        node = _Node(key, value, height)
        for level in range(height):
            node.nxt[level] = preds[level].nxt[level]
        # reveal the tower top-down; the bottom splice makes it a member
        for level in range(height - 1, -1, -1):
            preds[level].nxt[level] = node
        self._count += 1
        return BOTTOM

    def remove(self, key, thread=None):
        self._check_writer(thread)
        if self._guard is not None:
            with self._guard:
                return self._remove(key)
        return self._remove(key)

    def _remove(self, key):
        preds = self._predecessors(key)
        hit = preds[0].nxt[0]
        if hit is None or hit.key != key:
            return BOTTOM
        # retire shortcuts first; the bottom unlink removes membership
        for level in range(hit.height - 1, -1, -1):
            if preds[level].nxt[level] is hit:
                preds[level].nxt[level] = hit.nxt[level]
        self._count -= 1
        return hit.value

    # -- reader side ---------------------------------------------------------

    def get(self, key):
        node = self._head
        for level in range(MAX_LEVEL - 1, -1, -1):
            nxt = node.nxt[level]
            while nxt is not None and nxt.key < key:
                node = nxt
                nxt = node.nxt[level]
        hit = node.nxt[0]
        if hit is not None and hit.key == key:
            return hit.value
        return BOTTOM

    def contains(self, key) -> bool:
        return self.get(key) is not BOTTOM

    def __len__(self):
        return self._count

    def items(self):
        """Bottom-level walk: ascending key order."""
        node = self._head.nxt[0]
        while node is not None:
            yield node.key, node.value
            node = node.nxt[0]
