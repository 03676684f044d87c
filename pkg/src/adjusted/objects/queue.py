"""Multi-producer single-consumer queue.

Restricting a queue to one consumer removes the head CAS entirely: the
consumer advances the head pointer with plain stores because nobody races
it.  Producers still contend on the tail, where a one-slot publication
per node
keeps appends atomic.  ``contains`` stays a best-effort scan of the
current chain, mirroring what general-purpose concurrent queues offer.
"""

from __future__ import annotations

import threading

from ..seqspec import BOTTOM

_CONSUMED = object()


class _Node:
    __slots__ = ("value", "link")

    def __init__(self, value):
        self.value = value
        self.link: dict = {}  # one-slot successor; setdefault is the CAS


class MpscQueue:
    """Linked queue with CAS appends and a consumer-owned head.

    offer(v) is lock-free for any producer.  poll() must only ever be
    called from one thread (asserted in debug runs); it needs no atomic
    instruction at all.  contains(v) walks a snapshot of the chain and can
    miss elements moved concurrently — the same weak contract as poll-free
    scans on industrial queues.
    """

    def __init__(self, sc_escalation: bool = False):
        dummy = _Node(_CONSUMED)
        self._head = dummy  # consumer-written; contains() snapshots it
        self._tail = dummy  # shared hint, may lag the true tail
        self._consumer = None
        self._guard = threading.Lock() if sc_escalation else None

    def offer(self, value) -> None:
        node = _Node(value)
        if self._guard is not None:
            with self._guard:
                self._offer(node)
        else:
            self._offer(node)

    def _offer(self, node):
        while True:
            tail = self._tail
            nxt = tail.link.get(0)
            if nxt is not None:
                # another producer already appended; help the hint along
                self._tail = nxt
                continue
            if tail.link.setdefault(0, node) is node:
                self._tail = node
                return

    def poll(self, thread=None):
        if __debug__:
            me = threading.get_ident() if thread is None else thread
            owner = self._consumer
            if owner is None:
                self._consumer = owner = me
            assert owner == me, "poll() from %r but consumer is %r" % (me, owner)
        head = self._head
        first = head.link.get(0)
        if first is None:
            return BOTTOM
        value = first.value
        self._head = first
        first.value = _CONSUMED  # the new dummy; hides it from contains
        return value

    def contains(self, value) -> bool:
        node = self._head
        while node is not None:
            v = node.value
            if v is not _CONSUMED and v == value:
                return True
            node = node.link.get(0)
        return False

    def drain(self) -> list:
        """Consumer-only helper: poll until empty."""
        out = []
        while True:
            v = self.poll()
            if v is BOTTOM:
                return out
            out.append(v)
