"""Segmented maps for writers that touch disjoint keys.

Workloads that shard their key space across writer threads (one owner per
key) never need the writer-side synchronization of a general concurrent
map.  Each writer gets a private single-writer map as its segment; a key
permanently records the segment of its first insert, so any reader —
and any later write, which the contract says must come from the same
owner — goes straight to the right segment with no scan and no lock.

Cross-thread key disjointness is the caller's obligation; debug runs
assert it by checking segment ownership on every mutation.
"""

from __future__ import annotations

import threading

from ..seqspec import BOTTOM
from ..segmentation import Policy, Segmentation
from .hashmap import SwmrHashMap
from .skiplist import SwmrSkipListMap


class ExtendedSegmentedMap:
    """One single-writer map per writer thread, routed by key history."""

    def __init__(self, make_segment):
        self._seg = Segmentation(make_segment, Policy.EXTENDED)

    def register_writer(self, thread=None) -> int:
        return self._seg.register(thread)

    def put(self, key, value, thread=None):
        if thread is None:
            thread = threading.get_ident()
        idx = self._seg.route_write(key, thread)
        if __debug__:
            self._seg.assert_writer(idx, thread)
        return self._seg.segments[idx].put(key, value, thread=thread)

    def remove(self, key, thread=None):
        idx = self._seg.segment_for_item(key)
        if idx is None:
            return BOTTOM  # never inserted anywhere: nothing to do
        if thread is None:
            thread = threading.get_ident()
        if __debug__:
            self._seg.assert_writer(idx, thread)
        return self._seg.segments[idx].remove(key, thread=thread)

    def get(self, key):
        idx = self._seg.segment_for_item(key)
        if idx is None:
            # the route table records every insert ever made, so a miss is
            # a definitive absent — no segment scan needed
            return BOTTOM
        return self._seg.segments[idx].get(key)

    def contains(self, key) -> bool:
        return self.get(key) is not BOTTOM

    def __len__(self):
        return sum(len(s) for s in self._seg.segments)

    def items(self):
        for segment in self._seg.segments:
            yield from segment.items()


class ExtendedSegmentedHashMap(ExtendedSegmentedMap):
    def __init__(self, initial_capacity: int | None = None,
                 sc_escalation: bool = False):
        super().__init__(
            lambda: SwmrHashMap(initial_capacity=initial_capacity,
                                sc_escalation=sc_escalation)
        )


class ExtendedSegmentedSkipListMap(ExtendedSegmentedMap):
    def __init__(self, seed=None, sc_escalation: bool = False):
        self._next_seed = [seed]

        def make_segment():
            s = self._next_seed[0]
            if s is not None:
                self._next_seed[0] = s + 1
            return SwmrSkipListMap(seed=s, sc_escalation=sc_escalation)

        super().__init__(make_segment)
