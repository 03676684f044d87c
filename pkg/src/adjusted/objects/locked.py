"""Fully-general baseline implementations.

These accept every usage pattern the abstract types allow, paying for it
with synchronization on every operation.  In this runtime the hardware
fetch-add / compare-and-set of a native implementation is modeled by a
mutex acquisition, which is the honest analogue of "every call goes
through a sequentially consistent atomic".
"""

from __future__ import annotations

import threading
from collections import deque

from ..seqspec import BOTTOM
from ..segmentation import stable_hash


class CasCounter:
    """General counter: every inc is one contended atomic update."""

    def __init__(self):
        self._lock = threading.Lock()
        self._value = 0

    def inc(self, delta: int = 1, thread=None) -> None:
        with self._lock:
            self._value += delta

    def read(self) -> int:
        with self._lock:
            return self._value


class ScReference:
    """Write-once register with both sides fully synchronized."""

    def __init__(self):
        self._lock = threading.Lock()
        self._value = BOTTOM

    def set(self, value) -> bool:
        with self._lock:
            if self._value is BOTTOM:
                self._value = value
                return True
            return False

    def get(self):
        with self._lock:
            return self._value


class MpmcQueue:
    """General queue: head and tail both contended (mutex-modeled CAS)."""

    def __init__(self):
        self._lock = threading.Lock()
        self._items: deque = deque()

    def offer(self, value) -> None:
        with self._lock:
            self._items.append(value)

    def poll(self, thread=None):
        with self._lock:
            if not self._items:
                return BOTTOM
            return self._items.popleft()

    def contains(self, value) -> bool:
        with self._lock:
            return value in self._items

    def drain(self) -> list:
        with self._lock:
            out = list(self._items)
            self._items.clear()
            return out


class LockedMap:
    """dict under a single mutex: the any-usage reference map."""

    def __init__(self, initial_capacity: int | None = None):
        self._lock = threading.Lock()
        self._data: dict = {}

    def put(self, key, value, thread=None):
        with self._lock:
            old = self._data.get(key, BOTTOM)
            self._data[key] = value
            return old

    def remove(self, key, thread=None):
        with self._lock:
            return self._data.pop(key, BOTTOM)

    def get(self, key):
        with self._lock:
            return self._data.get(key, BOTTOM)

    def contains(self, key) -> bool:
        with self._lock:
            return key in self._data

    def __len__(self):
        with self._lock:
            return len(self._data)

    def items(self):
        with self._lock:
            return list(self._data.items())


class ShardedLockedMap:
    """Lock striping: general usage, contention split across shards."""

    def __init__(self, shards: int = 16, initial_capacity: int | None = None):
        self._shards = tuple(LockedMap() for _ in range(shards))

    def _shard(self, key) -> LockedMap:
        return self._shards[stable_hash(key) % len(self._shards)]

    def put(self, key, value, thread=None):
        return self._shard(key).put(key, value)

    def remove(self, key, thread=None):
        return self._shard(key).remove(key)

    def get(self, key):
        return self._shard(key).get(key)

    def contains(self, key) -> bool:
        return self._shard(key).contains(key)

    def __len__(self):
        return sum(len(s) for s in self._shards)

    def items(self):
        for shard in self._shards:
            yield from shard.items()
