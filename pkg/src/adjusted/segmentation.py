"""Per-thread segment arrays for commuting-writer objects.

A segmentation is a growable array of segments, each owned by exactly one
writer thread.  Three routing policies cover the common compositions:

* ``BASE``    — threads map statically to segments; reads fold over all of
  them (or scan, for containers).
* ``HASH``    — items map to segments by a stable 64-bit hash; the segment
  count is fixed at construction so routing never changes.
* ``EXTENDED``— an item records the segment it was first inserted into, so
  later lookups from any thread go straight there, and a missing record is a
  definitive "never inserted".

The segment array is copy-on-write: growth publishes a fresh tuple whose
prefix aliases the existing segments, and readers snapshot the reference
once per operation, which keeps every read path wait-free.
"""

from __future__ import annotations

import hashlib
import os
import threading
from enum import Enum
from typing import Any, Callable, Iterable, TypeVar

Seg = TypeVar("Seg")

_UNSET = object()


class Policy(Enum):
    BASE = "base"
    HASH = "hash"
    EXTENDED = "extended"


def stable_hash(item) -> int:
    """Seedless 64-bit hash of an item's canonical encoding.

    Deterministic across processes and runs (unlike built-in ``hash`` for
    strings), so hash-routed layouts are reproducible in tests.
    """
    if isinstance(item, bytes):
        data = b"b" + item
    elif isinstance(item, str):
        data = b"s" + item.encode("utf-8")
    elif isinstance(item, bool):
        data = b"o1" if item else b"o0"
    elif isinstance(item, int):
        data = b"i%d" % item
    elif isinstance(item, tuple):
        data = b"(" + b",".join(b"%d:" % stable_hash(x) for x in item) + b")"
    else:
        raise TypeError("no stable encoding for %r" % (item,))
    return int.from_bytes(hashlib.blake2b(data, digest_size=8).digest(), "big")


class Segmentation:
    """An array of single-writer segments with a routing policy."""

    def __init__(
        self,
        make_segment: Callable[[], Seg],
        policy: Policy = Policy.BASE,
        segment_count: int | None = None,
    ):
        self._make_segment = make_segment
        self.policy = policy
        self._lock = threading.Lock()  # registration/growth only, never reads
        self._registry: dict[Any, int] = {}  # thread -> segment index
        self._owners: dict[int, Any] = {}  # segment index -> owning thread
        self._routes: dict[Any, int] = {}  # EXTENDED: item -> segment index
        if policy is Policy.HASH:
            count = segment_count or 2 * (os.cpu_count() or 1)
            self._array = tuple(make_segment() for _ in range(count))
        else:
            if segment_count is not None:
                raise ValueError(
                    "segment_count is fixed only under the HASH policy"
                )
            self._array = ()

    # -- snapshots -----------------------------------------------------------

    @property
    def segments(self) -> tuple:
        """Wait-free snapshot of the current segment array."""
        return self._array

    def __len__(self):
        return len(self._array)

    def owner_of(self, index: int):
        return self._owners.get(index)

    # -- write routing -------------------------------------------------------

    def segment_for_write(self, thread=None) -> Seg:
        """The calling thread's owned segment, created on first use."""
        if thread is None:
            thread = threading.get_ident()
        idx = self._registry.get(thread)
        if idx is None:
            idx = self.register(thread)
        return self._array[idx]

    def register(self, thread=None) -> int:
        """Assign the thread a segment index (idempotent)."""
        if thread is None:
            thread = threading.get_ident()
        with self._lock:
            idx = self._registry.get(thread)
            if idx is not None:
                return idx
            if self.policy is Policy.HASH:
                # hash routing spreads items, not threads; ownership of each
                # segment still goes to whoever registers for it first
                idx = len(self._registry) % len(self._array)
                self._registry[thread] = idx
                self._owners.setdefault(idx, thread)
                return idx
            idx = len(self._array)
            self._registry[thread] = idx
            self._owners[idx] = thread
            # copy-on-write growth: readers hold either array, both valid
            self._array = self._array + (self._make_segment(),)
            return idx

    def writer_index(self, thread=None) -> int:
        if thread is None:
            thread = threading.get_ident()
        idx = self._registry.get(thread)
        if idx is None:
            raise KeyError("thread %r holds no segment" % (thread,))
        return idx

    def assert_writer(self, index: int, thread=None) -> None:
        """Debug guard for the one-writer-per-segment contract."""
        if thread is None:
            thread = threading.get_ident()
        owner = self._owners.setdefault(index, thread)
        assert owner == thread, (
            "segment %d is owned by %r; write attempted by %r"
            % (index, owner, thread)
        )

    # -- item routing --------------------------------------------------------

    def segment_for_item(self, item) -> int | None:
        """Routing index for an item, or None when EXTENDED never saw it."""
        if self.policy is Policy.HASH:
            return stable_hash(item) % len(self._array)
        if self.policy is Policy.EXTENDED:
            return self._routes.get(item)
        raise ValueError("the %s policy routes by thread, not by item"
                         % self.policy.name)

    def route_write(self, item, thread=None) -> int:
        """Segment index an insert of *item* must target.

        Under EXTENDED the first insert records the inserter's own segment
        and every later write of the same item lands there too (which is
        exactly the commuting-writer obligation: one writer per item).
        """
        if self.policy is Policy.HASH:
            return stable_hash(item) % len(self._array)
        if self.policy is Policy.EXTENDED:
            if thread is None:
                thread = threading.get_ident()
            mine = self._registry.get(thread)
            if mine is None:
                mine = self.register(thread)
            # first-wins publication of the item's permanent route
            return self._routes.setdefault(item, mine)
        return self.writer_index(thread)


def segment_for_write(seg: Segmentation, thread=None) -> Seg:
    return seg.segment_for_write(thread)


def segment_for_item(seg: Segmentation, item) -> int | None:
    return seg.segment_for_item(item)


def fold_read(
    seg: Segmentation,
    combine: Callable[[Any, Any], Any],
    read: Callable[[Seg], Any] | None = None,
    initial: Any = _UNSET,
):
    """Combine a coherent read of every segment in one array snapshot.

    ``read`` extracts a per-segment summary (defaults to the segment
    itself); ``combine`` must be associative and commutative.  An empty
    segmentation yields ``initial`` — required then, since the fold cannot
    invent combine's identity.

    For unit-increment counter cells the result is linearizable; in general
    it lies between the object's logical value at the call's start and end.
    """
    snapshot = seg.segments
    values: Iterable = snapshot if read is None else [read(s) for s in snapshot]
    values = list(values)
    if not values:
        if initial is _UNSET:
            raise ValueError("empty segmentation needs an explicit initial value")
        return initial
    acc = values[0] if initial is _UNSET else combine(initial, values[0])
    for v in values[1:]:
        acc = combine(acc, v)
    return acc
