"""Write-once reference cells.

A reference whose writers only ever attempt the first assignment can be
collapsed to a single publication race: exactly one ``set`` wins, the
losing calls observe that the slot was already taken, and once any reader
has seen the value it can cache it forever because the slot never changes
again.
"""

from __future__ import annotations

from ..seqspec import BOTTOM


class _Token:
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value


class WriteOnceReference:
    """One shared publication slot plus a per-handle immutable cache.

    set(v) returns True for exactly one caller — the unique transition out
    of the empty state — and False for every later or losing attempt, which
    doubles as the "already set" signal.  Each thread should hold its own
    handle (via clone()); get() first consults the handle's plain-read
    cache and only touches the shared slot until the first hit.
    """

    def __init__(self, _slot: dict | None = None):
        self._slot = {} if _slot is None else _slot
        self._cached = BOTTOM

    def clone(self) -> "WriteOnceReference":
        """A new handle on the same slot (cache state carries over)."""
        twin = WriteOnceReference(self._slot)
        twin._cached = self._cached
        return twin

    def set(self, value) -> bool:
        # A fresh token makes the winner decidable by identity even when
        # two threads race to publish equal values.
        token = _Token(value)
        return self._slot.setdefault(0, token) is token

    def get(self):
        cached = self._cached
        if cached is not BOTTOM:
            return cached
        token = self._slot.get(0)
        if token is None:
            return BOTTOM
        self._cached = token.value
        return token.value
