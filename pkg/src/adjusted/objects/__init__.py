"""Concurrent objects specialized to restricted usage, plus baselines.

Each adjusted object is the counterpart of a general-purpose structure
under a narrower usage contract (blind increments, one consumer, one
writer, key-disjoint writers).  Baselines implement the unrestricted
contract with full synchronization so benchmarks can compare like for
like.  ``make_object`` builds either kind from a string id and a small
configuration record.
"""

from __future__ import annotations

from dataclasses import dataclass

from .counter import IncrementOnlyCounter
from .hashmap import SwmrHashMap
from .locked import CasCounter, LockedMap, MpmcQueue, ScReference, ShardedLockedMap
from .queue import MpscQueue
from .reference import WriteOnceReference
from .segmented import (
    ExtendedSegmentedHashMap,
    ExtendedSegmentedMap,
    ExtendedSegmentedSkipListMap,
)
from .skiplist import SwmrSkipListMap


@dataclass
class ObjectConfig:
    """Construction-time knobs shared by all object families."""

    initial_capacity: int | None = None
    seed: int | None = None
    sc_escalation: bool = False
    shards: int = 16


def _counter_adjusted(cfg):
    return IncrementOnlyCounter(sc_escalation=cfg.sc_escalation)


def _counter_baseline(cfg):
    return CasCounter()


def _reference_adjusted(cfg):
    return WriteOnceReference()


def _reference_baseline(cfg):
    return ScReference()


def _queue_adjusted(cfg):
    return MpscQueue(sc_escalation=cfg.sc_escalation)


def _queue_baseline(cfg):
    return MpmcQueue()


def _hashmap_swmr(cfg):
    return SwmrHashMap(initial_capacity=cfg.initial_capacity,
                       sc_escalation=cfg.sc_escalation)


def _hashmap_segmented(cfg):
    return ExtendedSegmentedHashMap(initial_capacity=cfg.initial_capacity,
                                    sc_escalation=cfg.sc_escalation)


def _skiplist_swmr(cfg):
    return SwmrSkipListMap(seed=cfg.seed, sc_escalation=cfg.sc_escalation)


def _skiplist_segmented(cfg):
    return ExtendedSegmentedSkipListMap(seed=cfg.seed,
                                        sc_escalation=cfg.sc_escalation)


def _map_baseline(cfg):
    return LockedMap(initial_capacity=cfg.initial_capacity)


def _map_sharded(cfg):
    return ShardedLockedMap(shards=cfg.shards,
                            initial_capacity=cfg.initial_capacity)


OBJECT_BUILDERS = {
    "counter.adjusted": _counter_adjusted,
    "counter.baseline": _counter_baseline,
    "reference.adjusted": _reference_adjusted,
    "reference.baseline": _reference_baseline,
    "queue.adjusted": _queue_adjusted,
    "queue.baseline": _queue_baseline,
    "hashmap.swmr": _hashmap_swmr,
    "hashmap.segmented": _hashmap_segmented,
    "hashmap.baseline": _map_baseline,
    "hashmap.sharded": _map_sharded,
    "skiplist.swmr": _skiplist_swmr,
    "skiplist.segmented": _skiplist_segmented,
    "skiplist.baseline": _map_baseline,
}


def object_ids() -> list:
    return sorted(OBJECT_BUILDERS)


def make_object(object_id: str, config: ObjectConfig | None = None):
    """Build an object by id, e.g. ``make_object("counter.adjusted")``."""
    try:
        builder = OBJECT_BUILDERS[object_id]
    except KeyError:
        raise ValueError(
            "unknown object id %r (choose from %s)"
            % (object_id, ", ".join(object_ids()))
        ) from None
    return builder(config or ObjectConfig())


__all__ = [
    "CasCounter",
    "ExtendedSegmentedHashMap",
    "ExtendedSegmentedMap",
    "ExtendedSegmentedSkipListMap",
    "IncrementOnlyCounter",
    "LockedMap",
    "MpmcQueue",
    "MpscQueue",
    "ObjectConfig",
    "ScReference",
    "ShardedLockedMap",
    "SwmrHashMap",
    "SwmrSkipListMap",
    "WriteOnceReference",
    "make_object",
    "object_ids",
]
