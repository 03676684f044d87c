"""A Retwis-style social-network workload over the shipped objects.

Users are partitioned across worker threads by a stable hash; a user's
profile, followee set, posts, timeline, and community membership are only
ever written by the owning thread, which is exactly the key-disjoint
usage the segmented maps are specialized to.  Cross-thread traffic goes
through two deliberately different channels: per-user timeline inboxes
(multi-producer, single-consumer queues drained by the owner) and the
reverse follower sets (inherently multi-writer, kept under one lock in
every variant).

Variants swap the storage layer only:

* ``adjusted`` — segmented single-writer maps + MPSC inboxes;
* ``dap``      — sharded locked maps + locked inboxes (data-access
  parallelism without usage restrictions);
* ``baseline`` — single-lock maps + locked inboxes.

A follow updates the follower's own followee set (the measured call) and
applies the converse follower-set edit immediately, unmeasured.
"""

from __future__ import annotations

import bisect
import itertools
import random
import threading
import time
from dataclasses import asdict, dataclass, field

from ..segmentation import stable_hash
from ..seqspec import BOTTOM
from ..objects import (
    ExtendedSegmentedHashMap,
    LockedMap,
    MpmcQueue,
    MpscQueue,
    ShardedLockedMap,
)
from .micro import _pin
from .report import BenchReport, ThreadSample
from .social import build_social_graph
from .zipf import zipf_for_alpha

OP_NAMES = ("add_user", "follow_unfollow", "post", "timeline",
            "join_leave", "profile")

DEFAULT_MIX = {
    "add_user": 5,
    "follow_unfollow": 5,
    "post": 15,
    "timeline": 60,
    "join_leave": 5,
    "profile": 10,
}

VARIANTS = ("adjusted", "dap", "baseline")

_UID_BLOCK = 10_000_000  # per-thread private id space for new users


@dataclass
class RetwisConfig:
    users: int = 1000
    alpha: float = 0.6
    variant: str = "adjusted"
    threads: int = 1
    duration: float = 5.0
    warmup: float = 2.0
    runs: int = 5
    mix: dict = field(default_factory=lambda: dict(DEFAULT_MIX))
    timeline_cap: int = 50
    eager_fanout: int = 32
    seed: int | None = None
    ops_per_thread: int | None = None  # count mode when set
    pin_threads: bool = False

    def validate(self) -> None:
        if self.users < 2:
            raise ValueError("users must be at least 2")
        if not 0 < self.alpha <= 1:
            raise ValueError("alpha must be in (0, 1]")
        if self.variant not in VARIANTS:
            raise ValueError(
                "unknown variant %r (choose from %s)"
                % (self.variant, ", ".join(VARIANTS))
            )
        if self.threads < 1 or self.runs < 1:
            raise ValueError("threads/runs out of range")
        if sorted(self.mix) != sorted(OP_NAMES):
            raise ValueError("mix must weight exactly %s" % (OP_NAMES,))
        if sum(self.mix.values()) != 100:
            raise ValueError("mix percentages must sum to 100")
        if any(w < 0 for w in self.mix.values()):
            raise ValueError("mix weights must be non-negative")
        if self.timeline_cap < 1 or self.eager_fanout < 0:
            raise ValueError("timeline_cap/eager_fanout out of range")
        if self.duration <= 0 and self.ops_per_thread is None:
            raise ValueError("duration must be positive in duration mode")
        if self.ops_per_thread is not None and self.ops_per_thread < 1:
            raise ValueError("ops_per_thread must be positive")


def _make_map(variant: str):
    if variant == "adjusted":
        return ExtendedSegmentedHashMap()
    if variant == "dap":
        return ShardedLockedMap()
    return LockedMap()


def _make_inbox(variant: str):
    return MpscQueue() if variant == "adjusted" else MpmcQueue()


class RetwisStore:
    """All state for one run, pre-populated from a social graph."""

    def __init__(self, cfg: RetwisConfig, run: int):
        self.cfg = cfg
        self.variant = cfg.variant
        seed = None if cfg.seed is None else cfg.seed + 7919 * run
        graph = build_social_graph(cfg.users, cfg.alpha, seed)
        self.profiles = _make_map(cfg.variant)
        self.following = _make_map(cfg.variant)  # u -> frozenset
        self.posts = _make_map(cfg.variant)  # u -> tuple of (author, pid)
        self.timelines = _make_map(cfg.variant)  # u -> tuple, newest first
        self.community = _make_map(cfg.variant)  # membership marker
        self.followers: dict = {}  # u -> set; multi-writer, single lock
        self.followers_lock = threading.Lock()
        self.inboxes: dict = {}  # u -> queue; owner drains
        self.owned: dict[int, list[int]] = {w: [] for w in range(cfg.threads)}
        for u in range(cfg.users):
            w = self.owner(u)
            self.owned[w].append(u)
            self.profiles.put(u, ("user-%d" % u, run), thread=w)
            self.following.put(u, frozenset(graph.following[u]), thread=w)
            self.timelines.put(u, (), thread=w)
            self.posts.put(u, (), thread=w)
            self.followers[u] = set(graph.followers[u])
            self.inboxes[u] = _make_inbox(cfg.variant)

    def owner(self, user: int) -> int:
        return stable_hash(user) % self.cfg.threads

    # -- the six request kinds (worker w acts for a user it owns) ---------

    def add_user(self, w: int, uid: int) -> None:
        self.profiles.put(uid, ("user-%d" % uid, -1), thread=w)
        self.following.put(uid, frozenset(), thread=w)
        self.timelines.put(uid, (), thread=w)
        self.posts.put(uid, (), thread=w)
        self.followers[uid] = set()
        self.inboxes[uid] = _make_inbox(self.variant)
        self.owned[w].append(uid)

    def follow_unfollow(self, w: int, u: int, v: int) -> None:
        outs = self.following.get(u)
        if v in outs:
            self.following.put(u, outs - {v}, thread=w)
            with self.followers_lock:  # unmeasured converse, applied now
                self.followers[v].discard(u)
        else:
            self.following.put(u, outs | {v}, thread=w)
            with self.followers_lock:
                self.followers[v].add(u)

    def post(self, w: int, u: int, pid: int) -> None:
        mine = self.posts.get(u)
        self.posts.put(u, mine + ((u, pid),), thread=w)
        with self.followers_lock:
            fans = list(itertools.islice(self.followers[u],
                                         self.cfg.eager_fanout))
        for f in fans:
            self.inboxes[f].offer((u, pid))

    def timeline(self, w: int, u: int) -> tuple:
        inbox = self.inboxes[u]
        fresh = []
        while True:
            item = inbox.poll(thread=w) if self.variant == "adjusted" \
                else inbox.poll()
            if item is BOTTOM:
                break
            fresh.append(item)
        if fresh:
            fresh.reverse()  # newest first
            merged = tuple(fresh) + self.timelines.get(u)
            self.timelines.put(u, merged[: self.cfg.timeline_cap], thread=w)
        return self.timelines.get(u)

    def join_leave(self, w: int, u: int) -> None:
        if self.community.contains(u):
            self.community.remove(u, thread=w)
        else:
            self.community.put(u, True, thread=w)

    def profile(self, u: int):
        return self.profiles.get(u)

    # -- whole-store checks ------------------------------------------------

    def check_invariants(self) -> dict:
        """Quiesced consistency checks; returns what was counted."""
        profile_keys = {u for u, _ in self.profiles.items()}
        edges = 0
        for u, outs in self.following.items():
            for v in outs:
                assert u in self.followers[v], (
                    "follow edge %d->%d lost its converse" % (u, v)
                )
                edges += 1
        with self.followers_lock:
            back = sum(len(s) for s in self.followers.values())
            for v, fans in self.followers.items():
                for u in fans:
                    assert v in self.following.get(u), (
                        "converse %d->%d has no forward edge" % (u, v)
                    )
        assert back == edges
        members = [u for u, _ in self.community.items()]
        for u in members:
            assert u in profile_keys, "community member %d has no profile" % u
        timeline_entries = 0
        for u, line in self.timelines.items():
            for author, _pid in line:
                assert author in profile_keys, (
                    "timeline of %d cites unknown author %d" % (u, author)
                )
                timeline_entries += 1
        return {
            "profiles": len(profile_keys),
            "edges": edges,
            "community": len(members),
            "timeline_entries": timeline_entries,
        }

    def digest(self) -> int:
        """Order-insensitive fingerprint of the final state."""
        parts = [
            tuple(sorted(self.profiles.items())),
            tuple(sorted(self.following.items(),
                         key=lambda kv: kv[0])),
            tuple(sorted((u, tuple(sorted(s)))
                         for u, s in self.followers.items())),
            tuple(sorted(self.posts.items())),
            tuple(sorted(self.timelines.items())),
            tuple(sorted(u for u, _ in self.community.items())),
        ]
        return hash((
            parts[0],
            tuple((u, tuple(sorted(fs))) for u, fs in parts[1]),
            parts[2], parts[3], parts[4], parts[5],
        ))


def _derive_seed(seed, run, thread) -> int:
    base = seed if seed is not None else time.monotonic_ns() & 0xFFFFFFFF
    return (base * 1_000_003 + run * 6151 + thread * 13) & 0x7FFFFFFF


class _Worker:
    def __init__(self, store: RetwisStore, cfg: RetwisConfig, w: int, rng):
        self.store = store
        self.cfg = cfg
        self.w = w
        self.rng = rng
        self.mix_counts = {name: 0 for name in OP_NAMES}
        names = sorted(cfg.mix)
        self._names = names
        self._cum = list(itertools.accumulate(cfg.mix[n] for n in names))
        self._next_pid = itertools.count()
        self._next_uid = itertools.count(cfg.users + (w + 1) * _UID_BLOCK)
        self._popularity = zipf_for_alpha(cfg.users, cfg.alpha)

    def _pick_op(self) -> str:
        u = self.rng.random() * 100.0
        return self._names[bisect.bisect_right(self._cum, u)]

    def _actor(self) -> int:
        mine = self.store.owned[self.w]
        return mine[self.rng.randrange(len(mine))]

    def _target(self) -> int:
        # popularity-skewed: low user ids are the hot ones
        return self._popularity.sample(self.rng)

    def _fresh_uid(self) -> int:
        # walk a private id block until one hashes home
        for uid in self._next_uid:
            if self.store.owner(uid) == self.w:
                return uid

    def step(self) -> None:
        name = self._pick_op()
        store, w = self.store, self.w
        if name == "timeline":
            store.timeline(w, self._actor())
        elif name == "profile":
            store.profile(self._target())
        elif name == "post":
            pid = self.w + self.cfg.threads * next(self._next_pid)
            store.post(w, self._actor(), pid)
        elif name == "follow_unfollow":
            u = self._actor()
            v = self._target()
            if v != u:
                store.follow_unfollow(w, u, v)
        elif name == "join_leave":
            store.join_leave(w, self._actor())
        else:  # add_user
            store.add_user(w, self._fresh_uid())
        self.mix_counts[name] += 1


def retwis_run(cfg: RetwisConfig, on_finish=None) -> BenchReport:
    cfg.validate()
    samples: list[ThreadSample] = []
    mix_total = {name: 0 for name in OP_NAMES}
    for run in range(cfg.runs):
        store = RetwisStore(cfg, run)
        barrier = threading.Barrier(cfg.threads)
        results: list = [None] * cfg.threads
        errors: list = []

        def work(w: int):
            try:
                if cfg.pin_threads:
                    _pin(w)
                rng = random.Random(_derive_seed(cfg.seed, run, w))
                worker = _Worker(store, cfg, w, rng)
                barrier.wait()
                clock = time.perf_counter
                if cfg.ops_per_thread is not None:
                    t0 = clock()
                    for _ in range(cfg.ops_per_thread):
                        worker.step()
                    results[w] = (cfg.ops_per_thread, clock() - t0,
                                  worker.mix_counts)
                    return
                warm_end = clock() + cfg.warmup
                while clock() < warm_end:
                    for _ in range(200):
                        worker.step()
                worker.mix_counts = {name: 0 for name in OP_NAMES}
                ops = 0
                t0 = clock()
                run_end = t0 + cfg.duration
                while clock() < run_end:
                    for _ in range(200):
                        worker.step()
                    ops += 200
                results[w] = (ops, clock() - t0, worker.mix_counts)
            except BaseException as exc:
                errors.append(exc)
                raise

        threads = [
            threading.Thread(target=work, args=(w,)) for w in range(cfg.threads)
        ]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        if errors:
            raise errors[0]
        for w, (ops, seconds, counts) in enumerate(results):
            samples.append(ThreadSample(run, w, ops, seconds))
            for k, v in counts.items():
                mix_total[k] += v
        if on_finish is not None:
            on_finish(run, store)
    return BenchReport("retwis/%s" % cfg.variant, asdict(cfg), samples,
                       mix_total)
