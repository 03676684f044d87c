"""Read/update microbenchmark over the shipped objects.

One run builds a fresh object, pre-fills it, and drives it from real
threads that each execute batches of randomized operations.  Two modes:

* duration mode — per-thread warmup, then a timed window; only windowed
  operations are counted (the warmup-exclusion contract);
* count mode (``ops_per_thread``) — exactly that many operations per
  thread, timed; with one thread and a fixed seed the entire operation
  sequence is reproducible.

Update operations split evenly between inserts and removes for maps, keys
are uniform over the key range, and key-disjoint (segmented) maps route
every key to a fixed owner thread so the commuting-writer contract holds
by construction.
"""

from __future__ import annotations

import os
import random
import threading
import time
from dataclasses import asdict, dataclass

from ..objects import ObjectConfig, make_object, object_ids
from .report import BenchReport, ThreadSample

_SEGMENTED = ("hashmap.segmented", "skiplist.segmented")
_SWMR = ("hashmap.swmr", "skiplist.swmr")
_MAPS = _SEGMENTED + _SWMR + ("hashmap.baseline", "hashmap.sharded",
                              "skiplist.baseline")


@dataclass
class MicroConfig:
    object_id: str
    threads: int = 1
    update_ratio: int = 50  # percent of operations that mutate
    key_range: int = 1024
    initial_size: int = 0
    duration: float = 5.0
    warmup: float = 2.0
    runs: int = 5
    batch: int = 1000
    seed: int | None = None
    ops_per_thread: int | None = None  # count mode when set
    pin_threads: bool = False

    def validate(self) -> None:
        if self.object_id not in object_ids():
            raise ValueError("unknown object id %r" % (self.object_id,))
        if self.threads < 1:
            raise ValueError("threads must be positive")
        if not 0 <= self.update_ratio <= 100:
            raise ValueError("update_ratio is a percentage (0..100)")
        if self.key_range < 1:
            raise ValueError("key_range must be positive")
        if not 0 <= self.initial_size <= self.key_range:
            raise ValueError("initial_size must be within the key range")
        if self.duration <= 0 and self.ops_per_thread is None:
            raise ValueError("duration must be positive in duration mode")
        if self.warmup < 0 or self.runs < 1 or self.batch < 1:
            raise ValueError("warmup/runs/batch out of range")
        if self.ops_per_thread is not None and self.ops_per_thread < 1:
            raise ValueError("ops_per_thread must be positive")


def _derive_seed(seed, run, thread) -> int:
    base = seed if seed is not None else time.monotonic_ns() & 0xFFFFFFFF
    return (base * 1_000_003 + run * 1031 + thread * 7) & 0x7FFFFFFF


def _prefill(obj, cfg: MicroConfig) -> None:
    if cfg.object_id in _MAPS:
        for k in range(cfg.initial_size):
            owner = k % cfg.threads if cfg.object_id in _SEGMENTED else 0
            obj.put(k, k, thread=owner)
    elif cfg.object_id.startswith("queue"):
        for k in range(cfg.initial_size):
            obj.offer(k)
    elif cfg.object_id.startswith("reference"):
        obj.set(1)  # initialized once; workers then measure steady-state reads
    # counters have no meaningful pre-fill


def _op_runner(obj, cfg: MicroConfig, worker: int):
    """Returns (fn, mix_key_fn): one randomized operation per call."""
    object_id = cfg.object_id
    if object_id.startswith("counter"):
        def run_op(rng, mix):
            if rng.randrange(100) < cfg.update_ratio:
                obj.inc(1, thread=worker)
                mix["update"] += 1
            else:
                obj.read()
                mix["read"] += 1
        return run_op
    if object_id.startswith("reference"):
        # read workload on a per-thread handle; update_ratio does not apply
        # (a second set can only be refused, which would measure nothing)
        handle = obj.clone() if hasattr(obj, "clone") else obj

        def run_op(rng, mix):
            handle.get()
            mix["read"] += 1
        return run_op
    if object_id.startswith("queue"):
        # worker 0 is the one consumer; the rest produce or scan
        if worker == 0:
            def run_op(rng, mix):
                obj.poll(thread=worker)
                mix["update"] += 1
        else:
            def run_op(rng, mix):
                if rng.randrange(100) < cfg.update_ratio:
                    obj.offer(rng.randrange(cfg.key_range))
                    mix["update"] += 1
                else:
                    obj.contains(rng.randrange(cfg.key_range))
                    mix["read"] += 1
        return run_op
    # maps
    segmented = object_id in _SEGMENTED
    swmr_reader = object_id in _SWMR and worker != 0

    def draw_key(rng):
        if segmented:
            span = (cfg.key_range - worker + cfg.threads - 1) // cfg.threads
            return worker + cfg.threads * rng.randrange(max(span, 1))
        return rng.randrange(cfg.key_range)

    def run_op(rng, mix):
        k = draw_key(rng)
        if not swmr_reader and rng.randrange(100) < cfg.update_ratio:
            # updates split evenly between insert and remove
            if rng.randrange(2):
                obj.put(k, k, thread=worker)
            else:
                obj.remove(k, thread=worker)
            mix["update"] += 1
        else:
            obj.get(k)
            mix["read"] += 1
    return run_op


def _pin(worker: int) -> None:
    try:
        cpus = os.cpu_count() or 1
        os.sched_setaffinity(0, {worker % cpus})
    except (AttributeError, OSError):
        pass  # pinning is best effort


def micro_run(cfg: MicroConfig, on_finish=None) -> BenchReport:
    cfg.validate()
    samples: list[ThreadSample] = []
    mix_total: dict[str, int] = {"update": 0, "read": 0}
    for run in range(cfg.runs):
        obj = make_object(
            cfg.object_id,
            ObjectConfig(initial_capacity=cfg.initial_size or None,
                         seed=cfg.seed),
        )
        _prefill(obj, cfg)
        barrier = threading.Barrier(cfg.threads)
        results: list = [None] * cfg.threads
        errors: list = []

        def work(worker: int):
            try:
                if cfg.pin_threads:
                    _pin(worker)
                rng = random.Random(_derive_seed(cfg.seed, run, worker))
                run_op = _op_runner(obj, cfg, worker)
                mix: dict[str, int] = {"update": 0, "read": 0}
                barrier.wait()
                if cfg.ops_per_thread is not None:
                    t0 = time.perf_counter()
                    for _ in range(cfg.ops_per_thread):
                        run_op(rng, mix)
                    seconds = time.perf_counter() - t0
                    results[worker] = (cfg.ops_per_thread, seconds, mix)
                    return
                clock = time.perf_counter
                warm_end = clock() + cfg.warmup
                while clock() < warm_end:
                    for _ in range(cfg.batch):
                        run_op(rng, mix)
                mix = {"update": 0, "read": 0}  # warmup ops are excluded
                ops = 0
                t0 = clock()
                run_end = t0 + cfg.duration
                while clock() < run_end:
                    for _ in range(cfg.batch):
                        run_op(rng, mix)
                    ops += cfg.batch
                seconds = clock() - t0
                results[worker] = (ops, seconds, mix)
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
        for worker, (ops, seconds, mix) in enumerate(results):
            samples.append(ThreadSample(run, worker, ops, seconds))
            for k, v in mix.items():
                mix_total[k] = mix_total.get(k, 0) + v
        if on_finish is not None:
            on_finish(run, obj)
    return BenchReport(cfg.object_id, asdict(cfg), samples, mix_total)
