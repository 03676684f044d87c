"""Recording and brute-force linearizability checking of small histories.

A :class:`History` is a timestamped trace of invoke/respond events from
real threads exercising one object.  :func:`check` searches for a witness
— a total order of the completed operations that respects real time and
replays correctly through a sequential behavior model — using the classic
branch-and-bound over next-linearizable candidates with memoization on
(state, linearized-set).  Verdicts are dual-checked: every witness found
is re-verified by an independent replay before being returned, and a
negative verdict carries the shortest response-prefix that already has no
witness.
"""

from __future__ import annotations

import itertools
import json
import threading
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable

from .seqspec import (
    BOTTOM,
    VOID,
    DataTypeSpec,
    OpInstance,
    OpTemplate,
    SpecError,
    apply,
    catalog,
    state_key,
)

DEFAULT_BOUND = 20


# -- events and histories ------------------------------------------------------


@dataclass(frozen=True)
class Event:
    ts: int
    thread: Any
    kind: str  # "invoke" | "respond"
    op: OpInstance
    resp: Any = None  # respond events only


@dataclass(frozen=True)
class OpRecord:
    """One operation assembled from its invoke (and maybe respond) event."""

    op: OpInstance
    thread: Any
    invoke_ts: int
    respond_ts: int | None = None
    resp: Any = None

    @property
    def completed(self) -> bool:
        return self.respond_ts is not None


@dataclass(frozen=True)
class History:
    object_id: str
    events: tuple[Event, ...]

    def validate(self) -> None:
        last_ts = 0
        open_op: dict[Any, OpInstance] = {}
        for ev in self.events:
            if ev.ts <= last_ts:
                raise SpecError(
                    "event timestamps must be strictly increasing (saw %d after %d)"
                    % (ev.ts, last_ts)
                )
            last_ts = ev.ts
            if ev.kind == "invoke":
                if ev.thread in open_op:
                    raise SpecError(
                        "thread %r invoked %s while %s is still open"
                        % (ev.thread, ev.op.display(),
                           open_op[ev.thread].display())
                    )
                open_op[ev.thread] = ev.op
            elif ev.kind == "respond":
                if open_op.get(ev.thread) != ev.op:
                    raise SpecError(
                        "thread %r responded to %s without a matching invoke"
                        % (ev.thread, ev.op.display())
                    )
                del open_op[ev.thread]
            else:
                raise SpecError("unknown event kind %r" % (ev.kind,))

    def records(self) -> list[OpRecord]:
        """Pair events into operations (validated first)."""
        self.validate()
        out: list[OpRecord] = []
        open_idx: dict[Any, int] = {}
        for ev in self.events:
            if ev.kind == "invoke":
                open_idx[ev.thread] = len(out)
                out.append(OpRecord(ev.op, ev.thread, ev.ts))
            else:
                i = open_idx.pop(ev.thread)
                out[i] = OpRecord(ev.op, ev.thread, out[i].invoke_ts,
                                  ev.ts, ev.resp)
        ids = [r.op.instance_id for r in out]
        if len(set(ids)) != len(ids):
            raise SpecError("operation instance ids must be unique per history")
        return out

    def completed_count(self) -> int:
        return sum(1 for ev in self.events if ev.kind == "respond")

    # -- serialization -----------------------------------------------------

    def to_jsonl(self) -> str:
        lines = []
        for ev in self.events:
            doc = {
                "ts": ev.ts,
                "thread": ev.thread,
                "kind": ev.kind,
                "op": ev.op.template,
                "args": [_value_doc(a) for a in ev.op.args],
            }
            if ev.kind == "respond":
                doc["resp"] = _value_doc(ev.resp)
            lines.append(json.dumps(doc, sort_keys=True))
        return "\n".join(lines) + "\n"


def history_from_jsonl(text: str, object_id: str = "") -> History:
    events = []
    open_ops: dict[Any, OpInstance] = {}
    next_id = itertools.count()
    for line_no, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            doc = json.loads(line)
            ts, thread, kind = doc["ts"], doc["thread"], doc["kind"]
            template = doc["op"]
            args = tuple(_value_from_doc(a) for a in doc.get("args", ()))
        except (ValueError, KeyError, TypeError) as exc:
            raise SpecError("bad history line %d: %s" % (line_no, exc)) from None
        if kind == "invoke":
            op = OpInstance(template, args, next(next_id))
            open_ops[thread] = op
            events.append(Event(ts, thread, "invoke", op))
        else:
            op = open_ops.pop(thread, None)
            if op is None or op.template != template:
                raise SpecError(
                    "bad history line %d: respond without open invoke" % line_no
                )
            resp = _value_from_doc(doc.get("resp"))
            events.append(Event(ts, thread, "respond", op, resp))
    history = History(object_id, tuple(events))
    history.validate()
    return history


def _value_doc(value):
    if value is BOTTOM:
        return {"$": "bottom"}
    if value is VOID:
        return {"$": "void"}
    if isinstance(value, tuple):
        return {"$": "tuple", "items": [_value_doc(v) for v in value]}
    if value is None or isinstance(value, (bool, int, str)):
        return value
    raise SpecError("value %r has no serial form" % (value,))


def _value_from_doc(doc):
    if isinstance(doc, dict):
        tag = doc.get("$")
        if tag == "bottom":
            return BOTTOM
        if tag == "void":
            return VOID
        if tag == "tuple":
            return tuple(_value_from_doc(v) for v in doc["items"])
        raise SpecError("unknown value tag %r" % (tag,))
    return doc


# -- behavior models for the shipped objects ------------------------------------


def _map_iface_get(s, k):
    return s, dict(s).get(k, BOTTOM)


def interface_spec(object_id: str, params: dict | None = None) -> DataTypeSpec:
    """The sequential behavior model matching an object id's methods."""
    family = object_id.split(".", 1)[0]
    if family == "counter":
        base = catalog("C3", params)
        keep = {n: base.templates[n] for n in ("inc", "get")}
        return DataTypeSpec(base.name + "-iface", base.init_state, keep,
                            family=base.family, params=base.params)
    if family == "reference":
        return catalog("R2", params)
    if family == "queue":
        return catalog("Q1", params)
    if family in ("hashmap", "skiplist"):
        base = catalog("M1", params)
        keys = base.templates["remove"].domains[0]
        templates = dict(base.templates)
        templates["get"] = OpTemplate("get", (keys,), "reader", _map_iface_get)
        return DataTypeSpec(base.name + "-iface", base.init_state, templates,
                            family=base.family, params=base.params)
    raise SpecError("no behavior model for object id %r" % (object_id,))


def params_for_history(object_id: str, history: History) -> dict | None:
    """Domain parameters wide enough to cover every argument in *history*.

    A trace defines its own working domains; re-checking one must not fail
    just because the defaults are narrower than what the recording used.
    """
    family = object_id.split(".", 1)[0]
    args_of: dict[str, list[tuple]] = {}
    for ev in history.events:
        if ev.kind == "invoke":
            args_of.setdefault(ev.op.template, []).append(ev.op.args)

    def column(templates, pos):
        return {
            a[pos]
            for t in templates
            for a in args_of.get(t, ())
            if len(a) > pos
        }

    base = interface_spec(object_id)

    def widened(template, pos, observed):
        merged = set(base.template(template).domains[pos]) | observed
        return tuple(sorted(merged, key=repr))

    if family == "counter":
        return {"deltas": widened("inc", 0, column(["inc"], 0))}
    if family == "reference":
        return {"addrs": widened("set", 0, column(["set"], 0))}
    if family == "queue":
        return {"items": widened("offer", 0,
                                 column(["offer", "contains"], 0))}
    if family in ("hashmap", "skiplist"):
        keys = column(["put", "remove", "contains", "get"], 0)
        return {
            "keys": widened("put", 0, keys),
            "values": widened("put", 1, column(["put"], 1)),
        }
    return None


def _adapters(object_id: str) -> dict[str, Callable]:
    family = object_id.split(".", 1)[0]
    if family == "counter":
        return {
            "inc": lambda o, a, t: (o.inc(a[0], thread=t), VOID)[1],
            "get": lambda o, a, t: o.read(),
        }
    if family == "reference":
        return {
            "set": lambda o, a, t: VOID if o.set(a[0]) else BOTTOM,
            "get": lambda o, a, t: o.get(),
        }
    if family == "queue":
        return {
            "offer": lambda o, a, t: (o.offer(a[0]), VOID)[1],
            "poll": lambda o, a, t: o.poll(thread=t),
            "contains": lambda o, a, t: o.contains(a[0]),
        }
    if family in ("hashmap", "skiplist"):
        return {
            "put": lambda o, a, t: o.put(a[0], a[1], thread=t),
            "remove": lambda o, a, t: o.remove(a[0], thread=t),
            "contains": lambda o, a, t: o.contains(a[0]),
            "get": lambda o, a, t: o.get(a[0]),
        }
    raise SpecError("no adapters for object id %r" % (object_id,))


# -- recording -------------------------------------------------------------------


class Recorder:
    """Wraps a live object; every call appends invoke/respond events."""

    def __init__(self, obj, object_id: str):
        self.object = obj
        self.object_id = object_id
        self._adapters = _adapters(object_id)
        self._lock = threading.Lock()
        self._clock = itertools.count(1)
        self._events: list[Event] = []

    def call(self, thread, op: OpInstance):
        adapter = self._adapters.get(op.template)
        if adapter is None:
            raise SpecError(
                "object %s has no operation %r" % (self.object_id, op.template)
            )
        with self._lock:
            self._events.append(Event(next(self._clock), thread, "invoke", op))
        resp = adapter(self.object, op.args, thread)
        with self._lock:
            self._events.append(Event(next(self._clock), thread, "respond",
                                      op, resp))
        return resp

    def history(self) -> History:
        with self._lock:
            events = tuple(self._events)
        for a, b in zip(events, events[1:]):
            if b.ts <= a.ts:  # the tick source must be monotonic
                raise RuntimeError("recorder clock went backwards")
        return History(self.object_id, events)


def record(wrapper: Recorder, workload: dict[Any, list[OpInstance]]) -> History:
    """Run one op list per thread against the wrapped object; trace it."""
    start = threading.Barrier(len(workload))
    errors = []

    def run(thread, ops):
        try:
            start.wait()
            for op in ops:
                wrapper.call(thread, op)
        except BaseException as exc:
            errors.append(exc)
            raise

    threads = [
        threading.Thread(target=run, args=(t, ops))
        for t, ops in workload.items()
    ]
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    if errors:
        raise errors[0]
    history = wrapper.history()
    history.validate()
    return history


# -- checking --------------------------------------------------------------------


@dataclass(frozen=True)
class WitnessStep:
    op: OpInstance
    thread: Any
    resp: Any


@dataclass(frozen=True)
class Witness:
    ok = True
    order: tuple[WitnessStep, ...]
    final_state: Any


@dataclass(frozen=True)
class NotLinearizable:
    ok = False
    prefix: History
    completed: int

    def __str__(self):
        return (
            "no witness for the first %d completed operation(s)"
            % self.completed
        )


def check(history: History, spec: DataTypeSpec | None = None,
          bound: int = DEFAULT_BOUND):
    """Search for a linearization witness; dual-verified both ways."""
    if spec is None:
        spec = interface_spec(history.object_id)
    records = history.records()
    n_completed = sum(1 for r in records if r.completed)
    if n_completed > bound:
        raise SpecError(
            "history has %d completed operations, over the search bound %d; "
            "truncate the history or raise the bound" % (n_completed, bound)
        )
    for r in records:
        spec.template(r.op.template).validate(r.op)
    order = _search(spec, records)
    if order is not None:
        witness = Witness(tuple(order), _replay_final(spec, order))
        _verify_witness(spec, records, witness)
        return witness
    return _minimal_violation(history, spec)


def _search(spec: DataTypeSpec, records: list[OpRecord]):
    completed_ids = frozenset(
        i for i, r in enumerate(records) if r.completed
    )
    memo: set = set()
    path: list[WitnessStep] = []

    def dfs(state, done: frozenset) -> bool:
        if completed_ids <= done:
            return True
        key = (state_key(state), done)
        if key in memo:
            return False
        memo.add(key)
        fence = min(
            (records[i].respond_ts for i in completed_ids - done),
            default=None,
        )
        for i, r in enumerate(records):
            if i in done:
                continue
            if fence is not None and r.invoke_ts > fence:
                continue  # someone else finished before this op began
            state2, resp = spec.step(state, r.op)
            if r.completed and state_key(resp) != state_key(r.resp):
                continue
            path.append(WitnessStep(r.op, r.thread, resp))
            if dfs(state2, done | {i}):
                return True
            path.pop()
        return False

    if dfs(spec.init_state, frozenset()):
        return list(path)
    return None


def _replay_final(spec, order):
    state = spec.init_state
    for step in order:
        state, _ = apply(spec, state, step.op)
    return state


def _verify_witness(spec, records, witness) -> None:
    """Independent soundness pass over a found witness."""
    by_id = {(r.op.instance_id): r for r in records}
    seen = set()
    state = spec.init_state
    placed = []
    for step in witness.order:
        rec = by_id[step.op.instance_id]
        assert step.op.instance_id not in seen
        seen.add(step.op.instance_id)
        state, resp = apply(spec, state, step.op)
        if rec.completed and state_key(resp) != state_key(rec.resp):
            raise RuntimeError("witness replay diverged from the trace")
        placed.append(rec)
    missing = [r for r in records if r.completed
               and r.op.instance_id not in seen]
    if missing:
        raise RuntimeError("witness dropped a completed operation")
    for a, b in itertools.combinations(placed, 2):
        # b is ordered after a: it must not have finished before a began
        if b.respond_ts is not None and b.respond_ts < a.invoke_ts:
            raise RuntimeError("witness violates real-time order")
    if state_key(state) != state_key(witness.final_state):
        raise RuntimeError("witness final state is inconsistent")


def _minimal_violation(history: History, spec) -> NotLinearizable:
    respond_positions = [
        i for i, ev in enumerate(history.events) if ev.kind == "respond"
    ]
    for n, pos in enumerate(respond_positions, 1):
        prefix = History(history.object_id, history.events[: pos + 1])
        if _search(spec, prefix.records()) is None:
            return NotLinearizable(prefix, n)
    raise RuntimeError("full history rejected but every prefix has a witness")


# -- workload helpers --------------------------------------------------------------


def random_workload(
    spec: DataTypeSpec,
    threads: Iterable[Any],
    ops_per_thread,
    rng,
    allow: Callable | None = None,
) -> dict[Any, list[OpInstance]]:
    """A random plan: each thread draws ops over the spec's domains.

    ``allow(thread, template, args)`` filters each thread's draw pool, which
    is how usage contracts (who may poll, who may write which keys) are
    imposed on generated workloads.
    """
    ids = itertools.count()
    plan: dict[Any, list[OpInstance]] = {}
    for thread in threads:
        pool = [
            (t, args)
            for t, args in spec.instances()
            if allow is None or allow(thread, t, args)
        ]
        if not pool:
            raise SpecError("thread %r has no permitted operations" % (thread,))
        count = (ops_per_thread(rng) if callable(ops_per_thread)
                 else ops_per_thread)
        plan[thread] = [
            OpInstance(*rng.choice(pool), instance_id=next(ids))
            for _ in range(count)
        ]
    return plan


def stress_profile(object_id: str, n_threads: int):
    """(spec, thread tokens, allow) for contract-respecting workloads.

    The filter encodes each object's usage restriction: only thread 0 may
    poll the single-consumer queue, only thread 0 mutates a single-writer
    map, and segmented-map writers stick to keys they own (key mod thread
    count); everything else is unrestricted.
    """
    family, _, kind = object_id.partition(".")
    params = None
    if family in ("hashmap", "skiplist"):
        if kind == "segmented":
            params = {"keys": tuple(range(2 * n_threads)), "values": (1, 2)}
        else:
            params = {"keys": (1, 2), "values": (1, 2)}
    spec = interface_spec(object_id, params)
    threads = list(range(n_threads))

    def allow(thread, template, args) -> bool:
        if family == "queue" and kind == "adjusted" and template == "poll":
            return thread == 0
        if family in ("hashmap", "skiplist") and template in ("put", "remove"):
            if kind == "swmr":
                return thread == 0
            if kind == "segmented":
                return args[0] % n_threads == thread
        return True

    return spec, threads, allow
