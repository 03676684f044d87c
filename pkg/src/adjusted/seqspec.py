"""Executable sequential data-type specifications with Hoare-style semantics.

A :class:`DataTypeSpec` packages a finite-domain sequential object: an initial
state, a set of operation templates, and a total deterministic transition
function.  A failed precondition never raises — the transition returns the
input state unchanged together with the distinguished response ``BOTTOM``.
Operations that succeed but declare no return value respond with ``VOID``.

The module also ships the standard catalog of restricted types (counters,
sets, a queue, references, maps), per-thread permission maps with access
classes, and an extensional checker for the "adjusts" relation between two
specs (narrowed interface + weakened responses).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Iterable, Sequence


class _Bottom:
    """The distinguished empty/failure response (and absent-value marker)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "⊥"

    def __reduce__(self):
        return (_Bottom, ())


class _Void:
    """Marker for operations that return nothing (distinct from ⊥)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Void"

    def __reduce__(self):
        return (_Void, ())


BOTTOM = _Bottom()
VOID = _Void()

State = Any
Response = Any  # a domain value, BOTTOM, or VOID


class SpecError(ValueError):
    """Usage error: unknown template, bad arguments, malformed input."""


@dataclass(frozen=True)
class OpInstance:
    """One operation occurrence inside a bag or sequence.

    ``instance_id`` distinguishes repeated occurrences of the same
    template+args; two instances with different ids are distinct bag elements.
    """

    template: str
    args: tuple = ()
    instance_id: int = 0

    def display(self, tag: bool = False) -> str:
        body = "%s(%s)" % (self.template, ",".join(str(a) for a in self.args))
        return "%s#%d" % (body, self.instance_id) if tag else body

    def __repr__(self):
        return self.display(tag=True)


def make_bag(protos: Sequence[tuple[str, tuple]]) -> tuple[OpInstance, ...]:
    """Build a bag from (template, args) pairs, ids assigned left to right."""
    return tuple(OpInstance(t, tuple(a), i) for i, (t, a) in enumerate(protos))


@dataclass(frozen=True)
class OpTemplate:
    name: str
    domains: tuple[tuple, ...]  # one value tuple per argument position
    kind: str  # "reader" | "writer"
    fn: Callable[..., tuple[State, Response]] = field(compare=False, repr=False)
    consuming: bool = False  # read-consuming (queue poll); used by MWSR
    defaults: tuple | None = None  # args used when the instance carries none

    def resolve_args(self, op: OpInstance) -> tuple:
        if not op.args and self.domains and self.defaults is not None:
            return self.defaults
        return op.args

    def validate(self, op: OpInstance) -> None:
        args = self.resolve_args(op)
        if len(args) != len(self.domains):
            raise SpecError(
                "operation %s takes %d argument(s), got %r"
                % (self.name, len(self.domains), op.args)
            )
        for value, domain in zip(args, self.domains):
            if value not in domain:
                raise SpecError(
                    "argument %r of %s outside its domain %r"
                    % (value, self.name, domain)
                )


@dataclass(frozen=True)
class DataTypeSpec:
    """A = (states, init_state, commands, responses, transition)."""

    name: str
    init_state: State
    templates: dict[str, OpTemplate] = field(compare=False)
    family: str = ""
    params: dict = field(default_factory=dict, compare=False)

    # -- basic views -------------------------------------------------------

    def template(self, name: str) -> OpTemplate:
        try:
            return self.templates[name]
        except KeyError:
            raise SpecError("unknown operation %r for spec %s" % (name, self.name))

    def readers(self) -> list[str]:
        return [t.name for t in self.templates.values() if t.kind == "reader"]

    def writers(self) -> list[str]:
        return [t.name for t in self.templates.values() if t.kind == "writer"]

    def is_reader(self, template: str) -> bool:
        return self.template(template).kind == "reader"

    # -- execution ---------------------------------------------------------

    def step(self, state: State, op: OpInstance) -> tuple[State, Response]:
        """Unvalidated transition; callers must have validated the op once."""
        tpl = self.templates[op.template]
        return tpl.fn(state, *tpl.resolve_args(op))

    def instances(self) -> list[tuple[str, tuple]]:
        """Every (template, args) combination over the declared domains."""
        out = []
        for tpl in self.templates.values():
            for args in itertools.product(*tpl.domains):
                out.append((tpl.name, args))
        return out

    def to_doc(self) -> dict:
        return {
            "schema": "v1",
            "name": self.name,
            "family": self.family,
            "init_state": state_to_doc(self.init_state),
            "operations": {
                tpl.name: {
                    "kind": tpl.kind,
                    "domains": [list(d) for d in tpl.domains],
                    "consuming": tpl.consuming,
                }
                for tpl in self.templates.values()
            },
        }

    def op_universe(self) -> list[OpInstance]:
        return [OpInstance(t, a) for t, a in self.instances()]


def apply(spec: DataTypeSpec, state: State, op: OpInstance) -> tuple[State, Response]:
    """One transition step under *spec*.

    A failed precondition yields ``(state, BOTTOM)`` — never an exception.
    Exceptions are reserved for usage errors (unknown template, bad args).
    """
    spec.template(op.template).validate(op)
    return spec.step(state, op)


def apply_seq(
    spec: DataTypeSpec, state: State, seq: Iterable[OpInstance]
) -> tuple[State, list[Response]]:
    """Left fold of :func:`apply`; responses come back in sequence order."""
    responses = []
    for op in seq:
        state, resp = apply(spec, state, op)
        responses.append(resp)
    return state, responses


def reachable_states(spec: DataTypeSpec, depth: int = 3) -> list[State]:
    """States reachable from init within *depth* steps (BFS, deterministic order)."""
    universe = spec.op_universe()
    seen = {state_key(spec.init_state): spec.init_state}
    frontier = [spec.init_state]
    for _ in range(depth):
        nxt = []
        for s in frontier:
            for op in universe:
                s2, _ = spec.step(s, op)
                k = state_key(s2)
                if k not in seen:
                    seen[k] = s2
                    nxt.append(s2)
        frontier = nxt
    return list(seen.values())


# ---------------------------------------------------------------------------
# canonical state encoding


def state_key(state: State) -> bytes:
    """Canonical byte encoding; two states are equal iff keys are byte-equal."""
    if state is BOTTOM:
        return b"_"
    if state is VOID:
        return b"V"
    if isinstance(state, bool):
        return b"b1" if state else b"b0"
    if isinstance(state, int):
        return b"i%d" % state
    if isinstance(state, str):
        enc = state.encode("utf-8")
        return b"s%d:%s" % (len(enc), enc)
    if isinstance(state, tuple):
        return b"(" + b",".join(state_key(x) for x in state) + b")"
    if isinstance(state, frozenset):
        return b"{" + b",".join(sorted(state_key(x) for x in state)) + b"}"
    raise SpecError("state %r has no canonical encoding" % (state,))


def state_to_doc(state: State):
    """JSON-friendly rendering of a state (``"bot"`` stands for ⊥)."""
    if state is BOTTOM:
        return "bot"
    if isinstance(state, frozenset):
        return {"set": sorted(state)}
    if isinstance(state, tuple) and state and isinstance(state[0], tuple):
        return {str(k): v for k, v in state}
    if isinstance(state, tuple):
        return list(state)
    return state


def state_from_text(spec: DataTypeSpec, text: str) -> State:
    """Parse a CLI state literal for *spec* (JSON plus the ``bot`` keyword)."""
    text = text.strip()
    if text in ("bot", "⊥", "null", "none"):
        if spec.family in ("reference",):
            return BOTTOM
        raise SpecError("state 'bot' is only meaningful for reference specs")
    try:
        value = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError("cannot parse state %r: %s" % (text, exc))
    return state_from_doc(spec, value)


def state_from_doc(spec: DataTypeSpec, value) -> State:
    if value == "bot":
        return BOTTOM
    if spec.family == "counter":
        if not isinstance(value, int):
            raise SpecError("counter state must be an integer")
        return value
    if spec.family == "set":
        if not isinstance(value, (list, dict)):
            raise SpecError("set state must be a JSON array")
        items = value["set"] if isinstance(value, dict) else value
        return frozenset(items)
    if spec.family == "queue":
        if not isinstance(value, list):
            raise SpecError("queue state must be a JSON array")
        return tuple(value)
    if spec.family == "reference":
        return value
    if spec.family == "map":
        if not isinstance(value, dict):
            raise SpecError("map state must be a JSON object")
        return tuple(sorted((int(k), v) for k, v in value.items()))
    raise SpecError("unknown spec family %r" % spec.family)


# ---------------------------------------------------------------------------
# the Table-of-types catalog

CATALOG_NAMES = ("C1", "C2", "C3", "S1", "S2", "S3", "Q1", "R1", "R2", "M1", "M2")

_RMW_FUNCS = {"add": lambda s, x: s + x}


def _map_lookup(s, k):
    for kk, vv in s:
        if kk == k:
            return vv
    return BOTTOM


def _map_store(s, k, v):
    return tuple(sorted([(kk, vv) for kk, vv in s if kk != k] + [(k, v)]))


def _map_drop(s, k):
    return tuple((kk, vv) for kk, vv in s if kk != k)


def catalog(name: str, params: dict | None = None) -> DataTypeSpec:
    """Build one of the cataloged restricted types by name.

    ``params`` bounds the value domains used for exhaustive analysis:
    ``deltas`` (counters), ``elems`` (sets), ``items`` (queue), ``addrs``
    (references), ``keys``/``values`` (maps).
    """
    if name not in CATALOG_NAMES:
        raise SpecError(
            "unknown spec %r (choose from %s)" % (name, ", ".join(CATALOG_NAMES))
        )
    p = dict(params or {})

    def T(tname, domains, kind, fn, consuming=False, defaults=None):
        return OpTemplate(tname, tuple(tuple(d) for d in domains), kind, fn,
                          consuming=consuming, defaults=defaults)

    if name in ("C1", "C2", "C3"):
        deltas = tuple(p.get("deltas", (1, 3, 5)))
        fs = tuple(sorted(_RMW_FUNCS))

        def rmw_real(s, f, x):
            return _RMW_FUNCS[f](s, x), _RMW_FUNCS[f](s, x)

        def noop(s, *args):
            return s, BOTTOM

        def inc_ret(s, k):
            return s + k, s + k

        def inc_blind(s, k):
            return s + k, VOID

        def get(s):
            return s, s

        def reset(s):
            return 0, VOID

        rows = {
            "C1": [("rmw", (fs, deltas), "writer", rmw_real),
                   ("inc", (deltas,), "writer", inc_ret),
                   ("get", (), "reader", get),
                   ("reset", (), "writer", reset)],
            # rmw's postcondition is voided and reset's precondition is false:
            # both fail silently.
            "C2": [("rmw", (fs, deltas), "writer", noop),
                   ("inc", (deltas,), "writer", inc_ret),
                   ("get", (), "reader", get),
                   ("reset", (), "writer", noop)],
            "C3": [("rmw", (fs, deltas), "writer", noop),
                   ("inc", (deltas,), "writer", inc_blind),
                   ("get", (), "reader", get),
                   ("reset", (), "writer", noop)],
        }
        templates = {}
        for tname, domains, kind, fn in rows[name]:
            defaults = (1,) if tname == "inc" else None
            templates[tname] = T(tname, domains, kind, fn, defaults=defaults)
        return DataTypeSpec(name, 0, templates, family="counter", params=p)

    if name in ("S1", "S2", "S3"):
        elems = tuple(p.get("elems", (1, 2)))

        def add_ret(s, x):
            return s | {x}, x not in s

        def add_blind(s, x):
            return s | {x}, VOID

        def rem_ret(s, x):
            return s - {x}, x in s

        def rem_blind(s, x):
            return s - {x}, VOID

        def rem_noop(s, x):
            return s, BOTTOM

        def contains(s, x):
            return s, x in s

        add, rem = {
            "S1": (add_ret, rem_ret),
            "S2": (add_blind, rem_blind),
            "S3": (add_blind, rem_noop),
        }[name]
        templates = {
            "add": T("add", (elems,), "writer", add),
            "remove": T("remove", (elems,), "writer", rem),
            "contains": T("contains", (elems,), "reader", contains),
        }
        return DataTypeSpec(name, frozenset(), templates, family="set", params=p)

    if name == "Q1":
        items = tuple(p.get("items", (1, 2)))

        def offer(s, x):
            return s + (x,), VOID

        def poll(s):
            if not s:
                return s, BOTTOM
            return s[1:], s[0]

        def qcontains(s, x):
            return s, x in s

        templates = {
            "offer": T("offer", (items,), "writer", offer),
            "poll": T("poll", (), "writer", poll, consuming=True),
            "contains": T("contains", (items,), "reader", qcontains),
        }
        return DataTypeSpec(name, (), templates, family="queue", params=p)

    if name in ("R1", "R2"):
        addrs = tuple(p.get("addrs", (1, 2)))

        def set_any(s, x):
            return x, VOID

        def set_once(s, x):
            if s is BOTTOM:
                return x, VOID
            return s, BOTTOM

        def rget(s):
            return s, s

        templates = {
            "set": T("set", (addrs,), "writer",
                     set_any if name == "R1" else set_once),
            "get": T("get", (), "reader", rget),
        }
        return DataTypeSpec(name, BOTTOM, templates, family="reference", params=p)

    # M1 / M2
    keys = tuple(p.get("keys", (1, 2)))
    values = tuple(p.get("values", (1, 2)))

    def put_ret(s, k, v):
        return _map_store(s, k, v), _map_lookup(s, k)

    def put_blind(s, k, v):
        return _map_store(s, k, v), VOID

    def mrem_ret(s, k):
        return _map_drop(s, k), _map_lookup(s, k)

    def mrem_blind(s, k):
        return _map_drop(s, k), VOID

    def mcontains(s, k):
        return s, _map_lookup(s, k) is not BOTTOM

    put, mrem = {
        "M1": (put_ret, mrem_ret),
        "M2": (put_blind, mrem_blind),
    }[name]
    templates = {
        "put": T("put", (keys, values), "writer", put),
        "remove": T("remove", (keys,), "writer", mrem),
        "contains": T("contains", (keys,), "reader", mcontains),
    }
    return DataTypeSpec(name, (), templates, family="map", params=p)


# ---------------------------------------------------------------------------
# permission maps


class AccessClass(Enum):
    ALL = "ALL"
    SWMR = "SWMR"
    MWSR = "MWSR"
    CWMR = "CWMR"
    CWSR = "CWSR"


@dataclass(frozen=True)
class PermissionMap:
    """Per-thread allowed-operation sets plus an access class.

    ``writer_thread`` names the distinguished single-role thread where the
    class has one: the writer under SWMR, the consumer under MWSR, the reader
    under CWSR.
    """

    access_class: AccessClass
    per_thread: dict[int, frozenset[str]]
    writer_thread: int | None = None

    def permitted(self, thread: int, template: str) -> bool:
        return template in self.per_thread.get(thread, frozenset())

    def validate(self, spec: DataTypeSpec) -> None:
        covered = set().union(*self.per_thread.values()) if self.per_thread else set()
        missing = set(spec.templates) - covered
        if missing:
            raise SpecError(
                "permission map leaves %s unexecutable" % ", ".join(sorted(missing))
            )
        writers = set(spec.writers())
        consumers = {t.name for t in spec.templates.values() if t.consuming}
        if self.access_class is AccessClass.SWMR:
            holders = {t for t, ops in self.per_thread.items() if ops & writers}
            if len(holders) != 1 or self.writer_thread not in holders:
                raise SpecError("SWMR requires exactly one writing thread")
        if self.access_class is AccessClass.MWSR:
            holders = {t for t, ops in self.per_thread.items() if ops & consumers}
            if len(holders) != 1 or self.writer_thread not in holders:
                raise SpecError("MWSR requires exactly one consuming thread")
        if self.access_class is AccessClass.CWSR:
            readers = set(spec.readers())
            holders = {t for t, ops in self.per_thread.items() if ops & readers}
            if len(holders) > 1:
                raise SpecError("CWSR requires at most one reading thread")

    # -- common shapes -----------------------------------------------------

    @staticmethod
    def all_access(spec: DataTypeSpec, threads: Iterable[int]) -> "PermissionMap":
        ops = frozenset(spec.templates)
        return PermissionMap(AccessClass.ALL, {t: ops for t in threads})

    @staticmethod
    def swmr(spec, writer: int, readers: Iterable[int]) -> "PermissionMap":
        ops = frozenset(spec.templates)
        ro = frozenset(spec.readers())
        table = {r: ro for r in readers}
        table[writer] = ops
        return PermissionMap(AccessClass.SWMR, table, writer_thread=writer)

    @staticmethod
    def mwsr(spec, consumer: int, producers: Iterable[int]) -> "PermissionMap":
        consuming = frozenset(t.name for t in spec.templates.values() if t.consuming)
        rest = frozenset(spec.templates) - consuming
        table = {pr: rest for pr in producers}
        table[consumer] = frozenset(spec.templates)
        return PermissionMap(AccessClass.MWSR, table, writer_thread=consumer)

    @staticmethod
    def cwmr(spec, writers: Iterable[int], readers: Iterable[int]) -> "PermissionMap":
        ops = frozenset(spec.templates)
        ro = frozenset(spec.readers())
        table = {r: ro for r in readers}
        table.update({w: ops for w in writers})
        return PermissionMap(AccessClass.CWMR, table)

    @staticmethod
    def cwsr(spec, writers: Iterable[int], reader: int) -> "PermissionMap":
        wo = frozenset(spec.writers())
        table = {w: wo for w in writers}
        table[reader] = frozenset(spec.templates)
        return PermissionMap(AccessClass.CWSR, table, writer_thread=reader)


def strongly_commute(
    spec: DataTypeSpec, c: OpInstance, d: OpInstance, states: Sequence[State]
) -> bool:
    """Both orders agree on final state and on each op's response, everywhere."""
    for s in states:
        s1, rc1 = spec.step(s, c)
        s1, rd1 = spec.step(s1, d)
        s2, rd2 = spec.step(s, d)
        s2, rc2 = spec.step(s2, c)
        if state_key(s1) != state_key(s2) or rc1 != rc2 or rd1 != rd2:
            return False
    return True


def complies(
    bag: Iterable[tuple[int, OpInstance]],
    pmap: PermissionMap,
    spec: DataTypeSpec,
    states: Sequence[State] | None = None,
) -> bool:
    """Does the per-thread bag respect the permission map?

    For the commuting-writer classes every pair of writer instances must
    strongly commute from every sampled reachable state.
    """
    entries = list(bag)
    threads = [t for t, _ in entries]
    if len(set(threads)) != len(threads):
        raise SpecError("complies expects one operation per thread")
    for thread, op in entries:
        spec.template(op.template).validate(op)
        if not pmap.permitted(thread, op.template):
            return False
    if pmap.access_class in (AccessClass.CWMR, AccessClass.CWSR):
        if states is None:
            states = reachable_states(spec, depth=3)
        writers = [op for _, op in entries if spec.template(op.template).kind == "writer"]
        for c, d in itertools.combinations(writers, 2):
            if not strongly_commute(spec, c, d, states):
                return False
    return True


# ---------------------------------------------------------------------------
# the adjusts relation


@dataclass
class OpVerdict:
    pre_implication: bool = True
    post_implication: bool = True


@dataclass
class AdjustReport:
    adjusted: str
    base: str
    narrowness: bool
    missing_templates: list[str]
    ops: dict[str, OpVerdict]
    counterexamples: list[dict]

    @property
    def passed(self) -> bool:
        return self.narrowness and all(
            v.pre_implication and v.post_implication for v in self.ops.values()
        )

    def to_doc(self) -> dict:
        return {
            "schema": "v1",
            "adjusted": self.adjusted,
            "base": self.base,
            "pass": self.passed,
            "narrowness": {
                "pass": self.narrowness,
                "missing_templates": sorted(self.missing_templates),
            },
            "ops": {
                name: {
                    "pre_implication": v.pre_implication,
                    "post_implication": v.post_implication,
                }
                for name, v in sorted(self.ops.items())
            },
            "counterexamples": self.counterexamples,
        }


def check_adjusts(
    adjusted: DataTypeSpec,
    base: DataTypeSpec,
    state_sample: Sequence[State] | None = None,
    arg_sample: dict[str, Sequence[tuple]] | None = None,
    max_counterexamples: int = 10,
) -> AdjustReport:
    """Extensionally check that *adjusted* adjusts *base*.

    The base type must be a narrow behavioural subtype of the adjusted type:
    every operation of the base exists in the adjusted spec; wherever the
    adjusted transition succeeds (non-⊥), the base transition succeeds too,
    reaches the same state, and returns the same response unless the adjusted
    response is Void (response weakening admits any base value).

    ``state_sample`` defaults to the union of both specs' BFS-3 reachable
    sets; ``arg_sample`` maps template names to argument tuples and defaults
    to the full grid over the adjusted spec's declared domains.
    """
    if state_sample is None:
        pool = {state_key(s): s for s in reachable_states(adjusted, depth=3)}
        for s in reachable_states(base, depth=3):
            pool.setdefault(state_key(s), s)
        state_sample = list(pool.values())

    missing = sorted(set(base.templates) - set(adjusted.templates))
    ops: dict[str, OpVerdict] = {}
    cexs: list[dict] = []

    def note(state, op, expected, got):
        if len(cexs) < max_counterexamples:
            cexs.append(
                {
                    "state": state_to_doc(state),
                    "op": op.display(),
                    "expected": repr(expected),
                    "got": repr(got),
                }
            )

    for tname in adjusted.templates:
        if tname not in base.templates:
            continue  # only shared templates carry obligations
        verdict = ops.setdefault(tname, OpVerdict())
        tpl = adjusted.templates[tname]
        if arg_sample is not None and tname in arg_sample:
            grid = [tuple(a) for a in arg_sample[tname]]
        else:
            grid = list(itertools.product(*tpl.domains))
        for args in grid:
            op = OpInstance(tname, args)
            for s in state_sample:
                s_adj, r_adj = adjusted.step(s, op)
                if r_adj is BOTTOM and state_key(s_adj) == state_key(s):
                    continue  # adjusted precondition fails: no obligation
                s_base, r_base = base.step(s, op)
                states_agree = state_key(s_base) == state_key(s_adj)
                resp_ok = r_adj is VOID or r_base == r_adj
                if states_agree and resp_ok:
                    continue
                # ⊥ with an unchanged state is ambiguous (failed precondition
                # vs. a legal ⊥ response); once the output fails the adjusted
                # obligation we read it as a refusal.
                if r_base is BOTTOM and state_key(s_base) == state_key(s):
                    verdict.pre_implication = False
                    note(s, op, r_adj, BOTTOM)
                elif not states_agree:
                    verdict.post_implication = False
                    note(s, op, s_adj, s_base)
                else:
                    verdict.post_implication = False
                    note(s, op, r_adj, r_base)

    return AdjustReport(
        adjusted=adjusted.name,
        base=base.name,
        narrowness=not missing,
        missing_templates=missing,
        ops=ops,
        counterexamples=cexs,
    )
