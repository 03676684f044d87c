"""Indistinguishability-graph analysis of sequential specifications.

Nodes of the graph are the permutations of an operation bag applied from a
common start state.  An operation labels an edge between two permutations
when it answers identically in both and some state reachable at-or-after the
operation is common to both orders; the label is strong when the two
permutations also agree on their final state.  Connectivity of the graph
bounds how much the type can reveal about operation ordering, which in turn
bounds its synchronization power and predicts how well restricted usages
scale.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from adjusted.seqspec import (
    DataTypeSpec,
    OpInstance,
    SpecError,
    State,
    reachable_states,
    state_key,
    state_to_doc,
)

FACTORIAL_BOUND = 6

Node = tuple  # tuple[OpInstance, ...]


@dataclass(frozen=True)
class EdgeLabel:
    labels: frozenset
    strong: frozenset

    def __post_init__(self):
        if not self.strong <= self.labels:
            raise SpecError("strong labels must be a subset of plain labels")


@dataclass
class IGraph:
    spec_name: str
    family: str
    start_state: State
    bag: tuple
    nodes: list
    edges: dict  # (node, node) with lower index first -> EdgeLabel

    def label(self, x: Node, y: Node) -> EdgeLabel | None:
        x, y = tuple(x), tuple(y)
        return self.edges.get((x, y)) or self.edges.get((y, x))

    def __eq__(self, other):
        if not isinstance(other, IGraph):
            return NotImplemented
        return (
            self.spec_name == other.spec_name
            and self.family == other.family
            and state_key(self.start_state) == state_key(other.start_state)
            and self.bag == other.bag
            and self.nodes == other.nodes
            and self.edges == other.edges
        )


@dataclass
class DistResult:
    k: int
    l: int
    witnesses: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# permutation runs


class _Run:
    """Responses, per-position suffix state sets, and final key of one order."""

    __slots__ = ("resp_keys", "suffixes", "final_key")

    def __init__(self, spec, state, perm):
        resp_keys = []
        state_keys = []
        for op in perm:
            state, resp = spec.step(state, op)
            resp_keys.append(state_key(resp))
            state_keys.append(state_key(state))
        self.resp_keys = resp_keys
        self.final_key = state_keys[-1] if state_keys else state_key(state)
        suffixes = []
        acc = set()
        for k in reversed(state_keys):
            acc = acc | {k}
            suffixes.append(frozenset(acc))
        suffixes.reverse()
        self.suffixes = suffixes


def _validated_bag(spec: DataTypeSpec, bag: Sequence[OpInstance]) -> tuple:
    bag = tuple(bag)
    if not bag:
        raise SpecError("operation bag must be non-empty")
    if len(set(bag)) != len(bag):
        raise SpecError(
            "bag elements must be distinct; give repeated operations "
            "different instance_ids"
        )
    for op in bag:
        spec.template(op.template).validate(op)
    return bag


def _indist_from_runs(rx: _Run, ix: int, ry: _Run, iy: int, one_shot: bool):
    if rx.resp_keys[ix] != ry.resp_keys[iy]:
        return False, False
    if not one_shot and not (rx.suffixes[ix] & ry.suffixes[iy]):
        return False, False
    return True, rx.final_key == ry.final_key


def indist(
    spec: DataTypeSpec,
    start_state: State,
    bag: Sequence[OpInstance],
    x: Sequence[OpInstance],
    y: Sequence[OpInstance],
    op: OpInstance,
    one_shot: bool = False,
) -> tuple[bool, bool]:
    """(indistinguishable, strong) for *op* between permutations x and y."""
    bag = _validated_bag(spec, bag)
    x, y = tuple(x), tuple(y)
    for perm in (x, y):
        if tuple(sorted(perm, key=repr)) != tuple(sorted(bag, key=repr)):
            raise SpecError("x and y must be permutations of the bag")
    if op not in bag:
        raise SpecError("op %r is not in the bag" % (op,))
    rx = _Run(spec, start_state, x)
    ry = _Run(spec, start_state, y)
    return _indist_from_runs(rx, x.index(op), ry, y.index(op), one_shot)


def build_graph(
    spec: DataTypeSpec,
    start_state: State,
    bag: Sequence[OpInstance],
    factorial_bound: int = FACTORIAL_BOUND,
    one_shot: bool = False,
) -> IGraph:
    """All permutations of *bag* from *start_state* with labeled edges."""
    bag = _validated_bag(spec, bag)
    if len(bag) > factorial_bound:
        raise SpecError(
            "bag of %d operations exceeds the factorial bound %d"
            % (len(bag), factorial_bound)
        )
    nodes = list(itertools.permutations(bag))
    runs = [_Run(spec, start_state, n) for n in nodes]
    position = [{op: n.index(op) for op in bag} for n in nodes]
    edges = {}
    for a, b in itertools.combinations(range(len(nodes)), 2):
        labels, strong = [], []
        for op in bag:
            ok, st = _indist_from_runs(
                runs[a], position[a][op], runs[b], position[b][op], one_shot
            )
            if ok:
                labels.append(op)
                if st:
                    strong.append(op)
        if labels:
            edges[(nodes[a], nodes[b])] = EdgeLabel(
                frozenset(labels), frozenset(strong)
            )
    return IGraph(spec.name, spec.family, start_state, bag, nodes, edges)


# ---------------------------------------------------------------------------
# classes and labeling predicates


def classes(g: IGraph) -> list:
    """Connected components, each a tuple of nodes in node order."""
    index = {n: i for i, n in enumerate(g.nodes)}
    parent = list(range(len(g.nodes)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for a, b in g.edges:
        ra, rb = find(index[a]), find(index[b])
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups = {}
    for i, n in enumerate(g.nodes):
        groups.setdefault(find(i), []).append(n)
    return [tuple(groups[r]) for r in sorted(groups)]


def is_labeling(g: IGraph, op: OpInstance) -> bool:
    """One class overall and *op* on every edge."""
    if op not in g.bag:
        raise SpecError("op %r is not in the bag" % (op,))
    if len(classes(g)) != 1:
        return False
    return all(op in e.labels for e in g.edges.values())


def is_strongly_labeling(g: IGraph, op: OpInstance) -> bool:
    if op not in g.bag:
        raise SpecError("op %r is not in the bag" % (op,))
    if len(classes(g)) != 1:
        return False
    return all(op in e.strong for e in g.edges.values())


def bag_labeling(g: IGraph) -> bool:
    return all(is_labeling(g, op) for op in g.bag)


# ---------------------------------------------------------------------------
# movers


def _swap(perm: Sequence[OpInstance], i: int) -> tuple:
    out = list(perm)
    out[i - 1], out[i] = out[i], out[i - 1]
    return tuple(out)


def left_moves(spec, start_state, bag, x, i: int) -> bool:
    """Can x[i] slide left across x[i-1] without anyone noticing?

    True when x[i] strongly labels the edge between x and the permutation
    with positions i-1 and i exchanged.
    """
    x = tuple(x)
    if not 1 <= i < len(x):
        raise SpecError("left_moves needs a position with a predecessor")
    ok, strong = indist(spec, start_state, bag, x, _swap(x, i), x[i])
    return ok and strong


def right_moves(spec, start_state, bag, x, i: int) -> bool:
    """Does x[i] sit one step right of an order its predecessor cannot tell
    apart?  True when x[i-1] strongly labels the same swapped edge — the
    displaced operation keeps its answer and the common final state."""
    x = tuple(x)
    if not 1 <= i < len(x):
        raise SpecError("right_moves needs a position with a predecessor")
    ok, strong = indist(spec, start_state, bag, x, _swap(x, i), x[i - 1])
    return ok and strong


def default_state_gen(spec: DataTypeSpec, depth: int = 3) -> list:
    return reachable_states(spec, depth)


def default_bag_gen(spec: DataTypeSpec, k: int, cap: int = 200) -> list:
    """All size-k multisets over the spec's op universe, id-tagged, capped."""
    universe = spec.op_universe()
    bags = []
    for combo in itertools.combinations_with_replacement(universe, k):
        bags.append(
            tuple(OpInstance(op.template, op.args, i) for i, op in enumerate(combo))
        )
        if len(bags) >= cap:
            break
    return bags


def _mover_instances(spec, template, state_gen, bag_gen):
    if state_gen is None:
        state_gen = default_state_gen(spec)
    if bag_gen is None:
        bag_gen = default_bag_gen(spec, 2, cap=80) + default_bag_gen(spec, 3, cap=80)
    for state in state_gen:
        for bag in bag_gen:
            bag = tuple(bag)
            if not any(op.template == template for op in bag):
                continue
            for x in itertools.permutations(bag):
                for i in range(1, len(x)):
                    if x[i].template == template:
                        yield state, bag, x, i


def is_left_mover(spec, template: str, state_gen=None, bag_gen=None) -> bool:
    """Does every instance of *template* left-move at every generated
    position?  Generators default to small exhaustive state/bag samples."""
    spec.template(template)
    return all(
        left_moves(spec, state, bag, x, i)
        for state, bag, x, i in _mover_instances(spec, template, state_gen, bag_gen)
    )


def is_right_mover(spec, template: str, state_gen=None, bag_gen=None) -> bool:
    spec.template(template)
    return all(
        right_moves(spec, state, bag, x, i)
        for state, bag, x, i in _mover_instances(spec, template, state_gen, bag_gen)
    )


# ---------------------------------------------------------------------------
# dist and the consensus bound


def _class_count(spec, state, bag, one_shot: bool = False) -> int:
    """Number of indistinguishability classes, stopping early at one."""
    nodes = list(itertools.permutations(bag))
    runs = [_Run(spec, state, n) for n in nodes]
    position = [{op: n.index(op) for op in bag} for n in nodes]
    parent = list(range(len(nodes)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    count = len(nodes)
    for a, b in itertools.combinations(range(len(nodes)), 2):
        ra, rb = find(a), find(b)
        if ra == rb:
            continue
        for op in bag:
            ok, _ = _indist_from_runs(
                runs[a], position[a][op], runs[b], position[b][op], one_shot
            )
            if ok:
                parent[max(ra, rb)] = min(ra, rb)
                count -= 1
                break
        if count == 1:
            break
    return count


def dist_classify(
    spec: DataTypeSpec,
    k: int,
    state_gen: Iterable[State] | None = None,
    bag_gen: Iterable[Sequence[OpInstance]] | None = None,
) -> DistResult:
    """Max class count over generated (state, bag) pairs with |bag| = k."""
    if k < 1:
        raise SpecError("dist needs a bag size of at least 1")
    if k > FACTORIAL_BOUND:
        raise SpecError(
            "bag of %d operations exceeds the factorial bound %d"
            % (k, FACTORIAL_BOUND)
        )
    if state_gen is None:
        state_gen = default_state_gen(spec)
    if bag_gen is None:
        bag_gen = default_bag_gen(spec, k)
    states = list(state_gen)
    best, witnesses = 1, []
    for bag in bag_gen:
        bag = _validated_bag(spec, bag)
        if len(bag) != k:
            raise SpecError("bag %r does not have the requested size %d" % (bag, k))
        for state in states:
            count = _class_count(spec, state, bag)
            if count > best:
                best, witnesses = count, []
            if count == best and len(witnesses) < 3:
                witnesses.append(
                    {
                        "state": state_to_doc(state),
                        "bag": [op.display(tag=True) for op in bag],
                        "classes": count,
                    }
                )
        if best >= k:
            break  # the class count can never exceed the bag size
    return DistResult(k=k, l=best, witnesses=witnesses)


def _is_readable(spec: DataTypeSpec) -> bool:
    readers = spec.readers()
    if not readers:
        return False
    states = reachable_states(spec, depth=3)
    for tname in readers:
        tpl = spec.templates[tname]
        for args in itertools.product(*tpl.domains):
            op = OpInstance(tname, args)
            if any(state_key(spec.step(s, op)[0]) != state_key(s) for s in states):
                return False
    return True


def consensus_bound(
    spec: DataTypeSpec,
    kmax: int,
    state_gen: Iterable[State] | None = None,
    bag_gen: Callable[[int], Iterable] | None = None,
) -> int:
    """Largest k ≤ kmax whose graphs split into two or more classes, else 1.

    A bounded estimate: exact only when the generators exhaust the relevant
    states and bags.  Requires a readable spec — at least one reader
    operation whose transition never changes the state — since the bound
    rests on every thread being able to retrieve the latest state.
    """
    if kmax < 2:
        raise SpecError("kmax must be at least 2")
    if not _is_readable(spec):
        raise SpecError(
            "spec %s is not readable: consensus bounding needs a reader "
            "operation that never changes the state" % spec.name
        )
    states = list(state_gen) if state_gen is not None else default_state_gen(spec)
    for k in range(kmax, 1, -1):
        bags = bag_gen(k) if bag_gen is not None else default_bag_gen(spec, k)
        for bag in bags:
            bag = _validated_bag(spec, bag)
            for state in states:
                if _class_count(spec, state, bag) >= 2:
                    return k
    return 1


# ---------------------------------------------------------------------------
# write-pair classification (the permissiveness test)


def classify_pair(
    spec: DataTypeSpec,
    c: OpInstance,
    d: OpInstance,
    states: Sequence[State] | None = None,
) -> str:
    """One of "overwriting", "weakly_commuting", "neither".

    Overwriting: either op, run second, behaves exactly as if run alone —
    same resulting state and same response.  Weakly commuting: both orders
    reach the same final state and at least one op's response is unaffected
    by the other having run first.
    """
    for op in (c, d):
        spec.template(op.template).validate(op)
    if states is None:
        states = reachable_states(spec, depth=3)

    def outcome(state, op):
        s2, r = spec.step(state, op)
        return state_key(s2), state_key(r), s2

    overwriting = True
    commuting = True
    c_blind_to_d = True
    d_blind_to_c = True
    for s in states:
        kc, rc, sc = outcome(s, c)
        kd, rd, sd = outcome(s, d)
        kcd, rd2, _ = outcome(sc, d)  # d after c
        kdc, rc2, _ = outcome(sd, c)  # c after d
        if kdc != kc or rc2 != rc or kcd != kd or rd2 != rd:
            overwriting = False
        if kcd != kdc:
            commuting = False
        if rc2 != rc:
            c_blind_to_d = False
        if rd2 != rd:
            d_blind_to_c = False
    if overwriting:
        return "overwriting"
    if commuting and (c_blind_to_d or d_blind_to_c):
        return "weakly_commuting"
    return "neither"


def is_permissive(spec: DataTypeSpec, states: Sequence[State] | None = None) -> bool:
    """Every pair of write instances is overwriting or weakly commuting."""
    if states is None:
        states = reachable_states(spec, depth=3)
    writes = [op for op in spec.op_universe() if spec.template(op.template).kind == "writer"]
    for c, d in itertools.combinations_with_replacement(writes, 2):
        if classify_pair(spec, c, d, states) == "neither":
            return False
    return True


# ---------------------------------------------------------------------------
# serialization


def _node_names(g: IGraph) -> dict:
    tagged = len({(op.template, op.args) for op in g.bag}) != len(g.bag)
    return {n: ",".join(op.display(tag=tagged) for op in n) for n in g.nodes}


def _op_doc(op: OpInstance) -> dict:
    return {"template": op.template, "args": list(op.args), "id": op.instance_id}


def _op_from_doc(doc) -> OpInstance:
    return OpInstance(doc["template"], tuple(doc["args"]), doc["id"])


def export_graph(g: IGraph, format: str = "json") -> str:
    """Deterministic DOT or JSON rendering; JSON round-trips losslessly."""
    if format == "dot":
        names = _node_names(g)
        tagged = len({(op.template, op.args) for op in g.bag}) != len(g.bag)
        lines = ["graph indistinguishability {"]
        for n in g.nodes:
            lines.append('  "%s";' % names[n])
        for (a, b), e in sorted(
            g.edges.items(),
            key=lambda kv: (g.nodes.index(kv[0][0]), g.nodes.index(kv[0][1])),
        ):
            labels = " ".join(sorted(op.display(tag=tagged) for op in e.labels))
            strong = " ".join(sorted(op.display(tag=tagged) for op in e.strong))
            lines.append(
                '  "%s" -- "%s" [label="%s" strong="%s"];'
                % (names[a], names[b], labels, strong)
            )
        lines.append("}")
        return "\n".join(lines) + "\n"
    if format == "json":
        import json

        index = {n: i for i, n in enumerate(g.nodes)}
        doc = {
            "schema": "v1",
            "spec": g.spec_name,
            "family": g.family,
            "start_state": state_to_doc(g.start_state),
            "bag": [_op_doc(op) for op in g.bag],
            "nodes": [[_op_doc(op) for op in n] for n in g.nodes],
            "edges": [
                {
                    "a": index[a],
                    "b": index[b],
                    "labels": sorted(
                        (_op_doc(op) for op in e.labels),
                        key=lambda d: (d["template"], d["args"], d["id"]),
                    ),
                    "strong": sorted(
                        (_op_doc(op) for op in e.strong),
                        key=lambda d: (d["template"], d["args"], d["id"]),
                    ),
                }
                for (a, b), e in sorted(
                    g.edges.items(), key=lambda kv: (index[kv[0][0]], index[kv[0][1]])
                )
            ],
            "classes": len(classes(g)),
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    raise SpecError("unknown export format %r (dot or json)" % format)


def import_graph(text: str) -> IGraph:
    """Rebuild an IGraph from its JSON export."""
    import json

    from adjusted.seqspec import state_from_doc, catalog

    doc = json.loads(text)
    if doc.get("schema") != "v1":
        raise SpecError("unsupported graph schema %r" % doc.get("schema"))
    spec = catalog(doc["spec"])
    start = state_from_doc(spec, doc["start_state"])
    bag = tuple(_op_from_doc(d) for d in doc["bag"])
    nodes = [tuple(_op_from_doc(d) for d in n) for n in doc["nodes"]]
    edges = {}
    for e in doc["edges"]:
        a, b = nodes[e["a"]], nodes[e["b"]]
        edges[(a, b)] = EdgeLabel(
            frozenset(_op_from_doc(d) for d in e["labels"]),
            frozenset(_op_from_doc(d) for d in e["strong"]),
        )
    return IGraph(doc["spec"], doc["family"], start, bag, nodes, edges)
