"""Independent direct-definition oracles used to cross-check the analyzers.

Everything here is written straight from the definitions, with no code shared
with the implementation under test: graphs as dictionaries keyed by node
pairs, components by breadth-first search, movers by recomputing both
permutations from scratch, linearizability by enumerating every admissible
sequential order.  Slow on purpose — these run only on small instances.
"""

from __future__ import annotations

import itertools
from collections import deque

from adjusted.seqspec import BOTTOM, apply, state_key


def run_permutation(spec, state, perm):
    """Responses, post-op states, and final state of one sequential order."""
    responses = []
    states_after = []
    for op in perm:
        state, resp = apply(spec, state, op)
        responses.append(resp)
        states_after.append(state)
    return responses, states_after, state


def resp_key(resp):
    return state_key(resp)


def oracle_indist(spec, state, bag, x, y, op):
    """(indistinguishable, strong) for *op* between permutations x and y.

    Direct reading of the definition: the op answers identically in both
    orders, and some state reachable at-or-after the op in x is also
    reachable at-or-after it in y.  Strong additionally wants equal finals.
    """
    rx, sx, fx = run_permutation(spec, state, list(x))
    ry, sy, fy = run_permutation(spec, state, list(y))
    ix, iy = list(x).index(op), list(y).index(op)
    if resp_key(rx[ix]) != resp_key(ry[iy]):
        return False, False
    attain_x = {state_key(s) for s in sx[ix:]}
    attain_y = {state_key(s) for s in sy[iy:]}
    if not (attain_x & attain_y):
        return False, False
    return True, state_key(fx) == state_key(fy)


def oracle_edges(spec, state, bag):
    """Map unordered node pair -> (labels, strong labels), edges only."""
    nodes = list(itertools.permutations(bag))
    edges = {}
    for x, y in itertools.combinations(nodes, 2):
        labels, strong = set(), set()
        for op in bag:
            ok, st = oracle_indist(spec, state, bag, x, y, op)
            if ok:
                labels.add(op)
            if st:
                strong.add(op)
        if labels:
            edges[frozenset((x, y))] = (frozenset(labels), frozenset(strong))
    return edges


def oracle_classes(spec, state, bag):
    """Connected components (as frozensets of nodes) by BFS."""
    nodes = list(itertools.permutations(bag))
    edges = oracle_edges(spec, state, bag)
    adjacency = {n: [] for n in nodes}
    for pair in edges:
        a, b = tuple(pair)
        adjacency[a].append(b)
        adjacency[b].append(a)
    seen = set()
    parts = []
    for n in nodes:
        if n in seen:
            continue
        queue = deque([n])
        seen.add(n)
        part = {n}
        while queue:
            cur = queue.popleft()
            for other in adjacency[cur]:
                if other not in seen:
                    seen.add(other)
                    part.add(other)
                    queue.append(other)
        parts.append(frozenset(part))
    return parts


def _swap(perm, i):
    out = list(perm)
    out[i - 1], out[i] = out[i], out[i - 1]
    return tuple(out)


def oracle_left_moves(spec, state, bag, x, i):
    """Does x[i] move left across x[i-1]?  Recomputed from scratch."""
    assert i >= 1
    y = _swap(x, i)
    ok, strong = oracle_indist(spec, state, bag, tuple(x), y, x[i])
    return ok and strong


def oracle_right_moves(spec, state, bag, x, i):
    """Does x[i] (having a predecessor) sit one step right of an
    indistinguishable order?  The displaced predecessor must keep its answer
    and the common final state — i.e. x[i-1] strongly labels the swap edge."""
    assert i >= 1
    y = _swap(x, i)
    ok, strong = oracle_indist(spec, state, bag, tuple(x), y, x[i - 1])
    return ok and strong


# ---------------------------------------------------------------------------
# linearizability by exhaustive interleaving


def naive_linearizable(spec, ops):
    """Exhaustive-witness linearizability for a tiny recorded history.

    ``ops`` is a list of dicts with keys ``op`` (OpInstance), ``invoke``,
    ``respond`` (number or None while pending), ``resp`` (recorded response,
    meaningful only when completed).  Returns a witness sequence or None.

    Tries every permutation of every subset that contains all completed
    operations; a witness must respect real-time order (respond(a) <
    invoke(b) forces a before b) and replay to the recorded responses,
    completed ops exactly, included pending ops to any legal value.
    """
    completed = [o for o in ops if o["respond"] is not None]
    pending = [o for o in ops if o["respond"] is None]
    for take in range(len(pending) + 1):
        for extra in itertools.combinations(pending, take):
            chosen = completed + list(extra)
            for order in itertools.permutations(chosen):
                if _respects_realtime(order) and _replays(spec, order):
                    return order
    return None


def _respects_realtime(order):
    for later, a in enumerate(order):
        for b in order[later + 1:]:
            if b["respond"] is not None and b["respond"] < a["invoke"]:
                return False
    return True


def _replays(spec, order):
    state = spec.init_state
    for rec in order:
        state, resp = apply(spec, state, rec["op"])
        if rec["respond"] is not None and resp_key(resp) != resp_key(rec["resp"]):
            return False
    return True
