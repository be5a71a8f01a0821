"""Synthesis and verification of in-port oblivious forwarding patterns.

A connected graph admits a perfectly resilient in-port oblivious pattern exactly
when it has no simple cycle of four or more nodes, i.e. every cycle is a triangle.
One BFS from the target decides this: each link outside the BFS tree must join two
siblings, and no node may touch more than one such link.

In a feasible graph each node ``v`` has an *important* first choice, the link to its
BFS parent, and if ``v`` sits at the base of a triangle a second choice, the link to
its triangle partner.  Nothing else a node does is observable while it is still
connected to the target.
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass

from .errors import PatternError
from .model import (
    CombinatorialPattern,
    Graph,
    Instance,
    Link,
    NodeId,
    SkippingPattern,
    local_failure_sets,
    node_key,
    require_valid,
)
from .sim import query_pattern, route
from .verify import PERFECT, RESILIENT, Counterexample, Verdict, witness_problem


@dataclass(frozen=True)
class TriangleStructure:
    parent: dict  # node -> BFS parent; the target has none
    partner: dict  # node -> the other base node of its triangle, or None
    order: tuple  # nodes of the target's component in BFS order


@dataclass(frozen=True)
class LongCycleWitness:
    cycle: tuple  # >= 4 distinct nodes, consecutive ones (and last/first) adjacent


def _tree_path_to(parent: dict, v) -> list:
    path = [v]
    while parent.get(path[-1]) is not None:
        path.append(parent[path[-1]])
    return path


def _cycle_through(parent: dict, u, v) -> tuple:
    """Cycle formed by the non-tree link {u, v} and the tree paths to their common ancestor."""
    up_u = _tree_path_to(parent, u)
    up_v = _tree_path_to(parent, v)
    on_v = set(up_v)
    i = next(i for i, x in enumerate(up_u) if x in on_v)
    lca = up_u[i]
    j = up_v.index(lca)
    return tuple(up_u[: i + 1] + list(reversed(up_v[:j])))


def analyze_component(g: Graph, t: NodeId, probe: Counter | None = None) -> TriangleStructure | LongCycleWitness:
    """BFS from ``t`` deciding whether every cycle of its component is a triangle.

    ``probe``, when given, counts link inspections (used to check linearity).
    """
    g.check_node(t)
    parent = {t: None}
    order = [t]
    queue = deque([t])
    while queue:
        u = queue.popleft()
        for e in g.local(u):  # ascending neighbour order
            if probe is not None:
                probe["link"] += 1
            if e.is_loop:
                continue
            w = e.other(u)
            if w not in parent:
                parent[w] = u
                order.append(w)
                queue.append(w)

    partner = {v: None for v in order}
    done = set()
    for u in order:
        for e in g.local(u):
            if probe is not None:
                probe["link"] += 1
            if e.is_loop or e in done:
                continue
            w = e.other(u)
            if parent[u] == w or parent[w] == u:
                continue
            done.add(e)
            # off-tree link
            if parent[u] != parent[w]:
                return LongCycleWitness(_cycle_through(parent, u, w))
            for x, y in ((u, w), (w, u)):
                if partner[x] is not None:
                    # x already closes a triangle with partner[x]; both share x's parent
                    return LongCycleWitness((parent[x], partner[x], x, y))
            partner[u], partner[w] = w, u
    return TriangleStructure(parent, partner, tuple(order))


def important_entries(g: Graph, structure: TriangleStructure) -> dict:
    """node -> (primary link, secondary link or None) for every non-target node of the component."""
    out = {}
    for v in structure.order:
        p = structure.parent[v]
        if p is None:
            continue
        partner = structure.partner[v]
        out[v] = (Link.of(v, p), Link.of(v, partner) if partner is not None else None)
    return out


def _oblivious_row(g: Graph, v, lead: list[Link]) -> tuple[Link, ...]:
    rest = [e for e in g.local(v) if not e.is_loop and e not in lead]
    return tuple(lead + rest + [Link.loop(v)])


def synth_oblivious(g: Graph, t: NodeId) -> Instance | LongCycleWitness:
    """Perfectly resilient in-port oblivious skipping pattern for ``g``, or why none exists."""
    found = analyze_component(g, t)
    if isinstance(found, LongCycleWitness):
        return found
    entries = important_entries(g, found)
    rows = {}
    for v in g.nodes:
        lead = [e for e in entries.get(v, ()) if e is not None]
        row = _oblivious_row(g, v, lead)
        for e in g.local(v):
            rows[(v, e)] = row
    return Instance(g, t, SkippingPattern(rows))


def is_inport_oblivious(p, g: Graph | None = None) -> bool:
    """True when no node's decision depends on the in-port.

    Skipping patterns must repeat the same list for every in-port of a node.
    Combinatorial patterns are compared decision by decision over every failed set,
    which needs the graph.
    """
    if isinstance(p, SkippingPattern):
        first = {}
        for (v, _), row in p.rows.items():
            if first.setdefault(v, row) != row:
                return False
        return True
    if isinstance(p, CombinatorialPattern):
        if g is None:
            raise ValueError("combinatorial patterns need the graph to check in-port obliviousness")
        inports: dict = {}
        for v, e, _ in p.rules:
            inports.setdefault(v, set()).add(e)
        for v, e in p.defaults:
            inports.setdefault(v, set()).add(e)
        for v, ports in inports.items():
            ports = sorted(ports)
            for failed in local_failure_sets(g, v):
                choices = set()
                for e in ports:
                    try:
                        choices.add(p.next_link(v, e, failed))
                    except PatternError:
                        choices.add(None)
                if len(choices) > 1:
                    return False
        return True
    raise TypeError(f"unknown pattern type {type(p).__name__}")


def _probe_sets(g: Graph, v, pattern, primary: Link, secondary: Link | None):
    """Local failed sets at which ``v``'s important decisions are checked."""
    if isinstance(pattern, SkippingPattern):
        # the first active entry decides, so these two sets expose any wrong prefix
        yield frozenset()
        if secondary is not None:
            yield frozenset([primary])
        return
    for failed in local_failure_sets(g, v):
        if primary not in failed or (secondary is not None and secondary not in failed):
            yield failed


def _trap(g: Graph, v, local_failed: frozenset, chosen: Link) -> frozenset:
    """Failure scenario that bounces the packet between ``v`` and the node it wrongly picked."""
    failed = set(local_failed)
    if not chosen.is_loop:
        w = chosen.other(v)
        failed.update(e for e in g.local(w) if not e.is_loop and e != chosen)
    return frozenset(failed)


def _certificate(inst: Instance, source, failed: frozenset) -> Counterexample:
    problem = witness_problem(inst, source, failed, PERFECT)
    if problem is not None:
        raise AssertionError(f"constructed witness at {source!r} is invalid: {problem}")
    return Counterexample(source, failed, route(inst, source, failed), PERFECT)


def _long_cycle_certificate(inst: Instance, cycle: tuple) -> Counterexample:
    g, t = inst.graph, inst.target
    dist = {t: 0}
    queue = deque([t])
    while queue:
        u = queue.popleft()
        for w in g.neighbors(u):
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    k = min(range(len(cycle)), key=lambda i: (dist[cycle[i]], node_key(cycle[i])))
    c = cycle[k:] + cycle[:k]
    # c[0] is the cycle node closest to t, so c[1] and c[3] reach t avoiding each other and c[2]
    s, a, b = c[2], c[1], c[3]
    keep = {g.link(s, a), g.link(s, b)}
    local_failed = frozenset(e for e in g.local(s) if not e.is_loop and e not in keep)
    chosen = query_pattern(inst.pattern, s, Link.loop(s), local_failed)
    return _certificate(inst, s, _trap(g, s, local_failed, chosen))


def verify_oblivious(inst: Instance) -> Verdict:
    """Decide perfect resilience of an in-port oblivious pattern in one pass over the graph."""
    g, t, p = inst.graph, inst.target, inst.pattern
    require_valid(inst)
    if not is_inport_oblivious(p, g):
        raise PatternError("pattern is not in-port oblivious")
    found = analyze_component(g, t)
    if isinstance(found, LongCycleWitness):
        return Verdict(_long_cycle_certificate(inst, found.cycle))
    for v, (primary, secondary) in important_entries(g, found).items():
        inport = Link.loop(v)
        for failed in _probe_sets(g, v, p, primary, secondary):
            expected = primary if primary not in failed else secondary
            chosen = query_pattern(p, v, inport, failed)
            if chosen != expected:
                return Verdict(_certificate(inst, v, _trap(g, v, failed, chosen)))
    return RESILIENT
