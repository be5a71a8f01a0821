"""Graphs, links and forwarding patterns.

Every node carries an implicit self-loop which models packet injection and can
never fail.  Links are unordered node pairs kept in a canonical (sorted) form so
``Link.of(u, v) == Link.of(v, u)``.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Hashable, Iterable, Iterator, Mapping, NamedTuple, Sequence, Union

from .errors import GraphError, PatternError

NodeId = Hashable


@lru_cache(maxsize=None)
def node_key(v: NodeId) -> tuple:
    """Sort key for node ids: integers first, then strings in natural order (v2 < v10)."""
    if isinstance(v, int) and not isinstance(v, bool):
        return (0, v)
    s = str(v)
    parts = re.split(r"(\d+)", s)
    return (1, tuple(int(p) if i % 2 else p for i, p in enumerate(parts)), s)


class Link(NamedTuple):
    a: NodeId
    b: NodeId

    @classmethod
    def of(cls, u: NodeId, v: NodeId) -> "Link":
        if node_key(v) < node_key(u):
            u, v = v, u
        return cls(u, v)

    @classmethod
    def loop(cls, v: NodeId) -> "Link":
        return cls(v, v)

    @property
    def is_loop(self) -> bool:
        return self.a == self.b

    def other(self, v: NodeId) -> NodeId:
        if v == self.a:
            return self.b
        if v == self.b:
            return self.a
        raise GraphError(f"{v!r} is not an endpoint of {self}")

    def sort_key(self) -> tuple:
        return (node_key(self.a), node_key(self.b))

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __le__(self, other):
        return self.sort_key() <= other.sort_key()

    def __gt__(self, other):
        return self.sort_key() > other.sort_key()

    def __ge__(self, other):
        return self.sort_key() >= other.sort_key()

    def __str__(self):
        if self.is_loop:
            return "{%s}" % (self.a,)
        return "{%s,%s}" % (self.a, self.b)


FailureScenario = frozenset  # frozenset[Link], never containing a self-loop


class Graph:
    """Undirected simple graph with one self-loop per node.

    Immutable after construction.  ``local(v)`` lists the links incident to ``v``
    (self-loop included) in ascending canonical order.
    """

    __slots__ = ("nodes", "links", "_local", "_nodeset")

    def __init__(self, nodes: Iterable[NodeId], edges: Iterable[tuple[NodeId, NodeId]] = ()):
        nodes = list(nodes)
        nodeset = set()
        for v in nodes:
            if v in nodeset:
                raise GraphError(f"duplicate node id {v!r}")
            nodeset.add(v)
        local: dict[NodeId, list[Link]] = {v: [Link.loop(v)] for v in nodes}
        links = {Link.loop(v) for v in nodes}
        for u, v in edges:
            for x in (u, v):
                if x not in nodeset:
                    raise GraphError(f"edge {u!r}-{v!r} has unknown endpoint {x!r}")
            if u == v:
                raise GraphError(f"self-loop {u!r}-{v!r} must not be listed; self-loops are implicit")
            link = Link.of(u, v)
            if link in links:
                raise GraphError(f"duplicate edge {u!r}-{v!r}")
            links.add(link)
            local[u].append(link)
            local[v].append(link)
        self.nodes: tuple[NodeId, ...] = tuple(sorted(nodes, key=node_key))
        self.links: tuple[Link, ...] = tuple(sorted(links))
        self._local = {v: tuple(sorted(ls)) for v, ls in local.items()}
        self._nodeset = frozenset(nodeset)

    def __contains__(self, v) -> bool:
        return v in self._nodeset

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.nodes == other.nodes and self.links == other.links

    def __hash__(self):
        return hash((self.nodes, self.links))

    def __repr__(self):
        return f"Graph({len(self.nodes)} nodes, {len(self.edges)} edges)"

    def check_node(self, v: NodeId) -> None:
        if v not in self._nodeset:
            raise GraphError(f"unknown node {v!r}")

    def local(self, v: NodeId) -> tuple[Link, ...]:
        try:
            return self._local[v]
        except (KeyError, TypeError):
            raise GraphError(f"unknown node {v!r}") from None

    def neighbors(self, v: NodeId) -> list[NodeId]:
        return [e.other(v) for e in self.local(v) if not e.is_loop]

    def degree(self, v: NodeId) -> int:
        return len(self.local(v)) - 1

    @property
    def edges(self) -> tuple[Link, ...]:
        """Non-loop links in canonical order."""
        return tuple(e for e in self.links if not e.is_loop)

    def has_link(self, link: Link) -> bool:
        return link.a in self._nodeset and link in self._local[link.a]

    def link(self, u: NodeId, v: NodeId) -> Link:
        link = Link.of(u, v)
        if not self.has_link(link):
            raise GraphError(f"no link between {u!r} and {v!r}")
        return link


def build_graph(nodes: Iterable[NodeId], edges: Iterable[tuple[NodeId, NodeId]]) -> Graph:
    return Graph(nodes, edges)


def local_links(g: Graph, v: NodeId) -> tuple[Link, ...]:
    return g.local(v)


def check_failures(g: Graph, failed: Iterable[Link]) -> FailureScenario:
    """Return ``failed`` as a frozenset after checking it is a valid failure scenario for ``g``."""
    out = set()
    for e in failed:
        e = Link.of(*e)
        if e.is_loop:
            raise GraphError(f"self-loop {e} cannot fail")
        if not g.has_link(e):
            raise GraphError(f"failed link {e} is not a link of the graph")
        out.add(e)
    return frozenset(out)


def component(g: Graph, failed: frozenset, start: NodeId) -> set:
    """Nodes reachable from ``start`` over active links."""
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for e in g.local(u):
            if e.is_loop or e in failed:
                continue
            w = e.other(u)
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def is_connected(g: Graph, failed: Iterable[Link], u: NodeId, v: NodeId) -> bool:
    g.check_node(u)
    g.check_node(v)
    failed = check_failures(g, failed)
    return v in component(g, failed, u)


def _max_flow_unit(g: Graph, s: NodeId, t: NodeId, limit: int | None = None) -> int:
    # Residual capacity per directed arc; each undirected link contributes 1 each way.
    residual: dict[tuple, int] = {}
    for e in g.edges:
        residual[(e.a, e.b)] = 1
        residual[(e.b, e.a)] = 1
    adj = {v: g.neighbors(v) for v in g.nodes}
    flow = 0
    while limit is None or flow < limit:
        prev = {s: None}
        queue = deque([s])
        while queue and t not in prev:
            u = queue.popleft()
            for w in adj[u]:
                if w not in prev and residual[(u, w)] > 0:
                    prev[w] = u
                    queue.append(w)
        if t not in prev:
            break
        w = t
        while prev[w] is not None:
            u = prev[w]
            residual[(u, w)] -= 1
            residual[(w, u)] += 1
            w = u
        flow += 1
    return flow


def edge_connectivity(g: Graph) -> int:
    """Global link connectivity: the fewest link failures that disconnect ``g``.

    Returns 0 for a disconnected graph.  Self-loops are ignored.
    """
    if len(g.nodes) < 2:
        raise GraphError("edge connectivity is undefined for a single-node graph")
    s0 = g.nodes[0]
    best = min(g.degree(v) for v in g.nodes)
    for v in g.nodes[1:]:
        best = min(best, _max_flow_unit(g, s0, v, limit=best))
        if best == 0:
            break
    return best


# -- forwarding patterns ---------------------------------------------------


@dataclass(frozen=True)
class SkippingPattern:
    """Priority list per (node, in-port); the first active entry is taken."""

    rows: Mapping[tuple[NodeId, Link], tuple[Link, ...]]

    def next_link(self, v: NodeId, inport: Link, local_failed: frozenset) -> Link:
        try:
            row = self.rows[(v, inport)]
        except KeyError:
            raise PatternError(f"no priority list for node {v!r}, in-port {inport}") from None
        for e in row:
            if e not in local_failed:
                return e
        raise PatternError(f"every entry of the priority list at {v!r}, in-port {inport} has failed")

    def row(self, v: NodeId, inport: Link) -> tuple[Link, ...]:
        return self.rows[(v, inport)]


@dataclass(frozen=True)
class CombinatorialPattern:
    """Explicit table keyed by (node, in-port, failed incident links).

    Keys missing from ``rules`` fall back to the per-(node, in-port) priority list in
    ``defaults`` if one exists.
    """

    rules: Mapping[tuple[NodeId, Link, frozenset], Link]
    defaults: Mapping[tuple[NodeId, Link], tuple[Link, ...]] = field(default_factory=dict)

    def next_link(self, v: NodeId, inport: Link, local_failed: frozenset) -> Link:
        choice = self.rules.get((v, inport, frozenset(local_failed)))
        if choice is not None:
            return choice
        row = self.defaults.get((v, inport))
        if row is None:
            raise PatternError(
                f"no rule for node {v!r}, in-port {inport}, failed {fmt_links(local_failed)} and no default"
            )
        for e in row:
            if e not in local_failed:
                return e
        raise PatternError(f"default list at {v!r}, in-port {inport} has no active entry")


ForwardingPattern = Union[SkippingPattern, CombinatorialPattern]


@dataclass(frozen=True)
class Instance:
    graph: Graph
    target: NodeId
    pattern: ForwardingPattern


@dataclass(frozen=True)
class Violation:
    node: NodeId
    inport: Link | None
    message: str

    def __str__(self):
        where = f"node {self.node}" if self.inport is None else f"node {self.node}, in-port {self.inport}"
        return f"{where}: {self.message}"


def fmt_links(links: Iterable[Link]) -> str:
    return "{" + ", ".join(str(e) for e in sorted(links)) + "}"


def local_failure_sets(g: Graph, v: NodeId) -> Iterator[frozenset]:
    """Every subset of ``v``'s non-loop links, by size then canonical order."""
    real = [e for e in g.local(v) if not e.is_loop]
    for k in range(len(real) + 1):
        for combo in combinations(real, k):
            yield frozenset(combo)


def _check_priority_list(g: Graph, v, inport, row: Sequence[Link], what: str) -> list[Violation]:
    local = g.local(v)
    if len(row) != len(local) or set(row) != set(local):
        return [Violation(v, inport, f"{what} is not a permutation of the incident links")]
    return []


def validate_pattern(inst: Instance) -> list[Violation]:
    """Structural checks on ``inst``; an empty list means the instance is valid.

    Rows of the target node, and rows for in-ports leading from the target, are
    optional: routing stops at the target, so they are never consulted.
    """
    g, p = inst.graph, inst.pattern
    if inst.target not in g:
        return [Violation(inst.target, None, "target is not a node of the graph")]
    out: list[Violation] = []
    if isinstance(p, SkippingPattern):
        for (v, e), row in p.rows.items():
            if v not in g:
                out.append(Violation(v, e, "row for unknown node"))
            elif e not in g.local(v):
                out.append(Violation(v, e, "in-port is not incident to the node"))
            else:
                out += _check_priority_list(g, v, e, row, "priority list")
        for v in g.nodes:
            if v == inst.target:
                continue
            for e in g.local(v):
                if inst.target in e:
                    continue
                if (v, e) not in p.rows:
                    out.append(Violation(v, e, "missing priority list"))
    elif isinstance(p, CombinatorialPattern):
        listed: dict[tuple, int] = {}
        for (v, e, failed), choice in p.rules.items():
            if v not in g:
                out.append(Violation(v, e, "rule for unknown node"))
                continue
            local = g.local(v)
            if e not in local:
                out.append(Violation(v, e, "in-port is not incident to the node"))
                continue
            if any(f not in local or f.is_loop for f in failed):
                out.append(Violation(v, e, f"failed set {fmt_links(failed)} is not a set of incident links"))
                continue
            if choice not in local:
                out.append(Violation(v, e, f"chose non-incident link {choice}"))
            elif choice in failed:
                out.append(Violation(v, e, f"chose failed link {choice} for failed set {fmt_links(failed)}"))
            listed[(v, e)] = listed.get((v, e), 0) + 1
        for (v, e), row in p.defaults.items():
            if v not in g:
                out.append(Violation(v, e, "default for unknown node"))
            elif e not in g.local(v):
                out.append(Violation(v, e, "in-port is not incident to the node"))
            else:
                out += _check_priority_list(g, v, e, row, "default list")
        for v in g.nodes:
            if v == inst.target:
                continue
            full = 2 ** g.degree(v)
            for e in g.local(v):
                if inst.target in e:
                    continue
                if (v, e) not in p.defaults and listed.get((v, e), 0) < full:
                    out.append(Violation(v, e, "table does not cover every failed set and has no default"))
    else:
        out.append(Violation(inst.target, None, f"unknown pattern type {type(p).__name__}"))
    return out


def require_valid(inst: Instance) -> None:
    problems = validate_pattern(inst)
    if problems:
        raise PatternError("invalid instance: " + "; ".join(map(str, problems[:5])))
