"""Deterministic packet routing under a fixed failure scenario.

A routing state is the pair (in-port, node).  Forwarding is a function of the state
and the failed links at the node, so the walk either reaches the target or revisits
a state, at which point it loops forever.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .errors import PatternError
from .model import ForwardingPattern, Instance, Link, NodeId, check_failures


class RoutingState(NamedTuple):
    inport: Link
    node: NodeId


@dataclass(frozen=True)
class Trace:
    nodes: tuple
    delivered: bool
    repeat_index: int | None = None  # first position of the repeated state when looping

    @property
    def looped(self) -> bool:
        return not self.delivered

    @property
    def cycle(self) -> tuple:
        """Nodes of the repeating segment (empty for delivered traces)."""
        if self.delivered:
            return ()
        return self.nodes[self.repeat_index : -1]

    def __str__(self):
        path = " ".join(map(str, self.nodes))
        return f"{path} (delivered)" if self.delivered else f"{path} (loop from position {self.repeat_index})"


def query_pattern(p: ForwardingPattern, v: NodeId, inport: Link, local_failed: Iterable[Link]) -> Link:
    """Outgoing link chosen by ``p`` at ``v`` for a packet arriving on ``inport``."""
    local_failed = frozenset(local_failed)
    choice = p.next_link(v, inport, local_failed)
    if choice in local_failed:
        raise PatternError(f"pattern chose failed link {choice} at node {v!r}")
    if v not in choice:
        raise PatternError(f"pattern chose link {choice} not incident to node {v!r}")
    return choice


def states(trace: Trace, source: NodeId) -> list[RoutingState]:
    """Routing states visited by ``trace``, one per position."""
    out = [RoutingState(Link.loop(source), source)]
    for prev, cur in zip(trace.nodes, trace.nodes[1:]):
        out.append(RoutingState(Link.of(prev, cur), cur))
    return out


def route(inst: Instance, source: NodeId, failed: Iterable[Link] = ()) -> Trace:
    g, t, p = inst.graph, inst.target, inst.pattern
    g.check_node(source)
    failed = check_failures(g, failed)
    node, inport = source, Link.loop(source)
    nodes = [source]
    seen = {RoutingState(inport, node): 0}
    while node != t:
        local_failed = failed.intersection(g.local(node))
        out = query_pattern(p, node, inport, local_failed)
        node, inport = out.other(node), out
        nodes.append(node)
        if node == t:
            break
        state = RoutingState(inport, node)
        if state in seen:
            return Trace(tuple(nodes), False, seen[state])
        seen[state] = len(nodes) - 1
    return Trace(tuple(nodes), True)
