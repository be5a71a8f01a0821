"""Perfect and ideal resilience checks with re-checkable counterexamples.

Two engines are provided.  The exhaustive one enumerates failure scenarios.  The
lazy one simulates the packet and only decides the status of a link when the
forwarding pattern actually looks at it, branching active/failed at that point.
"""

from __future__ import annotations

import logging
from concurrent.futures import FIRST_COMPLETED, ProcessPoolExecutor, wait
from dataclasses import dataclass
from itertools import combinations
from math import comb
from typing import Callable, Iterable

from .errors import FrrError, GraphError, PatternError, SizeGuardError
from .model import (
    Instance,
    Link,
    NodeId,
    SkippingPattern,
    check_failures,
    component,
    edge_connectivity,
    require_valid,
)
from .sim import RoutingState, Trace, query_pattern, route

log = logging.getLogger(__name__)

PERFECT = "perfect"
IDEAL = "ideal"

DEFAULT_MAX_SCENARIOS = 2**20


@dataclass(frozen=True)
class Counterexample:
    source: NodeId
    failed: frozenset
    trace: Trace
    mode: str = PERFECT
    budget: int | None = None


@dataclass(frozen=True)
class Verdict:
    counterexample: Counterexample | None = None

    @property
    def resilient(self) -> bool:
        return self.counterexample is None

    def __bool__(self):
        return self.resilient


RESILIENT = Verdict()


def witness_problem(
    inst: Instance, source: NodeId, failed: Iterable, mode: str = PERFECT, budget: int | None = None
) -> str | None:
    """Why (source, failed) is not a valid non-resilience witness, or None if it is."""
    g = inst.graph
    try:
        failed = check_failures(g, failed)
        trace = route(inst, source, failed)
    except FrrError as exc:
        return str(exc)
    if trace.delivered:
        return "packet is delivered"
    if mode == PERFECT:
        if inst.target not in component(g, failed, source):
            return "source is not connected to the target"
    elif mode == IDEAL:
        if budget is None or budget < 0:
            return "ideal mode needs a non-negative failure budget"
        if len(failed) > budget:
            return f"{len(failed)} failed links exceed the budget of {budget}"
    else:
        return f"unknown mode {mode!r}"
    return None


def check_witness(
    inst: Instance, source: NodeId, failed: Iterable, mode: str = PERFECT, budget: int | None = None
) -> bool:
    problem = witness_problem(inst, source, failed, mode, budget)
    if problem is not None:
        log.debug("witness rejected: %s", problem)
    return problem is None


def check_counterexample(inst: Instance, cex: Counterexample) -> bool:
    """Witness check plus exact reproduction of the recorded trace."""
    if not check_witness(inst, cex.source, cex.failed, cex.mode, cex.budget):
        return False
    return route(inst, cex.source, cex.failed) == cex.trace


def _chooser(inst: Instance) -> Callable[[NodeId, Link, frozenset], Link]:
    g, p = inst.graph, inst.pattern
    if isinstance(p, SkippingPattern):
        rows = p.rows

        def choose(node, inport, failed):
            # the self-loop is never in ``failed``, so a complete row always yields
            for e in rows[(node, inport)]:
                if e not in failed:
                    return e

        return choose

    def choose(node, inport, failed):
        return query_pattern(p, node, inport, failed.intersection(g.local(node)))

    return choose


def _first_looping_source(inst: Instance, failed: frozenset, sources: Iterable, choose) -> NodeId | None:
    t = inst.target
    memo: dict[tuple, bool] = {}
    for s in sources:
        state = (Link.loop(s), s)
        path, on_path = [], set()
        while True:
            if state in memo:
                delivered = memo[state]
                break
            if state in on_path:
                delivered = False
                break
            node = state[1]
            if node == t:
                delivered = True
                break
            path.append(state)
            on_path.add(state)
            out = choose(node, state[0], failed)
            state = (out, out.other(node))
        for st in path:
            memo[st] = delivered
        if not delivered:
            return s
    return None


def _sources(inst: Instance, sources: Iterable | None = None) -> list:
    if sources is None:
        return [v for v in inst.graph.nodes if v != inst.target]
    sources = list(sources)
    for v in sources:
        inst.graph.check_node(v)
    wanted = set(sources)
    return [v for v in inst.graph.nodes if v in wanted and v != inst.target]


def _scenario_count(n_links: int, max_size: int) -> int:
    return sum(comb(n_links, k) for k in range(min(n_links, max_size) + 1))


def _exhaustive(inst: Instance, max_size: int, mode: str, budget, max_scenarios: int, sources=None) -> Verdict:
    g, t = inst.graph, inst.target
    edges = g.edges
    count = _scenario_count(len(edges), max_size)
    if count > max_scenarios:
        raise SizeGuardError(f"{count} failure scenarios exceed the limit of {max_scenarios}")
    choose = _chooser(inst)
    sources = _sources(inst, sources)
    for k in range(min(len(edges), max_size) + 1):
        for combo in combinations(edges, k):
            failed = frozenset(combo)
            if mode == PERFECT:
                reach = component(g, failed, t)
                candidates = [v for v in sources if v in reach]
            else:
                candidates = sources
            s = _first_looping_source(inst, failed, candidates, choose)
            if s is not None:
                return Verdict(Counterexample(s, failed, route(inst, s, failed), mode, budget))
    return RESILIENT


def verify_perfect_exhaustive(
    inst: Instance, max_scenarios: int = DEFAULT_MAX_SCENARIOS, sources: Iterable | None = None
) -> Verdict:
    """Try every failure scenario (by size, then lexicographically) and every connected source.

    ``sources`` restricts the injection points (default: every node).
    """
    require_valid(inst)
    return _exhaustive(inst, len(inst.graph.edges), PERFECT, None, max_scenarios, sources)


def search_source(inst: Instance, source: NodeId, budget: int | None = None) -> Counterexample | None:
    """Lazy counterexample search for packets injected at ``source``.

    With ``budget`` None the search is for perfect resilience: a loop only counts if
    the source stays connected to the target when every undecided link is active.
    Otherwise at most ``budget`` links may be failed and any loop counts.
    """
    g, t, p = inst.graph, inst.target, inst.pattern
    if source == t:
        return None
    skipping = isinstance(p, SkippingPattern)
    perfect = budget is None
    start = RoutingState(Link.loop(source), source)
    # frame: link status (True active / False failed), trace, state -> position, state, failures used
    stack = [({}, [source], {start: 0}, start, 0)]
    while stack:
        status, nodes, seen, state, used = stack.pop()
        while True:
            inport, node = state
            if skipping:
                try:
                    row = p.rows[(node, inport)]
                except KeyError:
                    raise PatternError(f"no priority list for node {node!r}, in-port {inport}") from None
                for choice in row:
                    if choice.is_loop:
                        break
                    known = status.get(choice)
                    if known is None:
                        if perfect or used < budget:
                            branch = dict(status)
                            branch[choice] = False
                            stack.append((branch, list(nodes), dict(seen), state, used + 1))
                        status[choice] = True
                        break
                    if known:
                        break
            else:
                for e in g.local(node):
                    if e.is_loop or e in status:
                        continue
                    if perfect or used < budget:
                        branch = dict(status)
                        branch[e] = False
                        stack.append((branch, list(nodes), dict(seen), state, used + 1))
                    status[e] = True
                local_failed = frozenset(e for e in g.local(node) if status.get(e) is False)
                choice = query_pattern(p, node, inport, local_failed)
            nxt = choice.other(node)
            nodes.append(nxt)
            if nxt == t:
                break
            state = RoutingState(choice, nxt)
            if state in seen:
                failed = frozenset(e for e, active in status.items() if not active)
                if perfect and t not in component(g, failed, source):
                    break
                trace = Trace(tuple(nodes), False, seen[state])
                mode = PERFECT if perfect else IDEAL
                return Counterexample(source, failed, trace, mode, budget)
            seen[state] = len(nodes) - 1
    return None


def _search_task(args):
    inst, source, budget = args
    return search_source(inst, source, budget)


def _search_all(inst: Instance, budget: int | None, workers: int, sources=None) -> Verdict:
    sources = _sources(inst, sources)
    if workers <= 1 or len(sources) <= 1:
        for s in sources:
            cex = search_source(inst, s, budget)
            if cex is not None:
                return Verdict(cex)
        return RESILIENT
    # first counterexample to finish wins; which one that is depends on scheduling
    with ProcessPoolExecutor(max_workers=workers) as pool:
        pending = {pool.submit(_search_task, (inst, s, budget)) for s in sources}
        while pending:
            done, pending = wait(pending, return_when=FIRST_COMPLETED)
            for fut in done:
                cex = fut.result()
                if cex is not None:
                    for other in pending:
                        other.cancel()
                    return Verdict(cex)
    return RESILIENT


def verify_perfect_lazy(inst: Instance, workers: int = 1, sources: Iterable | None = None) -> Verdict:
    require_valid(inst)
    return _search_all(inst, None, workers, sources)


def verify_perfect(inst: Instance, engine: str = "lazy", **kwargs) -> Verdict:
    if engine == "lazy":
        return verify_perfect_lazy(inst, **kwargs)
    if engine == "exhaustive":
        return verify_perfect_exhaustive(inst, **kwargs)
    raise ValueError(f"unknown engine {engine!r}")


def verify_ideal(
    inst: Instance,
    budget: int | None = None,
    engine: str = "lazy",
    max_scenarios: int = DEFAULT_MAX_SCENARIOS,
    workers: int = 1,
    sources: Iterable | None = None,
) -> Verdict:
    """Check delivery from every node under every scenario of at most ``budget`` failures.

    ``budget`` defaults to the link connectivity of the graph minus one.
    """
    require_valid(inst)
    g = inst.graph
    if budget is not None and budget < 0:
        raise ValueError("budget must be non-negative")
    if len(component(g, frozenset(), inst.target)) != len(g.nodes):
        raise GraphError("ideal resilience needs a connected graph")
    if budget is None:
        budget = edge_connectivity(g) - 1 if len(g.nodes) > 1 else 0
    if engine == "exhaustive":
        return _exhaustive(inst, budget, IDEAL, budget, max_scenarios, sources)
    if engine != "lazy":
        raise ValueError(f"unknown engine {engine!r}")
    return _search_all(inst, budget, workers, sources)

