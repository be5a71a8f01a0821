"""Brute-force reference implementations.

Deliberately naive and independent of the package internals: plain dicts of
neighbour names, bitmask scenario enumeration, exhaustive cycle search.
"""

from itertools import combinations, product


def adjacency(nodes, edges):
    adj = {v: set() for v in nodes}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    return adj


def reachable(adj, start, dead=frozenset()):
    """Nodes reachable from ``start``; ``dead`` holds failed links as frozensets {a, b}."""
    seen = {start}
    todo = [start]
    while todo:
        u = todo.pop()
        for w in adj[u]:
            if w not in seen and frozenset((u, w)) not in dead:
                seen.add(w)
                todo.append(w)
    return seen


def has_long_cycle(nodes, edges, t):
    """Is there a simple cycle of length >= 4 among the nodes reachable from t?"""
    adj = adjacency(nodes, edges)
    comp = reachable(adj, t)
    order = sorted(comp, key=repr)
    rank = {v: i for i, v in enumerate(order)}

    # cycles are found from their lowest-ranked node only
    def dfs(start, u, depth, visited):
        for w in adj[u]:
            if w == start and depth >= 4:
                return True
            if w in visited or rank[w] < rank[start]:
                continue
            visited.add(w)
            if dfs(start, w, depth + 1, visited):
                return True
            visited.discard(w)
        return False

    return any(dfs(s, s, 1, {s}) for s in order)


def min_cut_by_bipartition(nodes, edges):
    """Global min cut: try every split with nodes[0] on one side."""
    nodes = list(nodes)
    first, rest = nodes[0], nodes[1:]
    best = None
    for bits in product((0, 1), repeat=len(rest)):
        if not any(bits):
            continue
        side = {first} | {v for v, b in zip(rest, bits) if b == 0}
        cut = sum(1 for a, b in edges if (a in side) != (b in side))
        best = cut if best is None else min(best, cut)
    return best


def min_cut_by_link_subsets(nodes, edges):
    """Fewest links whose removal disconnects the graph (0 if already disconnected)."""
    adj = adjacency(nodes, edges)
    nodes = list(nodes)
    for k in range(len(edges) + 1):
        for dead in combinations(edges, k):
            dead = {frozenset(e) for e in dead}
            if len(reachable(adj, nodes[0], dead)) < len(nodes):
                return k
    return len(edges)


def walk(table, t, source, dead):
    """Route on a raw table {(node, inport_name): [names]}; the self-loop is named by the node.

    Returns (node sequence, delivered).
    """
    node, inport = source, source
    nodes = [source]
    seen = {(inport, node)}
    while node != t:
        for w in table[(node, inport)]:
            if w == node or frozenset((node, w)) not in dead:
                break
        if w == node:
            inport = node
        else:
            node, inport = w, node
        nodes.append(node)
        if node == t:
            return nodes, True
        if (inport, node) in seen:
            return nodes, False
        seen.add((inport, node))
    return nodes, True


def perfectly_resilient(nodes, edges, t, table):
    """Exhaustive check over every scenario and every connected source."""
    adj = adjacency(nodes, edges)
    for k in range(len(edges) + 1):
        for dead in combinations(edges, k):
            dead = {frozenset(e) for e in dead}
            comp = reachable(adj, t, dead)
            for s in nodes:
                if s != t and s in comp and not walk(table, t, s, dead)[1]:
                    return False
    return True


def satisfiable(num_vars, clauses):
    for bits in product((False, True), repeat=num_vars):
        if all(any(bits[abs(x) - 1] == (x > 0) for x in c) for c in clauses):
            return True
    return False


def table_of(inst):
    """Raw name table of a skipping instance, for ``walk``."""
    out = {}
    for (v, e), row in inst.pattern.rows.items():
        out[(v, e.other(v))] = [f.other(v) for f in row]
    return out
