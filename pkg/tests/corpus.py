"""Graph and formula corpora for the property and acceptance tests."""

import random
from itertools import combinations, permutations, product

from frr.gadgets import CnfFormula
from frr.model import Graph, Instance, Link, SkippingPattern


def random_connected_graph(rng: random.Random, max_nodes=7, max_edges=None):
    """Random spanning tree plus a random number of extra links; nodes are 0..n-1."""
    n = rng.randint(2, max_nodes)
    nodes = list(range(n))
    perm = nodes[:]
    rng.shuffle(perm)
    edges = set()
    for i in range(1, n):
        a, b = perm[i], perm[rng.randrange(i)]
        edges.add((min(a, b), max(a, b)))
    spare = [e for e in combinations(nodes, 2) if e not in edges]
    room = len(spare) if max_edges is None else max(0, min(len(spare), max_edges - len(edges)))
    # bias toward sparse graphs so that triangle-only graphs show up often
    extra = min(room, int(rng.expovariate(0.5)))
    edges.update(rng.sample(spare, extra))
    return nodes, sorted(edges)


def all_connected_graphs(max_nodes=5):
    """Every labelled connected graph on 2..max_nodes nodes."""
    for n in range(2, max_nodes + 1):
        nodes = list(range(n))
        pairs = list(combinations(nodes, 2))
        for mask in range(1 << len(pairs)):
            edges = [p for i, p in enumerate(pairs) if mask >> i & 1]
            if _connected(nodes, edges):
                yield nodes, edges


def _connected(nodes, edges):
    adj = {v: [] for v in nodes}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    seen = {nodes[0]}
    todo = [nodes[0]]
    while todo:
        for w in adj[todo.pop()]:
            if w not in seen:
                seen.add(w)
                todo.append(w)
    return len(seen) == len(nodes)


def random_skipping_instance(rng: random.Random, max_nodes=7, max_edges=10):
    nodes, edges = random_connected_graph(rng, max_nodes, max_edges)
    g = Graph(nodes, edges)
    t = rng.choice(nodes)
    rows = {}
    for v in g.nodes:
        for e in g.local(v):
            row = list(g.local(v))
            rng.shuffle(row)
            rows[(v, e)] = tuple(row)
    return Instance(g, t, SkippingPattern(rows))


def with_rows(inst: Instance, rows: dict) -> Instance:
    """Same instance with some rows replaced; ``rows`` maps node -> row for every in-port."""
    new = dict(inst.pattern.rows)
    for v, row in rows.items():
        for e in inst.graph.local(v):
            new[(v, e)] = tuple(row)
    return Instance(inst.graph, inst.target, SkippingPattern(new))


def _canonical_formula(n, clauses):
    """Smallest image under variable renaming and per-variable polarity flips."""
    best = None
    for perm in permutations(range(n)):
        for flips in product((1, -1), repeat=n):
            img = tuple(
                tuple(flips[abs(x) - 1] * (1 if x > 0 else -1) * (perm[abs(x) - 1] + 1) for x in c) for c in clauses
            )
            if best is None or img < best:
                best = img
    return best


def small_formulas(max_vars=2, max_clauses=2):
    """Every 3-CNF with n <= max_vars, m <= max_clauses, one per symmetry class.

    Symmetries are variable renamings and polarity flips.  Clause order and literal
    positions are kept since the gadgets depend on them.
    """
    out = []
    for n in range(1, max_vars + 1):
        lits = [x for i in range(1, n + 1) for x in (i, -i)]
        clauses = list(product(lits, repeat=3))
        for m in range(1, max_clauses + 1):
            seen = set()
            for combo in product(clauses, repeat=m):
                key = _canonical_formula(n, combo)
                if key in seen:
                    continue
                seen.add(key)
                out.append(CnfFormula(n, key))
    return out


def random_formula(rng: random.Random, n, m):
    return CnfFormula(n, tuple(tuple(rng.choice((1, -1)) * rng.randint(1, n) for _ in range(3)) for _ in range(m)))


def mutate_entry(inst: Instance, v, position: int, alt: Link) -> Instance:
    """Oblivious row of ``v`` with ``alt`` placed at ``position`` (the rest keep their order)."""
    row = list(inst.pattern.row(v, Link.loop(v)))
    row.remove(alt)
    row.insert(position, alt)
    return with_rows(inst, {v: row})
