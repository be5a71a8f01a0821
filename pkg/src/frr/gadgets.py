"""3-SAT formulas compiled into resilience verification instances.

``gen_perfect_gadget`` builds a planar star-like network around a centre ``c`` whose
skipping pattern has a forwarding loop (with the source still connected) exactly
when the formula is satisfiable.  ``gen_ideal_gadget`` does the same for ideal
resilience, surrounding everything with a clique so the graph is highly connected.

Literals are DIMACS-style signed integers: ``3`` is x3 and ``-3`` its negation.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .model import Graph, Instance, Link, SkippingPattern

MAX_BRUTEFORCE_VARS = 24


@dataclass(frozen=True)
class CnfFormula:
    num_vars: int
    clauses: tuple  # tuple of 3-tuples of non-zero ints

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        if self.num_vars < 0:
            raise ValueError("number of variables must be non-negative")
        for j, clause in enumerate(self.clauses, 1):
            if len(clause) != 3:
                raise ValueError(f"clause {j} must have exactly 3 literals, got {len(clause)}")
            for lit in clause:
                if not isinstance(lit, int) or lit == 0 or abs(lit) > self.num_vars:
                    raise ValueError(f"clause {j}: literal {lit!r} out of range 1..{self.num_vars}")

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def __str__(self):
        def lit(x):
            return f"x{x}" if x > 0 else f"~x{-x}"

        return " & ".join("(" + " | ".join(map(lit, c)) + ")" for c in self.clauses) or "true"


def satisfies(phi: CnfFormula, beta: dict) -> bool:
    return all(any(beta[abs(x)] == (x > 0) for x in clause) for clause in phi.clauses)


def sat_bruteforce(phi: CnfFormula) -> dict | None:
    """First satisfying assignment in ascending binary order (x1 is the low bit), or None."""
    n = phi.num_vars
    if n > MAX_BRUTEFORCE_VARS:
        raise ValueError(f"{n} variables exceed the brute-force limit of {MAX_BRUTEFORCE_VARS}")
    for bits in product((False, True), repeat=n):
        beta = {i + 1: bits[n - 1 - i] for i in range(n)}
        if satisfies(phi, beta):
            return beta
    return None


def _require_satisfying(phi: CnfFormula, beta: dict) -> None:
    if set(beta) != set(range(1, phi.num_vars + 1)):
        raise ValueError("assignment must give a value to every variable")
    if not satisfies(phi, beta):
        raise ValueError("assignment does not satisfy the formula")


def _require_clauses(phi: CnfFormula) -> None:
    if phi.num_vars < 1 or phi.num_clauses < 1:
        raise ValueError("gadgets need at least one variable and one clause")


def _dedup(seq):
    return list(dict.fromkeys(seq))


class _RowBuilder:
    """Collects priority lists given as neighbour names and completes them canonically."""

    def __init__(self, g: Graph):
        self.g = g
        self.rows: dict = {}

    def set(self, v, inports, lead):
        lead_links = [self.g.link(v, w) for w in _dedup(lead)]
        rest = [e for e in self.g.local(v) if not e.is_loop and e not in lead_links]
        row = tuple(lead_links + rest + [Link.loop(v)])
        for w in inports:
            self.rows[(v, Link.of(v, w))] = row

    def default(self, v, lead):
        """Row for every in-port of ``v`` not set explicitly (the ``*`` entry)."""
        unset = [e.other(v) for e in self.g.local(v) if (v, e) not in self.rows]
        self.set(v, unset, lead)

    def pattern(self) -> SkippingPattern:
        return SkippingPattern(dict(self.rows))


# -- perfect resilience ---------------------------------------------------------


def _lit_name(x: int) -> str:
    return f"x{x}" if x > 0 else f"~x{-x}"


def p_node(x: int) -> str:
    return "p_" + _lit_name(x)


def n_node(x: int) -> str:
    return "n_" + _lit_name(x)


def clause_nodes(j: int) -> tuple[str, str, str]:
    return (f"u{j}", f"v{j}", f"w{j}")


def gen_perfect_gadget(phi: CnfFormula) -> Instance:
    _require_clauses(phi)
    n, m = phi.num_vars, phi.num_clauses
    nodes = ["c", "t"]
    edges = [("c", "t")]
    for i in range(1, n + 1):
        for x in (i, -i):
            nodes += [p_node(x), n_node(x)]
            edges += [("c", p_node(x)), ("c", n_node(x)), (p_node(x), n_node(x))]
    for j in range(1, m + 1):
        for y in clause_nodes(j):
            nodes.append(y)
            edges.append(("c", y))
    g = Graph(nodes, edges)
    rb = _RowBuilder(g)

    for i in range(1, n + 1):
        for x in (i, -i):
            p, q = p_node(x), n_node(x)
            rb.set(p, ["c"], [q, "c"])
            rb.set(p, [q, p], ["c", q])
            rb.set(q, ["c"], [p, "c"])
            rb.set(q, [p, q], ["c", p])
    for j in range(1, m + 1):
        for y in clause_nodes(j):
            rb.default(y, ["c"])

    first_var = [p_node(1), p_node(-1)]
    rb.set("c", ["c"], first_var + ["t"])
    for i in range(1, n + 1):
        rb.set("c", [p_node(i), p_node(-i)], ["t"])
        nxt = [p_node(i + 1), p_node(-(i + 1))] if i < n else list(clause_nodes(1))
        rb.set("c", [n_node(i)], [n_node(-i)] + nxt + ["t"])
        rb.set("c", [n_node(-i)], [n_node(i)] + nxt + ["t"])
    for j, clause in enumerate(phi.clauses, 1):
        nxt = list(clause_nodes(j + 1)) if j < m else first_var
        for y, lit in zip(clause_nodes(j), clause):
            rb.set("c", [y], [n_node(lit)] + nxt + ["t"])
    # c never forwards a packet that came from t (delivery stops there)
    rb.default("c", ["t"])
    rb.default("t", [])
    return Instance(g, "t", rb.pattern())


def perfect_witness_from_assignment(phi: CnfFormula, beta: dict) -> tuple[str, frozenset]:
    """Source and failure scenario that trap a packet injected at ``c``."""
    _require_satisfying(phi, beta)
    failed = set()
    for i in range(1, phi.num_vars + 1):
        x = i if beta[i] else -i
        failed |= {Link.of("c", p_node(x)), Link.of("c", n_node(x))}
    for j, clause in enumerate(phi.clauses, 1):
        pick = next(k for k, x in enumerate(clause) if beta[abs(x)] == (x > 0))
        failed |= {Link.of("c", y) for k, y in enumerate(clause_nodes(j)) if k != pick}
    return "c", frozenset(failed)


# -- ideal resilience -----------------------------------------------------------


def clique_size(phi: CnfFormula) -> int:
    return 2 * phi.num_vars + 2 * phi.num_clauses + 1


def gen_ideal_gadget(phi: CnfFormula) -> Instance:
    _require_clauses(phi)
    n, m = phi.num_vars, phi.num_clauses
    K = [f"u{i}" for i in range(clique_size(phi))]
    var_nodes = []
    for i in range(1, n + 1):
        var_nodes += [f"v{i}", f"x{i}", f"~x{i}"]
    var_nodes.append(f"v{n + 1}")
    clause_side = []
    for j in range(1, m + 1):
        clause_side += [f"c{j}", f"d{j}"]
    others = ["t"] + var_nodes + clause_side
    edges = [(a, b) for i, a in enumerate(K) for b in K[i + 1 :]]
    edges += [(a, u) for a in others for u in K]
    for i in range(1, n + 1):
        v, x, nx, w = f"v{i}", f"x{i}", f"~x{i}", f"v{i + 1}"
        edges += [(v, x), (v, nx), (x, nx), (x, w), (nx, w)]
    extra = []
    for j, clause in enumerate(phi.clauses, 1):
        for lit in clause:
            extra += [(f"c{j}", _lit_name(lit)), (f"d{j}", _lit_name(lit))]
        extra.append((f"d{j}", f"c{j % m + 1}"))
    extra.append((f"v{n + 1}", "c1"))
    seen = set()
    for a, b in extra:
        # repeated literals in a clause would create parallel links; keep one
        if Link.of(a, b) not in seen:
            seen.add(Link.of(a, b))
            edges.append((a, b))
    g = Graph(K + others, edges)
    rb = _RowBuilder(g)

    for i, u in enumerate(K):
        rb.default(u, ["t"] + K[i + 1 :] + K[:i])
    rb.set("v1", ["v1"], ["x1", "~x1"] + K)
    rb.default("v1", K)
    for i in range(2, n + 2):
        v, x, nx = f"v{i}", f"x{i - 1}", f"~x{i - 1}"
        nxt = [f"x{i}", f"~x{i}"] if i <= n else ["c1"]
        rb.set(v, [x], [nx] + nxt + K)
        rb.set(v, [nx], [x] + nxt + K)
        rb.default(v, K)
    clauses_of = {}
    for j, clause in enumerate(phi.clauses, 1):
        for lit in clause:
            clauses_of.setdefault(lit, []).append(j)
    for i in range(1, n + 1):
        for x, nx in ((f"x{i}", f"~x{i}"), (f"~x{i}", f"x{i}")):
            lit = i if x == f"x{i}" else -i
            rb.set(x, [f"v{i}"], [nx] + K)
            rb.set(x, [nx], [f"v{i}", f"v{i + 1}"] + K)
            for j in _dedup(clauses_of.get(lit, [])):
                rb.set(x, [f"c{j}"], [f"v{i}", f"d{j}"] + K)
            rb.default(x, K)
    for j, clause in enumerate(phi.clauses, 1):
        lits = [_lit_name(x) for x in clause]
        c, d = f"c{j}", f"d{j}"
        prev = [f"v{n + 1}", f"d{m}"] if j == 1 else [f"d{j - 1}"]
        rb.set(c, _dedup(prev), lits + K)
        rb.default(c, K)
        rb.set(d, _dedup(lits), [f"c{j % m + 1}"] + K)
        rb.default(d, K)
    rb.default("t", [])
    return Instance(g, "t", rb.pattern())


def ideal_witness_from_assignment(phi: CnfFormula, beta: dict) -> tuple[str, frozenset]:
    """Source ``v1`` and at most 2n+2m failed links that send the packet round forever."""
    _require_satisfying(phi, beta)
    n = phi.num_vars
    failed = set()
    for i in range(1, n + 1):
        if beta[i]:
            failed |= {Link.of(f"v{i}", f"x{i}"), Link.of(f"~x{i}", f"v{i + 1}")}
        else:
            failed |= {Link.of(f"v{i}", f"~x{i}"), Link.of(f"x{i}", f"v{i + 1}")}
    for j, clause in enumerate(phi.clauses, 1):
        for lit in clause:
            if beta[abs(lit)] != (lit > 0):
                failed.add(Link.of(f"c{j}", _lit_name(lit)))
    return "v1", frozenset(failed)
