"""Text formats: instance documents (.frr), certificates (.cert) and DIMACS CNF.

Instance and certificate documents are JSON.  Links incident to a node are written
by naming only the other endpoint; the node's own id stands for its self-loop.
See FORMAT.md for the field reference.
"""

from __future__ import annotations

import json
from typing import Any

from .errors import DocumentError, FrrError
from .gadgets import CnfFormula
from .model import (
    CombinatorialPattern,
    Graph,
    Instance,
    Link,
    SkippingPattern,
    node_key,
    validate_pattern,
)
from .sim import Trace
from .verify import IDEAL, PERFECT, Counterexample


def _load_json(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(exc.msg, exc.lineno, exc.colno) from None


def _node_id(value, what: str):
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise DocumentError(f"{what}: node ids must be strings or integers, got {value!r}")
    return value


def _graph_from(doc: dict) -> Graph:
    if not isinstance(doc, dict):
        raise DocumentError("document must be a JSON object")
    for key in ("nodes", "edges"):
        if key not in doc:
            raise DocumentError(f"missing {key}")
    nodes = [_node_id(v, "nodes") for v in doc["nodes"]]
    edges = []
    for pair in doc["edges"]:
        if not isinstance(pair, list) or len(pair) != 2:
            raise DocumentError(f"edge {pair!r} must be a pair of node ids")
        edges.append((_node_id(pair[0], "edges"), _node_id(pair[1], "edges")))
    try:
        return Graph(nodes, edges)
    except FrrError as exc:
        raise DocumentError(str(exc)) from None


def _resolve(g: Graph, v, other, what: str) -> Link:
    other = _node_id(other, what)
    if other == v:
        return Link.loop(v)
    try:
        return g.link(v, other)
    except FrrError:
        raise DocumentError(f"{what}: {other!r} is not a neighbour of {v!r}") from None


def _expand_star(g: Graph, v, explicit: set) -> list[Link]:
    return [e for e in g.local(v) if e not in explicit]


def _skipping_from(g: Graph, rules: list) -> SkippingPattern:
    rows = {}
    stars = []
    for i, rule in enumerate(rules):
        what = f"rule {i}"
        try:
            v, inport, lst = rule["node"], rule["inport"], rule["list"]
        except (KeyError, TypeError):
            raise DocumentError(f"{what}: skipping rules need node, inport and list") from None
        if v not in g:
            raise DocumentError(f"{what}: unknown node {v!r}")
        row = tuple(_resolve(g, v, w, what) for w in lst)
        if inport == "*":
            stars.append((v, row, what))
            continue
        key = (v, _resolve(g, v, inport, what))
        if key in rows:
            raise DocumentError(f"{what}: duplicate rule for node {v!r}, in-port {inport!r}")
        rows[key] = row
    for v, row, what in stars:
        explicit = {e for (u, e) in rows if u == v}
        for e in _expand_star(g, v, explicit):
            rows[(v, e)] = row
    return SkippingPattern(rows)


def _combinatorial_from(g: Graph, rules: list, defaults: list) -> CombinatorialPattern:
    table = {}
    stars = []
    for i, rule in enumerate(rules):
        what = f"rule {i}"
        try:
            v, inport, failed, nxt = rule["node"], rule["inport"], rule["failed"], rule["next"]
        except (KeyError, TypeError):
            raise DocumentError(f"{what}: combinatorial rules need node, inport, failed and next") from None
        if v not in g:
            raise DocumentError(f"{what}: unknown node {v!r}")
        key_failed = frozenset(_resolve(g, v, w, what) for w in failed)
        choice = _resolve(g, v, nxt, what)
        if inport == "*":
            stars.append((v, key_failed, choice, what))
            continue
        key = (v, _resolve(g, v, inport, what), key_failed)
        if key in table:
            raise DocumentError(f"{what}: duplicate rule")
        table[key] = choice
    starred = set()
    for v, key_failed, choice, what in stars:
        if (v, key_failed) in starred:
            raise DocumentError(f"{what}: duplicate rule")
        starred.add((v, key_failed))
        for e in g.local(v):
            table.setdefault((v, e, key_failed), choice)
    dflt = {}
    stars = []
    for i, rule in enumerate(defaults):
        what = f"default {i}"
        try:
            v, inport, lst = rule["node"], rule["inport"], rule["list"]
        except (KeyError, TypeError):
            raise DocumentError(f"{what}: defaults need node, inport and list") from None
        if v not in g:
            raise DocumentError(f"{what}: unknown node {v!r}")
        row = tuple(_resolve(g, v, w, what) for w in lst)
        if inport == "*":
            stars.append((v, row))
            continue
        dflt[(v, _resolve(g, v, inport, what))] = row
    for v, row in stars:
        explicit = {e for (u, e) in dflt if u == v}
        for e in _expand_star(g, v, explicit):
            dflt[(v, e)] = row
    return CombinatorialPattern(table, dflt)


def parse_graph(text: str) -> tuple[Graph, Any]:
    """Graph and (possibly absent) target of a document; any pattern is ignored."""
    doc = _load_json(text)
    g = _graph_from(doc)
    target = doc.get("target")
    if target is not None and target not in g:
        raise DocumentError(f"target {target!r} is not a node")
    return g, target


def parse_instance(text: str, validate: bool = True) -> Instance:
    doc = _load_json(text)
    g = _graph_from(doc)
    if "target" not in doc:
        raise DocumentError("missing target")
    t = doc["target"]
    if t not in g:
        raise DocumentError(f"target {t!r} is not a node")
    pat = doc.get("pattern")
    if not isinstance(pat, dict):
        raise DocumentError("missing pattern")
    kind = pat.get("kind")
    if kind == "skipping":
        pattern = _skipping_from(g, pat.get("rules", []))
    elif kind == "combinatorial":
        pattern = _combinatorial_from(g, pat.get("rules", []), pat.get("defaults", []))
    else:
        raise DocumentError(f"pattern kind must be 'skipping' or 'combinatorial', got {kind!r}")
    inst = Instance(g, t, pattern)
    if validate:
        problems = validate_pattern(inst)
        if problems:
            raise DocumentError("invalid pattern: " + "; ".join(map(str, problems)))
    return inst


def _dump(value) -> str:
    return json.dumps(value, ensure_ascii=False)


def _inport_key(v, e: Link):
    return node_key(e.other(v))


def _names(v, links) -> list:
    return [e.other(v) for e in links]


def _failed_key(v, failed):
    return (len(failed), sorted(node_key(e.other(v)) for e in failed))


def serialize_graph(g: Graph, target=None) -> str:
    lines = ["{", f'  "nodes": {_dump(list(g.nodes))},', '  "edges": [']
    edges = [f"    {_dump([e.a, e.b])}" for e in g.edges]
    lines.append(",\n".join(edges))
    if target is None:
        lines.append("  ]")
    else:
        lines.append("  ],")
        lines.append(f'  "target": {_dump(target)}')
    lines.append("}")
    return "\n".join(x for x in lines if x) + "\n"


def serialize_instance(inst: Instance) -> str:
    g, p = inst.graph, inst.pattern
    out = ["{", f'  "nodes": {_dump(list(g.nodes))},', '  "edges": [']
    out.append(",\n".join(f"    {_dump([e.a, e.b])}" for e in g.edges) or None)
    out.append("  ],")
    out.append(f'  "target": {_dump(inst.target)},')
    out.append('  "pattern": {')
    if isinstance(p, SkippingPattern):
        out.append('    "kind": "skipping",')
        out.append('    "rules": [')
        keys = sorted(p.rows, key=lambda k: (node_key(k[0]), _inport_key(*k)))
        rules = [
            "      "
            + _dump({"node": v, "inport": e.other(v), "list": _names(v, p.rows[(v, e)])})
            for v, e in keys
        ]
        out.append(",\n".join(rules) or None)
        out.append("    ]")
    else:
        out.append('    "kind": "combinatorial",')
        out.append('    "rules": [')
        keys = sorted(p.rules, key=lambda k: (node_key(k[0]), _inport_key(k[0], k[1]), _failed_key(k[0], k[2])))
        rules = []
        for v, e, failed in keys:
            names = [f.other(v) for f in sorted(failed)]
            rule = {"node": v, "inport": e.other(v), "failed": names, "next": p.rules[(v, e, failed)].other(v)}
            rules.append("      " + _dump(rule))
        out.append(",\n".join(rules) or None)
        out.append("    ],")
        out.append('    "defaults": [')
        keys = sorted(p.defaults, key=lambda k: (node_key(k[0]), _inport_key(*k)))
        rules = [
            "      " + _dump({"node": v, "inport": e.other(v), "list": _names(v, p.defaults[(v, e)])})
            for v, e in keys
        ]
        out.append(",\n".join(rules) or None)
        out.append("    ]")
    out.append("  }")
    out.append("}")
    return "\n".join(x for x in out if x is not None) + "\n"


# -- certificates -----------------------------------------------------------------


def serialize_certificate(cex: Counterexample) -> str:
    doc = {
        "mode": cex.mode,
        "budget": cex.budget,
        "source": cex.source,
        "failed": [[e.a, e.b] for e in sorted(cex.failed)],
        "trace": list(cex.trace.nodes),
        "repeat_index": cex.trace.repeat_index,
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def parse_certificate(text: str) -> Counterexample:
    doc = _load_json(text)
    if not isinstance(doc, dict):
        raise DocumentError("certificate must be a JSON object")
    try:
        mode = doc["mode"]
        source = _node_id(doc["source"], "source")
        failed = frozenset(Link.of(_node_id(a, "failed"), _node_id(b, "failed")) for a, b in doc["failed"])
        trace = Trace(tuple(doc["trace"]), False, doc["repeat_index"])
    except KeyError as exc:
        raise DocumentError(f"missing {exc.args[0]}") from None
    except (TypeError, ValueError):
        raise DocumentError("malformed certificate") from None
    if mode not in (PERFECT, IDEAL):
        raise DocumentError(f"unknown mode {mode!r}")
    budget = doc.get("budget")
    if mode == IDEAL and not isinstance(budget, int):
        raise DocumentError("ideal certificates need an integer budget")
    return Counterexample(source, failed, trace, mode, budget)


# -- DIMACS ---------------------------------------------------------------------------


def parse_dimacs(text: str) -> CnfFormula:
    """3-CNF from DIMACS text; clause order and literal order are kept as written."""
    num_vars = num_clauses = None
    clauses = []
    current: list[int] = []
    max_var = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise DocumentError("problem line must read 'p cnf <vars> <clauses>'", lineno, 1)
            try:
                num_vars, num_clauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise DocumentError("problem line counts must be integers", lineno, 1) from None
            continue
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DocumentError(f"bad literal {tok!r}", lineno, raw.find(tok) + 1) from None
            if lit == 0:
                if len(current) != 3:
                    raise DocumentError(
                        f"clause must have exactly 3 literals, got {len(current)}", lineno, raw.find(tok) + 1
                    )
                clauses.append(tuple(current))
                current = []
                continue
            if num_vars is not None and abs(lit) > num_vars:
                raise DocumentError(f"literal {lit} out of range 1..{num_vars}", lineno, raw.find(tok) + 1)
            max_var = max(max_var, abs(lit))
            current.append(lit)
    if current:
        raise DocumentError("last clause is not terminated by 0")
    if num_clauses is not None and num_clauses != len(clauses):
        raise DocumentError(f"header announces {num_clauses} clauses, found {len(clauses)}")
    return CnfFormula(max_var if num_vars is None else num_vars, tuple(clauses))


def write_dimacs(phi: CnfFormula) -> str:
    lines = [f"p cnf {phi.num_vars} {phi.num_clauses}"]
    lines += [" ".join(map(str, c)) + " 0" for c in phi.clauses]
    return "\n".join(lines) + "\n"
