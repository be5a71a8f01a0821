import random
from collections import Counter

import pytest

from frr.errors import PatternError
from frr.model import CombinatorialPattern, Graph, Instance, Link, local_failure_sets
from frr.oblivious import (
    LongCycleWitness,
    TriangleStructure,
    analyze_component,
    important_entries,
    is_inport_oblivious,
    synth_oblivious,
    verify_oblivious,
)
from frr.verify import check_counterexample, verify_perfect_exhaustive
from corpus import mutate_entry, random_connected_graph
from instances import INPORT_EX_ROWS, c4, g1, inport_ex, inport_ex_graph, triangle


def _lead(inst, v, k):
    return [e.other(v) for e in inst.pattern.row(v, Link.loop(v))[:k]]


def test_inport_ex_structure():
    s = analyze_component(inport_ex_graph(), "t")
    assert isinstance(s, TriangleStructure)
    assert s.parent["v6"] == "t" and s.parent["v5"] == "v6" and s.parent["v1"] == "v5"
    assert s.partner == {"t": None, "v6": None, "v4": "v5", "v5": "v4", "v1": "v2", "v2": "v1", "v3": None}


def test_inport_ex_synthesis_matches_table():
    inst = synth_oblivious(inport_ex_graph(), "t")
    lead = {"v1": 2, "v2": 2, "v3": 1, "v4": 2, "v5": 2, "v6": 1}
    for v, k in lead.items():
        assert _lead(inst, v, k) == INPORT_EX_ROWS[v][:k]
    for v in inst.graph.nodes:
        if v != "t":
            assert inst.pattern.rows[(v, Link.loop(v))] == inport_ex().pattern.rows[(v, Link.loop(v))]
    assert is_inport_oblivious(inst.pattern)
    assert verify_perfect_exhaustive(inst).resilient


def test_synthesized_rows_end_with_self_loop():
    inst = synth_oblivious(inport_ex_graph(), "t")
    for (v, _), row in inst.pattern.rows.items():
        assert row[-1] == Link.loop(v)
        assert set(row) == set(inst.graph.local(v))


def test_c4_is_infeasible():
    found = synth_oblivious(c4().graph, "t")
    assert isinstance(found, LongCycleWitness)
    assert sorted(found.cycle) == ["s", "t", "u", "v"]


def test_two_triangles_sharing_a_base_are_infeasible():
    # a and b both close a triangle with x under t: cycle t-a-x-b
    g = Graph(["t", "a", "b", "x"], [("t", "a"), ("t", "b"), ("t", "x"), ("a", "x"), ("b", "x")])
    found = analyze_component(g, "t")
    assert isinstance(found, LongCycleWitness) and len(found.cycle) == 4


def test_long_cycle_witness_is_a_cycle():
    rng = random.Random(4)
    seen = 0
    for _ in range(400):
        nodes, edges = random_connected_graph(rng)
        g = Graph(nodes, edges)
        found = analyze_component(g, rng.choice(nodes))
        if isinstance(found, LongCycleWitness):
            seen += 1
            c = found.cycle
            assert len(c) >= 4 and len(set(c)) == len(c)
            assert all(g.has_link(Link.of(c[i], c[i - 1])) for i in range(len(c)))
    assert seen > 50


def test_component_only():
    g = Graph(["t", "a", "b", "c", "d", "e"], [("t", "a"), ("b", "c"), ("c", "d"), ("d", "e"), ("e", "b")])
    s = analyze_component(g, "t")
    assert isinstance(s, TriangleStructure)
    assert set(s.order) == {"t", "a"}


def test_analysis_is_linear():
    # link inspections grow with the number of links, not faster
    for n in (50, 100, 200, 400):
        nodes = list(range(n))
        edges = [(i, i + 1) for i in range(n - 1)]
        edges += [(i, i + 2) for i in range(0, n - 2, 2)]
        probe = Counter()
        analyze_component(Graph(nodes, edges), 0, probe)
        assert probe["link"] <= 2 * (2 * len(edges) + n)


def test_important_entries():
    g = inport_ex_graph()
    entries = important_entries(g, analyze_component(g, "t"))
    assert entries["v3"] == (Link.of("v3", "v5"), None)
    assert entries["v4"] == (Link.of("v4", "v6"), Link.of("v4", "v5"))


def test_verify_oblivious_on_fixtures():
    assert verify_oblivious(inport_ex()).resilient
    assert verify_oblivious(triangle()).resilient
    v = verify_oblivious(c4())
    assert not v and check_counterexample(c4(), v.counterexample)


def test_verify_oblivious_refuses_inport_dependent_patterns():
    assert not is_inport_oblivious(g1().pattern)
    with pytest.raises(PatternError):
        verify_oblivious(g1())


def test_mutations_are_caught():
    base = synth_oblivious(inport_ex_graph(), "t")
    g = base.graph
    entries = important_entries(g, analyze_component(g, "t"))
    count = 0
    for v, (primary, secondary) in entries.items():
        for pos, keep in ((0, primary), (1, secondary)):
            if keep is None:
                continue
            for alt in g.local(v):
                if alt == keep or (pos == 1 and alt == primary):
                    continue
                inst = mutate_entry(base, v, pos, alt)
                a, b = verify_oblivious(inst), verify_perfect_exhaustive(inst)
                assert not a and not b
                assert check_counterexample(inst, a.counterexample)
                count += 1
    assert count > 10


def _combinatorial_copy(inst):
    g, p = inst.graph, inst.pattern
    rules = {}
    for (v, e), row in p.rows.items():
        for failed in local_failure_sets(g, v):
            rules[(v, e, failed)] = next(x for x in row if x not in failed)
    return Instance(g, inst.target, CombinatorialPattern(rules))


def test_combinatorial_oblivious():
    inst = _combinatorial_copy(synth_oblivious(inport_ex_graph(), "t"))
    assert is_inport_oblivious(inst.pattern, inst.graph)
    assert verify_oblivious(inst).resilient
    with pytest.raises(ValueError):
        is_inport_oblivious(inst.pattern)
    g = inst.graph
    rules = dict(inst.pattern.rules)
    failed = frozenset([Link.of("v3", "v5")])
    for e in g.local("v3"):
        rules[("v3", e, failed)] = Link.loop("v3")
    bad = Instance(g, "t", CombinatorialPattern(rules))
    # v3 is cut off in that case, so its choice is harmless
    assert verify_oblivious(bad).resilient
    assert verify_perfect_exhaustive(bad).resilient


def test_combinatorial_wrong_entry_at_uncommon_failed_set():
    inst = _combinatorial_copy(synth_oblivious(inport_ex_graph(), "t"))
    g = inst.graph
    rules = dict(inst.pattern.rules)
    # v5: parent v6 active, partner v4 failed, child v1 failed -> must still take v6
    failed = frozenset([Link.of("v4", "v5"), Link.of("v1", "v5")])
    for e in g.local("v5"):
        rules[("v5", e, failed)] = Link.of("v2", "v5")
    bad = Instance(g, "t", CombinatorialPattern(rules))
    a, b = verify_oblivious(bad), verify_perfect_exhaustive(bad)
    assert not a and not b
    assert check_counterexample(bad, a.counterexample)
