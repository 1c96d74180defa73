from __future__ import annotations

import pytest

from classorder.census import Selector
from classorder.oracle import (
    G1,
    G2,
    UNIVERSAL_QIDS,
    RandomGraphConfig,
    SmallGraph,
    naive_census,
    naive_down_set,
    naive_loops,
    naive_min_levels,
    naive_orders,
    naive_split_pairs,
    naive_type_set,
    naive_up_set,
    random_graph,
    random_universal,
)


def test_g1_closures():
    assert naive_up_set(G1, 10) == {10, 9, 1}
    assert naive_up_set(G1, 4) == {4}
    assert naive_type_set(G1, 11) == {9, 1}
    assert naive_type_set(G1, 1) == set()
    assert naive_type_set(G1, 5) == {5}
    assert naive_down_set(G1, 1) == {1, 9, 10, 11}
    assert naive_down_set(G1, 10) == {10}


def test_empty_graph_lookup_fails():
    g = SmallGraph.of()
    with pytest.raises(LookupError):
        naive_up_set(g, 1)
    with pytest.raises(LookupError):
        naive_type_set(g, 1)


def test_empty_graph_gives_empty_results():
    g = SmallGraph.of()
    assert naive_split_pairs(g) == set()
    assert not any(naive_loops(g).values())
    assert naive_orders(g, UNIVERSAL_QIDS) == {}
    assert all(level == set() for level in naive_min_levels(g, Selector.ANY_OF, 3))


def test_cycle_up_set_is_component():
    g = SmallGraph.of(p279=[(1, 2), (2, 1)])
    assert naive_up_set(g, 1) == naive_up_set(g, 2) == {1, 2}


def test_g1_fixture_outputs():
    assert list(naive_census(G1).values()) == [7, 4, 0, 9]
    assert naive_split_pairs(G1) == {(5, 5), (11, 1)}
    levels = naive_min_levels(G1, Selector.HAS_INSTANCE, 4)
    assert levels[1:] == [{1, 2, 5, 6, 7}, {1, 5, 6, 7}, {5, 6, 7}]
    loops = naive_loops(G1)
    assert loops["SelfDirect"] == {(5,)}
    assert loops["TwoHop"] == {(6, 7)}


def test_split_pairs_trivial_cases():
    assert naive_split_pairs(SmallGraph.of(p279=[(1, 2)])) == set()
    assert naive_split_pairs(SmallGraph.of(p31=[(3, 3)])) == {(3, 3)}


def test_g2_orders():
    assert naive_orders(G2, UNIVERSAL_QIDS) == {901: {1}, 902: {1}, 903: {1, 2}}
    assert naive_orders(G2, UNIVERSAL_QIDS, members=True) == {901: {2}, 902: {2}, 903: {2, 3}}


def test_random_graph_is_deterministic():
    cfg = RandomGraphConfig()
    assert random_graph(7, cfg) == random_graph(7, cfg)
    assert random_universal(7, random_graph(7, cfg)) == random_universal(7, random_graph(7, cfg))
    assert any(random_graph(s, cfg) != random_graph(7, cfg) for s in range(3))


def test_random_graph_shape():
    cfg = RandomGraphConfig(max_nodes=20)
    for seed in range(30):
        g = random_graph(seed, cfg)
        n = len(g.entities)
        assert 2 <= n <= 20
        assert g.entities == frozenset(range(1, n + 1))
        assert sum(1 for s, o in g.p31 if s == o) <= 1
        assert all(s != o for s, o in g.p279)


def test_injected_loops_are_present():
    cfg = RandomGraphConfig(inject_loops=True)
    for seed in range(20):
        g = random_graph(seed, cfg)
        if len(g.entities) >= 3:
            assert naive_loops(g)["SelfDirect"]


def test_g1_builds_with_expected_counts():
    g = G1.build()
    assert g.n_entities == 11
    assert g.n_instance_edges == 8 and g.n_subclass_edges == 3
