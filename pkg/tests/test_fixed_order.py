from __future__ import annotations

import pytest

from classorder.fixed_order import (
    MetaStatus,
    Numbering,
    UniversalOrderClasses,
    check_metaclass_edges,
    derive_orders,
    order_conflicts,
    order_overlap,
    replay_witness,
)
from classorder.ingest import MetaclassStatement
from classorder.oracle import SmallGraph, UNIVERSAL_QIDS, query_orders, naive_orders, random_universal

from conftest import suite


def as_q(g, a) -> dict[int, set[int]]:
    return {int(g.qids[x]): set(ks) for x, ks in a.as_dict().items()}


MEMBERS = UniversalOrderClasses(numbering=Numbering.MEMBERS)


def universal_of(pairs, numbering=Numbering.SEED) -> UniversalOrderClasses:
    return UniversalOrderClasses(tuple((k, f"Q{q}") for k, q in pairs), numbering)


def test_universal_table_validation():
    assert UniversalOrderClasses().max_order == 4
    assert MEMBERS.max_order == 5
    with pytest.raises(ValueError):
        UniversalOrderClasses(((1, "Q1"), (3, "Q3")))
    u = UniversalOrderClasses.parse("# order\tclass\n2\tQ20\n1\tQ10\n", "members")
    assert u.entries == ((1, "Q10"), (2, "Q20"))
    assert u.numbering is Numbering.MEMBERS


def test_g2_orders(g2):
    # the entry for order k is an order-k class, so its instances get k - 1
    a = derive_orders(g2)
    assert as_q(g2, a) == {901: {1}, 902: {1}, 903: {1, 2}}
    assert {int(g2.qids[x]): set(v) for x, v in order_conflicts(a).items()} == {903: {1, 2}}
    assert order_overlap(a, 1, 2) == 1
    assert order_overlap(a, 2, 3) == 0
    with pytest.raises(ValueError):
        order_overlap(a, 2, 2)


def test_g2_orders_members_numbering(g2):
    # instances of the class of all order-k classes have order k
    a = derive_orders(g2, MEMBERS)
    assert as_q(g2, a) == {901: {2}, 902: {2}, 903: {2, 3}}
    assert {int(g2.qids[x]): set(v) for x, v in order_conflicts(a).items()} == {903: {2, 3}}


def test_g2_matches_rule_oracle(g2):
    from classorder.oracle import G2

    assert as_q(g2, derive_orders(g2)) == naive_orders(G2, UNIVERSAL_QIDS)
    assert as_q(g2, derive_orders(g2, MEMBERS)) == naive_orders(G2, UNIVERSAL_QIDS, members=True)


def test_empty_graph():
    g = SmallGraph.of().build()
    a = derive_orders(g)
    assert a.as_dict() == {} and order_conflicts(a) == {}


def test_universal_classes_get_orders_only_from_data():
    # second-order class is an instance of third-order class
    g = SmallGraph.of(p31=[(24017414, 24017465), (7, 24017414)]).build()
    assert as_q(g, derive_orders(g)) == {24017414: {2}, 7: {1}}
    assert as_q(g, derive_orders(g, MEMBERS)) == {24017414: {3}, 7: {2}}


def test_rules_chain_through_instance_and_subclass():
    # 3 ∈ u3 ; 4 ⊑ 3 ; 5 ∈ 4 ; 6 ⊑ 5 ; 7 ∈ 6
    g = SmallGraph.of(p31=[(3, 24017465), (5, 4), (7, 6)], p279=[(4, 3), (6, 5)]).build()
    assert as_q(g, derive_orders(g, MEMBERS)) == {3: {3}, 4: {3}, 5: {2}, 6: {2}, 7: {1}}
    assert as_q(g, derive_orders(g)) == {3: {2}, 4: {2}, 5: {1}, 6: {1}}


def test_order_never_drops_below_one():
    g = SmallGraph.of(p31=[(2, 104086571), (3, 2)]).build()
    assert as_q(g, derive_orders(g, MEMBERS)) == {2: {1}}
    # the order-1 entry's instances would have order 0, which is not a class order
    assert as_q(g, derive_orders(g)) == {}


@pytest.mark.parametrize("numbering", list(Numbering))
def test_witnesses_replay(g2, numbering):
    u = UniversalOrderClasses(numbering=numbering)
    a = derive_orders(g2, u)
    for x, ks in a.as_dict().items():
        for k in ks:
            assert replay_witness(g2, u, a.witness(x, k)) == (x, k)


def test_witness_is_shortest_and_prefers_low_seed():
    # 5 reaches order 2 by a direct seed edge and by a longer subclass route
    g = SmallGraph.of(p31=[(5, 24017414), (6, 24017414)], p279=[(5, 6)]).build()
    a = derive_orders(g, MEMBERS)
    w = a.witness(g.node(5), 2)
    assert [(int(g.qids[s.subject]), s.pid, int(g.qids[s.object])) for s in w] == [(5, "P31", 24017414)]


@pytest.mark.parametrize("numbering", list(Numbering))
def test_matches_rule_oracle_on_suite(numbering):
    for seed, sg, g in suite():
        uq = random_universal(seed, sg)
        u = universal_of(uq, numbering)
        a = derive_orders(g, u)
        assert as_q(g, a) == naive_orders(sg, uq, members=numbering is Numbering.MEMBERS), seed
        for x, ks in a.as_dict().items():
            for k in ks:
                assert replay_witness(g, u, a.witness(x, k)) == (x, k)
        conflicts = order_conflicts(a)
        assert set(conflicts) == {x for x, ks in a.as_dict().items() if len(ks) >= 2}


def test_matches_simplified_queries_when_only_third_order_seed_has_instances():
    for seed, sg, _ in suite():
        uq = random_universal(seed, sg)
        if len(uq) < 3:
            continue
        u3 = dict(uq)[3]
        others = {q for k, q in uq if k != 3}
        # drop instance edges into the other universal classes
        sg = SmallGraph.of({(s, o) for s, o in sg.p31 if o not in others}, sg.p279, sg.extra)
        g = sg.build()
        a = derive_orders(g, universal_of(uq, Numbering.MEMBERS))
        got = {x: ks & {1, 2, 3} for x, ks in as_q(g, a).items() if ks & {1, 2, 3}}
        assert got == query_orders(sg, u3), seed


def test_monotone_under_added_edges():
    for seed, sg, g in suite()[:50]:
        uq = random_universal(seed, sg)
        more = SmallGraph.of(sg.p31 | {(1, uq[0][1])}, sg.p279, sg.extra)
        before = naive_orders(sg, uq)
        after = as_q(more.build(), derive_orders(more.build(), universal_of(uq)))
        for x, ks in before.items():
            assert ks <= after.get(x, set())


def test_metaclass_checks():
    # 10 and 11 have order 2, 12 has order 3
    g = SmallGraph.of(p31=[(10, 24017414), (11, 24017414), (12, 24017465)]).build()
    a = derive_orders(g, MEMBERS)
    statements = [
        MetaclassStatement(10, "P2445", 11),  # same order: fine
        MetaclassStatement(10, "P8225", 11),  # needs 3 = 2 + 1: violation
        MetaclassStatement(12, "P8225", 10),  # 3 = 2 + 1: fine
        MetaclassStatement(12, "P2445", 10),  # disjoint orders: violation
        MetaclassStatement(10, "P2445", 24017414),  # object has no derived order
        MetaclassStatement(10, "P2445", 777),  # not in graph
    ]
    found = [(f.statement.subject, f.statement.pid, f.statement.object, f.status) for f in check_metaclass_edges(g, a, statements)]
    assert found == [
        (10, "P8225", 11, MetaStatus.VIOLATION),
        (12, "P2445", 10, MetaStatus.VIOLATION),
        (10, "P2445", 24017414, MetaStatus.UNDECIDABLE),
        (10, "P2445", 777, MetaStatus.ERROR),
    ]
