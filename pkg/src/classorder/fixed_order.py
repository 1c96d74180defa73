"""Fixed class orders derived from the universal fixed-order classes.

Two rules, applied to a least fixed point:

* an instance of a class of fixed order ``n + 1`` has fixed order ``n``;
* a subclass of a class of fixed order ``n`` has fixed order ``n``.

How the seeds enter depends on the numbering. With ``Numbering.SEED`` (the
default) the universal class listed for ``k`` counts as an order-``k`` class,
so its instances get ``k - 1`` and instances of the order-1 entry get no
class order at all. With ``Numbering.MEMBERS`` the listed class is the class
of all order-``k`` classes: its instances get order ``k`` and it behaves as an
order ``k + 1`` class. Either way, the universal class's own order is whatever
the rules derive from the data.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .graph import OntoGraph, UnknownEntityError
from .ingest import MetaclassStatement

DEFAULT_UNIVERSAL = (
    (1, "Q104086571"),
    (2, "Q24017414"),
    (3, "Q24017465"),
    (4, "Q24027474"),
    (5, "Q24027515"),
)

# how a (node, order) pair was reached from its predecessor
_VIA_INSTANCE = 0
_VIA_SUBCLASS = 1
_VIA_SEED = 2


class Numbering(str, enum.Enum):
    SEED = "seed"  # the entry for k is itself an order-k class
    MEMBERS = "members"  # the entry for k has the order-k classes as instances

    @property
    def shift(self) -> int:
        """Order of a seed's instances is ``k - shift``."""
        return 1 if self is Numbering.SEED else 0


@dataclass(frozen=True)
class UniversalOrderClasses:
    entries: tuple[tuple[int, str], ...] = DEFAULT_UNIVERSAL
    numbering: Numbering = Numbering.SEED

    def __post_init__(self):
        orders = sorted(k for k, _ in self.entries)
        if orders != list(range(1, len(orders) + 1)):
            raise ValueError(f"universal orders must be distinct and contiguous from 1, got {orders}")

    @property
    def max_order(self) -> int:
        """Highest order any entity can receive."""
        return len(self.entries) - self.numbering.shift

    @classmethod
    def parse(cls, text: str, numbering: Numbering | str = Numbering.SEED) -> "UniversalOrderClasses":
        """Read ``order<TAB>Qid`` lines."""
        rows = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            order, qid = line.split("\t")
            rows.append((int(order), qid.strip()))
        return cls(tuple(sorted(rows)), Numbering(numbering))


class Step(NamedTuple):
    subject: int
    pid: str
    object: int


@dataclass
class _Stratum:
    nodes: np.ndarray  # sorted
    dist: np.ndarray
    seed: np.ndarray
    pred: np.ndarray
    via: np.ndarray

    def lookup(self, x: int) -> int:
        pos = int(np.searchsorted(self.nodes, x))
        if pos < len(self.nodes) and self.nodes[pos] == x:
            return pos
        return -1


@dataclass
class OrderAssignment:
    n_entities: int
    seeds: dict[int, int]  # order -> seed node (only seeds present in the graph)
    strata: dict[int, _Stratum] = field(default_factory=dict)

    def orders(self, x: int) -> frozenset[int]:
        return frozenset(k for k, st in self.strata.items() if st.lookup(x) >= 0)

    def members(self, k: int) -> np.ndarray:
        st = self.strata.get(k)
        return st.nodes if st is not None else np.zeros(0, np.int64)

    def mask(self, k: int) -> np.ndarray:
        m = np.zeros(self.n_entities, dtype=bool)
        m[self.members(k)] = True
        return m

    def as_dict(self) -> dict[int, frozenset[int]]:
        out: dict[int, set[int]] = {}
        for k in sorted(self.strata):
            for x in self.strata[k].nodes.tolist():
                out.setdefault(x, set()).add(k)
        return {x: frozenset(v) for x, v in sorted(out.items())}

    def witness(self, x: int, k: int) -> list[Step]:
        """Derivation of ``(x, k)`` as edges walked from ``x`` up to a seed."""
        steps: list[Step] = []
        node, order = x, k
        while True:
            st = self.strata[order]
            pos = st.lookup(node)
            if pos < 0:
                raise KeyError((x, k))
            pred, via = int(st.pred[pos]), int(st.via[pos])
            if via == _VIA_SUBCLASS:
                steps.append(Step(node, "P279", pred))
            else:
                steps.append(Step(node, "P31", pred))
                if via == _VIA_SEED:
                    return steps
                order += 1
            node = pred


def derive_orders(g: OntoGraph, universal: UniversalOrderClasses | None = None) -> OrderAssignment:
    universal = universal or UniversalOrderClasses()
    seeds: dict[int, int] = {}
    for k, qid in universal.entries:
        try:
            seeds[k] = g.node(qid)
        except UnknownEntityError:
            pass
    result = OrderAssignment(g.n_entities, seeds)
    above: _Stratum | None = None
    shift = universal.numbering.shift
    for k in range(universal.max_order, 0, -1):
        cand = []
        if k + shift in seeds:
            seed = seeds[k + shift]
            inst = g.instance_rev.row(seed)
            cand.append((inst, np.ones(len(inst), np.int64), np.full(len(inst), k + shift, np.int64),
                         np.full(len(inst), seed, np.int64), np.full(len(inst), _VIA_SEED, np.int64)))
        if above is not None and len(above.nodes):
            inst, owner = g.instance_rev.gather(above.nodes)
            cand.append((inst, above.dist[owner] + 1, above.seed[owner], above.nodes[owner],
                         np.full(len(inst), _VIA_INSTANCE, np.int64)))
        stratum = _settle(g, cand)
        if len(stratum.nodes):
            result.strata[k] = stratum
        above = stratum
    return result


def _settle(g: OntoGraph, sources) -> _Stratum:
    """Unit-weight shortest derivations with multi-distance sources.

    Ties on distance go to the smallest seed order, then the smallest
    predecessor, then instance-of over subclass-of.
    """
    n = g.n_entities
    if sources:
        pend = [np.concatenate([s[i] for s in sources]) for i in range(5)]
    else:
        pend = [np.zeros(0, np.int64) for _ in range(5)]
    settled = np.zeros(n, dtype=bool)
    out_nodes, out_dist, out_seed, out_pred, out_via = [], [], [], [], []
    while pend[0].size:
        node, dist, seed, pred, via = pend
        d = dist.min()
        now = dist == d
        nd, sd, pd, vd = node[now], seed[now], pred[now], via[now]
        fresh = ~settled[nd]
        nd, sd, pd, vd = nd[fresh], sd[fresh], pd[fresh], vd[fresh]
        order = np.lexsort((vd, pd, sd, nd))
        nd, sd, pd, vd = nd[order], sd[order], pd[order], vd[order]
        first = np.ones(len(nd), dtype=bool)
        first[1:] = nd[1:] != nd[:-1]
        nd, sd, pd, vd = nd[first], sd[first], pd[first], vd[first]
        settled[nd] = True
        out_nodes.append(nd)
        out_dist.append(np.full(len(nd), d, np.int64))
        out_seed.append(sd)
        out_pred.append(pd)
        out_via.append(vd)
        rest = ~now
        pend = [a[rest] for a in pend]
        kids, owner = g.subclass_rev.gather(nd)
        keep = ~settled[kids]
        kids, owner = kids[keep], owner[keep]
        pend = [
            np.concatenate([pend[0], kids]),
            np.concatenate([pend[1], np.full(len(kids), d + 1, np.int64)]),
            np.concatenate([pend[2], sd[owner]]),
            np.concatenate([pend[3], nd[owner]]),
            np.concatenate([pend[4], np.full(len(kids), _VIA_SUBCLASS, np.int64)]),
        ]
        live = ~settled[pend[0]]
        pend = [a[live] for a in pend]
    if not out_nodes:
        z = np.zeros(0, np.int64)
        return _Stratum(z, z, z, z, z)
    cols = [np.concatenate(c) for c in (out_nodes, out_dist, out_seed, out_pred, out_via)]
    order = np.argsort(cols[0], kind="stable")
    return _Stratum(*(c[order] for c in cols))


def replay_witness(g: OntoGraph, universal: UniversalOrderClasses, steps: Sequence[Step]) -> tuple[int, int]:
    """Re-derive ``(entity, order)`` from a witness chain, checking every edge."""
    from .ingest import EdgeKind

    seed_orders = {}
    for k, qid in universal.entries:
        if g.has(qid):
            seed_orders[g.node(qid)] = k
    if not steps or steps[-1].pid != "P31" or steps[-1].object not in seed_orders:
        raise ValueError("witness does not end at a universal class")
    order = seed_orders[steps[-1].object] + 1 - universal.numbering.shift
    for step in reversed(steps):
        kind = EdgeKind.INSTANCE_OF if step.pid == "P31" else EdgeKind.SUBCLASS_OF
        if not g.has_edge(step.subject, kind, step.object):
            raise ValueError(f"edge not in graph: {step}")
        if kind is EdgeKind.INSTANCE_OF:
            order -= 1
    for a, b in zip(steps, steps[1:]):
        if a.object != b.subject:
            raise ValueError("witness chain is not contiguous")
    if order < 1:
        raise ValueError("witness derives an order below 1")
    return steps[0].subject, order


def order_conflicts(a: OrderAssignment) -> dict[int, frozenset[int]]:
    return {x: ks for x, ks in a.as_dict().items() if len(ks) >= 2}


def order_overlap(a: OrderAssignment, n: int, m: int) -> int:
    if n == m:
        raise ValueError("overlap needs two different orders")
    return int(np.intersect1d(a.members(n), a.members(m), assume_unique=True).size)


# -- metaclass properties ------------------------------------------------------


class MetaRelation(str, enum.Enum):
    METASUBCLASS_OF = "P2445"  # same order as the object
    IS_METACLASS_FOR = "P8225"  # one order above the object


class MetaStatus(str, enum.Enum):
    VIOLATION = "violation"
    UNDECIDABLE = "undecidable"
    ERROR = "error"


@dataclass(frozen=True)
class MetaclassFinding:
    statement: MetaclassStatement
    status: MetaStatus
    expected: str
    subject_orders: frozenset[int]
    object_orders: frozenset[int]


_EXPECTED = {
    MetaRelation.METASUBCLASS_OF: "subject order == object order",
    MetaRelation.IS_METACLASS_FOR: "subject order == object order + 1",
}


def check_metaclass_edges(g: OntoGraph, a: OrderAssignment, edges: Iterable[MetaclassStatement]) -> list[MetaclassFinding]:
    """Violations, undecidable statements and per-edge errors; consistent statements are omitted."""
    findings = []
    for st in edges:
        rel = MetaRelation(st.pid)
        expected = _EXPECTED[rel]
        if not (g.has(st.subject) and g.has(st.object)):
            findings.append(MetaclassFinding(st, MetaStatus.ERROR, expected, frozenset(), frozenset()))
            continue
        so, oo = a.orders(g.node(st.subject)), a.orders(g.node(st.object))
        if not so or not oo:
            findings.append(MetaclassFinding(st, MetaStatus.UNDECIDABLE, expected, so, oo))
            continue
        if rel is MetaRelation.METASUBCLASS_OF:
            ok = bool(so & oo)
        else:
            ok = any(s == o + 1 for s in so for o in oo)
        if not ok:
            findings.append(MetaclassFinding(st, MetaStatus.VIOLATION, expected, so, oo))
    return findings
