"""Immutable dual-relation ontology graph and its closure primitives.

Entities are interned to dense indices ``0..n-1`` in ascending numeric ``Q``
order, so sorting dense indices sorts entities numerically. Both relations are
stored as CSR adjacency in both directions.

Every closure here is the SPARQL ``*`` closure: reflexive for every entity,
class or not, and tolerant of subclass cycles.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .ingest import EdgeKind, EdgeList, RawEdge, parse_qid


class UnknownEntityError(LookupError):
    pass


@dataclass(frozen=True, eq=False)
class Csr:
    indptr: np.ndarray
    indices: np.ndarray

    @classmethod
    def build(cls, n: int, src: np.ndarray, dst: np.ndarray) -> "Csr":
        """CSR with sorted, duplicate-free rows."""
        if src.size:
            # columns may range wider than rows (component -> member lists)
            m = max(n, int(dst.max()) + 1)
            key = np.unique(src.astype(np.int64) * m + dst)
            src, dst = key // m, key % m
        counts = np.bincount(src, minlength=n) if n else np.zeros(0, np.int64)
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        return cls(indptr, dst.astype(np.int64))

    @property
    def n(self) -> int:
        return len(self.indptr) - 1

    @property
    def n_edges(self) -> int:
        return len(self.indices)

    def row(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i] : self.indptr[i + 1]]

    def degree(self) -> np.ndarray:
        return np.diff(self.indptr)

    def gather(self, nodes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Concatenated neighbours of ``nodes`` plus the position of their owner."""
        starts = self.indptr[nodes]
        counts = self.indptr[nodes + 1] - starts
        total = int(counts.sum())
        if total == 0:
            return np.zeros(0, np.int64), np.zeros(0, np.int64)
        owner = np.repeat(np.arange(len(nodes)), counts)
        offsets = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
        return self.indices[starts[owner] + offsets], owner

    def transpose(self) -> "Csr":
        src = np.repeat(np.arange(self.n), self.degree())
        return Csr.build(self.n, self.indices, src)

    def pairs(self) -> tuple[np.ndarray, np.ndarray]:
        return np.repeat(np.arange(self.n), self.degree()), self.indices


def reach(adj: Csr, sources: np.ndarray | Iterable[int], reflexive: bool = True) -> np.ndarray:
    """Boolean mask of nodes reachable from ``sources``.

    With ``reflexive=False`` only nodes at the end of a path of length >= 1
    are marked (a source is marked only if it lies on a cycle or is reachable
    from another source).
    """
    seen = np.zeros(adj.n, dtype=bool)
    frontier = np.unique(np.asarray(list(sources) if not isinstance(sources, np.ndarray) else sources, dtype=np.int64))
    if reflexive:
        seen[frontier] = True
    else:
        frontier, _ = adj.gather(frontier)
        frontier = np.unique(frontier)
        seen[frontier] = True
    while frontier.size:
        nxt, _ = adj.gather(frontier)
        nxt = np.unique(nxt[~seen[nxt]])
        seen[nxt] = True
        frontier = nxt
    return seen


def closure(adj: Csr, starts: Iterable[int], reflexive: bool = True) -> set[int]:
    """Set-based closure for small frontiers; see :func:`reach` for whole-graph masks."""
    indptr, indices = adj.indptr, adj.indices
    if reflexive:
        seen = set(starts)
        stack = list(seen)
    else:
        seen = set()
        stack = []
        for x in starts:
            for y in indices[indptr[x] : indptr[x + 1]].tolist():
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
    while stack:
        x = stack.pop()
        for y in indices[indptr[x] : indptr[x + 1]].tolist():
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return seen


@dataclass(frozen=True, eq=False)
class OntoGraph:
    qids: np.ndarray
    instance_of: Csr
    instance_rev: Csr
    subclass_of: Csr
    subclass_rev: Csr
    labels: dict[int, str]

    @property
    def n_entities(self) -> int:
        return len(self.qids)

    @property
    def n_instance_edges(self) -> int:
        return self.instance_of.n_edges

    @property
    def n_subclass_edges(self) -> int:
        return self.subclass_of.n_edges

    def node(self, ident: str | int) -> int:
        """Dense index of an entity given as ``"Q42"`` or as the integer 42."""
        value = parse_qid(ident) if isinstance(ident, str) else int(ident)
        pos = int(np.searchsorted(self.qids, value))
        if pos >= len(self.qids) or self.qids[pos] != value:
            raise UnknownEntityError(f"Q{value}")
        return pos

    def has(self, ident: str | int) -> bool:
        try:
            self.node(ident)
        except (UnknownEntityError, ValueError):
            return False
        return True

    def qid(self, i: int) -> str:
        return f"Q{int(self.qids[i])}"

    def label(self, i: int) -> str:
        return self.labels.get(int(i), "")

    def render(self, nodes: Iterable[int]) -> list[str]:
        return [self.qid(i) for i in sorted(int(x) for x in nodes)]

    def nodes(self, idents: Iterable[str | int]) -> set[int]:
        return {self.node(x) for x in idents}

    def check(self, x: int) -> int:
        if not 0 <= int(x) < self.n_entities:
            raise UnknownEntityError(f"dense index {x}")
        return int(x)

    def edges(self) -> Iterator[tuple[int, EdgeKind, int]]:
        """Edges over dense indices, sorted by (subject, kind, object)."""
        per_subject: list[tuple[int, EdgeKind, int]] = []
        for rel, kind in ((self.instance_of, EdgeKind.INSTANCE_OF), (self.subclass_of, EdgeKind.SUBCLASS_OF)):
            s, o = rel.pairs()
            per_subject.extend(zip(s.tolist(), [kind] * len(s), o.tolist()))
        per_subject.sort()
        return iter(per_subject)

    def has_edge(self, s: int, kind: EdgeKind, o: int) -> bool:
        rel = self.instance_of if kind is EdgeKind.INSTANCE_OF else self.subclass_of
        row = rel.row(s)
        pos = np.searchsorted(row, o)
        return bool(pos < len(row) and row[pos] == o)

    def to_edge_list(self) -> EdgeList:
        return EdgeList.from_edges(
            ((int(self.qids[s]), int(k), int(self.qids[o])) for s, k, o in self.edges()),
            {int(self.qids[i]): t for i, t in self.labels.items()},
        )

    def without_edges(self, removed: Iterable[tuple[int, EdgeKind, int]]) -> "OntoGraph":
        """Copy with the given dense-index edges dropped. The entity universe is kept."""
        drop = {(int(s), EdgeKind(k), int(o)) for s, k, o in removed}
        rows = [e for e in self.edges() if e not in drop]
        return _from_dense(self.qids, rows, self.labels)


def _from_dense(qids: np.ndarray, rows, labels: dict[int, str]) -> OntoGraph:
    src = np.array([r[0] for r in rows], dtype=np.int64)
    kind = np.array([int(r[1]) for r in rows], dtype=np.int8)
    dst = np.array([r[2] for r in rows], dtype=np.int64)
    return _assemble(qids, src, kind, dst, dict(labels))


def _assemble(qids, src, kind, dst, labels) -> OntoGraph:
    n = len(qids)
    inst = kind == EdgeKind.INSTANCE_OF
    sub = ~inst
    return OntoGraph(
        qids=qids,
        instance_of=Csr.build(n, src[inst], dst[inst]),
        instance_rev=Csr.build(n, dst[inst], src[inst]),
        subclass_of=Csr.build(n, src[sub], dst[sub]),
        subclass_rev=Csr.build(n, dst[sub], src[sub]),
        labels=labels,
    )


def build_graph(edges: EdgeList | Iterable[RawEdge], labels: dict[int, str] | None = None) -> OntoGraph:
    """Intern Q values to dense indices and build both relations.

    The entity universe is every id appearing in an edge or a label.
    """
    if not isinstance(edges, EdgeList):
        edges = EdgeList.from_edges(edges, labels)
    elif labels:
        edges = EdgeList(edges.subjects, edges.kinds, edges.objects, {**edges.labels, **labels}, edges.stats)
    label_ids = np.fromiter(edges.labels.keys(), dtype=np.int64, count=len(edges.labels))
    qids = np.unique(np.concatenate([edges.subjects, edges.objects, label_ids]))
    src = np.searchsorted(qids, edges.subjects)
    dst = np.searchsorted(qids, edges.objects)
    dense_labels = {int(np.searchsorted(qids, q)): t for q, t in edges.labels.items()}
    return _assemble(qids, src, edges.kinds, dst, dense_labels)


# -- closures ----------------------------------------------------------------


def up_mask(g: OntoGraph, nodes: Iterable[int] | np.ndarray) -> np.ndarray:
    return reach(g.subclass_of, np.asarray(list(nodes) if not isinstance(nodes, np.ndarray) else nodes, np.int64))


def down_mask(g: OntoGraph, nodes: Iterable[int] | np.ndarray) -> np.ndarray:
    return reach(g.subclass_rev, np.asarray(list(nodes) if not isinstance(nodes, np.ndarray) else nodes, np.int64))


def type_mask(g: OntoGraph, nodes: Iterable[int] | np.ndarray) -> np.ndarray:
    """Union of ``type_set`` over ``nodes``: one instance hop, then subclass*."""
    nodes = np.asarray(list(nodes) if not isinstance(nodes, np.ndarray) else nodes, np.int64)
    targets, _ = g.instance_of.gather(nodes)
    return reach(g.subclass_of, targets)


def up_set(g: OntoGraph, x: int) -> set[int]:
    """Everything ``x`` reaches by zero or more subclass-of edges."""
    return set(np.flatnonzero(up_mask(g, [g.check(x)])).tolist())


def down_set(g: OntoGraph, x: int) -> set[int]:
    """Everything reaching ``x`` by zero or more subclass-of edges."""
    return set(np.flatnonzero(down_mask(g, [g.check(x)])).tolist())


def type_set(g: OntoGraph, x: int) -> set[int]:
    return set(np.flatnonzero(type_mask(g, [g.check(x)])).tolist())


# -- strongly connected components of subclass_of ------------------------------


@dataclass(frozen=True, eq=False)
class SccIndex:
    component: np.ndarray  # entity -> component id
    members: Csr  # component -> sorted member entities
    dag: Csr  # condensation edges between distinct components
    topo_order: np.ndarray  # components, sources first
    cyclic: np.ndarray  # component contains a subclass cycle (size > 1 or self edge)

    @property
    def n_components(self) -> int:
        return self.members.n

    def component_up(self, comp: int) -> np.ndarray:
        return np.flatnonzero(reach(self.dag, np.array([comp], np.int64)))

    def up_set(self, x: int) -> set[int]:
        comps = self.component_up(int(self.component[x]))
        nodes, _ = self.members.gather(comps)
        return set(nodes.tolist())


def scc_condense(g: OntoGraph) -> SccIndex:
    n = g.n_entities
    src, dst = g.subclass_of.pairs()
    if n == 0:
        empty = Csr(np.zeros(1, np.int64), np.zeros(0, np.int64))
        return SccIndex(np.zeros(0, np.int64), empty, empty, np.zeros(0, np.int64), np.zeros(0, bool))
    mat = csr_matrix((np.ones(len(src), np.int8), (src, dst)), shape=(n, n))
    k, labels = connected_components(mat, directed=True, connection="strong")
    # renumber components by their smallest member so ids are deterministic
    first = np.full(k, n, dtype=np.int64)
    np.minimum.at(first, labels, np.arange(n))
    rank = np.empty(k, np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(k)
    comp = rank[labels].astype(np.int64)
    members = Csr.build(k, comp, np.arange(n, dtype=np.int64))
    cs, cd = comp[src], comp[dst]
    cross = cs != cd
    dag = Csr.build(k, cs[cross], cd[cross])
    cyclic = members.degree() > 1
    cyclic[cs[~cross]] = True
    return SccIndex(comp, members, dag, _topological(dag), cyclic)


def _topological(dag: Csr) -> np.ndarray:
    """Kahn's algorithm, level by level; raises if the graph has a cycle."""
    indeg = np.bincount(dag.indices, minlength=dag.n)
    frontier = np.flatnonzero(indeg == 0)
    order = []
    while frontier.size:
        order.append(frontier)
        nxt, _ = dag.gather(frontier)
        np.subtract.at(indeg, nxt, 1)
        cand = np.unique(nxt)
        frontier = cand[indeg[cand] == 0]
    out = np.concatenate(order) if order else np.zeros(0, np.int64)
    if len(out) != dag.n:
        raise ValueError("condensation is not acyclic")
    return out
