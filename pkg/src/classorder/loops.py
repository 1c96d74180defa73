"""Instance loops and the classes they poison."""
from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .census import Selector, class_mask
from .graph import OntoGraph, closure
from .ingest import EdgeKind

Edge = tuple[int, str, int]


class LoopKind(str, enum.Enum):
    SELF_DIRECT = "SelfDirect"
    SELF_VIA_SUBCLASS = "SelfViaSubclass"
    TWO_HOP = "TwoHop"


@dataclass(frozen=True, order=True)
class LoopRecord:
    kind: LoopKind
    members: tuple[int, ...]
    edges: tuple[Edge, ...]


def _subclass_path(g: OntoGraph, start: int, goal: int, min_len: int = 0) -> list[int] | None:
    """Shortest subclass path ``start ⊑ ... ⊑ goal`` with at least ``min_len`` edges.

    Neighbours are explored in ascending order, so ties resolve to the
    lexicographically smallest path.
    """
    if start == goal and min_len == 0:
        return [start]
    sub = g.subclass_of
    parent: dict[int, int] = {}
    queue = deque()
    for y in sub.row(start).tolist():
        if y not in parent:
            parent[y] = start
            queue.append(y)
    while queue:
        x = queue.popleft()
        if x == goal:
            path, cur = [x], x
            while True:
                cur = parent[cur]
                path.append(cur)
                if cur == start:
                    return path[::-1]
        for y in sub.row(x).tolist():
            if y not in parent:
                parent[y] = x
                queue.append(y)
    return None


def _path_edges(path: list[int]) -> list[Edge]:
    return [(a, "P279", b) for a, b in zip(path, path[1:])]


def find_self_loops(g: OntoGraph) -> list[LoopRecord]:
    """Items that are instances of themselves, directly or through subclass-of."""
    inst = g.instance_of
    src, dst = inst.pairs()
    direct = set(src[src == dst].tolist())
    records = [LoopRecord(LoopKind.SELF_DIRECT, (x,), ((x, "P31", x),)) for x in sorted(direct)]
    # reaching x again through subclass-of needs an incoming subclass edge
    # into x and an outgoing one from the instance target
    has_in = g.subclass_rev.degree() > 0
    has_out = g.subclass_of.degree() > 0
    keep = has_in[src] & has_out[dst]
    for x in np.unique(src[keep]).tolist():
        if x in direct:
            continue
        best = None
        for y in inst.row(x).tolist():
            path = _subclass_path(g, y, x, min_len=1)
            if path is not None and (best is None or len(path) < len(best)):
                best = path
        if best is not None:
            edges = ((x, "P31", best[0]), *_path_edges(best))
            records.append(LoopRecord(LoopKind.SELF_VIA_SUBCLASS, (x,), edges))
    records.sort(key=lambda r: r.members)
    return records


class _PathCache:
    """Breadth-first subclass trees, one per start node, built on demand."""

    def __init__(self, g: OntoGraph):
        self.g = g
        self.trees: dict[int, dict[int, int]] = {}

    def tree(self, start: int) -> dict[int, int]:
        tree = self.trees.get(start)
        if tree is None:
            sub = self.g.subclass_of
            tree = {start: start}
            queue = deque([start])
            while queue:
                x = queue.popleft()
                for y in sub.row(x).tolist():
                    if y not in tree:
                        tree[y] = x
                        queue.append(y)
            self.trees[start] = tree
        return tree

    def path(self, start: int, goal: int) -> list[int] | None:
        tree = self.tree(start)
        if goal not in tree:
            return None
        path = [goal]
        while path[-1] != start:
            path.append(tree[path[-1]])
        return path[::-1]


def _type_step(g: OntoGraph, a: int, b: int, direct_only: bool, paths: _PathCache | None = None) -> list[Edge]:
    """Shortest realisation of ``b ∈ type_set(a)``: one instance edge then subclass edges."""
    paths = paths or _PathCache(g)
    best = None
    for t in g.instance_of.row(a).tolist():
        if direct_only and t != b:
            continue
        path = paths.path(t, b)
        if path is not None and (best is None or len(path) < len(best)):
            best = path
    if best is None:
        raise ValueError(f"{b} is not a type of {a}")
    return [(a, "P31", best[0]), *_path_edges(best)]


def type_relation(g: OntoGraph, direct_only: bool = False) -> dict[int, set[int]]:
    """``a -> {b != a : b ∈ type_set(a)}`` over entities that can sit on an instance cycle."""
    inst = g.instance_of
    # b ∈ type_set(a) makes b a class with an instance; a needs its own
    # instance edge to continue the cycle
    eligible = class_mask(g, Selector.HAS_INSTANCE) & (inst.degree() > 0)
    rel: dict[int, set[int]] = {}
    for a in np.flatnonzero(eligible).tolist():
        targets = inst.row(a).tolist()
        reached = set(targets) if direct_only else closure(g.subclass_of, targets)
        reached.discard(a)
        rel[a] = {b for b in reached if eligible[b]}
    return rel


def find_two_hop_loops(g: OntoGraph, direct_only: bool = False) -> list[LoopRecord]:
    """Instance cycles through two or more distinct items.

    Every mutual pair ``a ∈* b``, ``b ∈* a`` is a two-member record. Each
    strongly connected group of three or more items in the type relation also
    gets one record whose edges walk through all members and back.
    """
    rel = type_relation(g, direct_only)
    paths = _PathCache(g)
    records = []
    for a in sorted(rel):
        for b in sorted(rel[a]):
            if a < b and a in rel.get(b, ()):
                edges = (*_type_step(g, a, b, direct_only, paths), *_type_step(g, b, a, direct_only, paths))
                records.append(LoopRecord(LoopKind.TWO_HOP, (a, b), edges))
    nodes = sorted(rel)
    if nodes:
        index = {x: i for i, x in enumerate(nodes)}
        rows = [index[a] for a in nodes for b in rel[a]]
        cols = [index[b] for a in nodes for b in rel[a]]
        mat = csr_matrix((np.ones(len(rows), np.int8), (rows, cols)), shape=(len(nodes), len(nodes)))
        _, labels = connected_components(mat, directed=True, connection="strong")
        groups: dict[int, list[int]] = {}
        for x, lab in zip(nodes, labels.tolist()):
            groups.setdefault(lab, []).append(x)
        for members in groups.values():
            if len(members) >= 3:
                records.append(_closed_walk(g, rel, sorted(members), direct_only, paths))
    records.sort(key=lambda r: (len(r.members), r.members))
    return records


def _closed_walk(g: OntoGraph, rel: dict[int, set[int]], members: list[int], direct_only: bool, paths: _PathCache) -> LoopRecord:
    inside = set(members)
    edges: list[Edge] = []
    stops = members + [members[0]]
    for a, b in zip(stops, stops[1:]):
        parent = {a: a}
        queue = deque([a])
        while queue and b not in parent:
            x = queue.popleft()
            for y in sorted(rel[x] & inside):
                if y not in parent:
                    parent[y] = x
                    queue.append(y)
        hops = [b]
        while hops[-1] != a:
            hops.append(parent[hops[-1]])
        hops.reverse()
        for x, y in zip(hops, hops[1:]):
            edges.extend(_type_step(g, x, y, direct_only, paths))
    return LoopRecord(LoopKind.TWO_HOP, tuple(members), tuple(edges))


def find_loops(g: OntoGraph, direct_only: bool = False) -> list[LoopRecord]:
    return find_self_loops(g) + find_two_hop_loops(g, direct_only)


def loop_members(records: Iterable[LoopRecord]) -> set[int]:
    return {m for r in records for m in r.members}


def loop_affected_classes(g: OntoGraph, seeds: Iterable[int]) -> set[int]:
    """Least fixed point of ``S <- S ∪ type_set(S)`` from ``seeds``.

    Equivalently: the seeds plus everything reachable from a seed by a path
    that starts with an instance edge and continues over either relation.
    """
    seeds = np.unique(np.fromiter((g.check(x) for x in seeds), dtype=np.int64))
    if not seeds.size:
        return set()
    seen = np.zeros(g.n_entities, dtype=bool)
    frontier, _ = g.instance_of.gather(seeds)
    frontier = np.unique(frontier)
    seen[frontier] = True
    while frontier.size:
        a, _ = g.instance_of.gather(frontier)
        b, _ = g.subclass_of.gather(frontier)
        nxt = np.unique(np.concatenate([a, b]))
        nxt = nxt[~seen[nxt]]
        seen[nxt] = True
        frontier = nxt
    seen[seeds] = True
    return set(np.flatnonzero(seen).tolist())


def replay(g: OntoGraph, record: LoopRecord) -> bool:
    """True when the record's edges exist and form a closed walk through its members."""
    if not record.edges:
        return False
    for (s, pid, o), nxt in zip(record.edges, record.edges[1:] + record.edges[:1]):
        kind = EdgeKind.INSTANCE_OF if pid == "P31" else EdgeKind.SUBCLASS_OF
        if not g.has_edge(s, kind, o) or o != nxt[0]:
            return False
    visited = {e[0] for e in record.edges}
    return set(record.members) <= visited
