"""Definitional reference implementations and small fixtures.

Everything here works on plain Python sets of ``(subject, object)`` Q-value
pairs and follows the definitions literally: closures by depth-first search,
split pairs by a triple loop, orders by applying the two rules until nothing
changes. It shares no code with the production analyses, so agreement between
the two is evidence rather than tautology. Intended for graphs of at most a
few hundred entities.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

from .census import CLASS_CLASS, Selector
from .fixed_order import DEFAULT_UNIVERSAL
from .graph import OntoGraph, build_graph
from .ingest import EdgeKind, EdgeList, parse_qid, render_tsv

Pair = tuple[int, int]


@dataclass(frozen=True)
class SmallGraph:
    """Edge sets over Q values; ``extra`` holds entities that appear in no edge."""

    p31: frozenset[Pair]
    p279: frozenset[Pair]
    extra: frozenset[int] = frozenset()
    labels: dict[int, str] = field(default_factory=dict, hash=False, compare=False)

    @classmethod
    def of(cls, p31: Iterable[Pair] = (), p279: Iterable[Pair] = (), extra: Iterable[int] = ()) -> "SmallGraph":
        return cls(frozenset(p31), frozenset(p279), frozenset(extra))

    @cached_property
    def entities(self) -> frozenset[int]:
        out = set(self.extra)
        for s, o in self.p31 | self.p279:
            out.update((s, o))
        return frozenset(out)

    @cached_property
    def adjacency(self) -> dict[str, dict[int, list[int]]]:
        """Sorted successor lists per relation, ``"P279-"`` being the reverse of P279."""
        out: dict[str, dict[int, list[int]]] = {"P31": {}, "P279": {}, "P279-": {}}
        for name, rel in (("P31", self.p31), ("P279", self.p279), ("P279-", {(o, s) for s, o in self.p279})):
            for s, o in sorted(rel):
                out[name].setdefault(s, []).append(o)
        return out

    def edge_list(self) -> EdgeList:
        rows = [(s, EdgeKind.INSTANCE_OF, o) for s, o in self.p31]
        rows += [(s, EdgeKind.SUBCLASS_OF, o) for s, o in self.p279]
        labels = dict(self.labels)
        for x in self.extra:
            labels.setdefault(x, f"Q{x}")
        return EdgeList.from_edges(rows, labels)

    def build(self) -> OntoGraph:
        return build_graph(self.edge_list())

    def to_tsv(self) -> str:
        return render_tsv(self.edge_list())


def _dfs(adj: dict[int, list[int]], starts: Iterable[int], reflexive: bool) -> set[int]:
    seen: set[int] = set(starts) if reflexive else set()
    stack = list(starts)
    while stack:
        x = stack.pop()
        for y in adj.get(x, ()):
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return seen


def _require(g: SmallGraph, x: int) -> None:
    if x not in g.entities:
        raise LookupError(f"Q{x} not in graph")


def naive_up_set(g: SmallGraph, x: int, strict: bool = False) -> set[int]:
    _require(g, x)
    return _dfs(g.adjacency["P279"], [x], reflexive=not strict)


def naive_down_set(g: SmallGraph, x: int) -> set[int]:
    _require(g, x)
    return _dfs(g.adjacency["P279-"], [x], reflexive=True)


def naive_type_set(g: SmallGraph, x: int) -> set[int]:
    _require(g, x)
    out: set[int] = set()
    for y in g.adjacency["P31"].get(x, ()):
        out |= naive_up_set(g, y)
    return out


# -- classes -------------------------------------------------------------------


def naive_classes(g: SmallGraph, selector: Selector | str, class_class: int = parse_qid(CLASS_CLASS)) -> set[int]:
    selector = Selector(selector)
    if selector is Selector.HAS_INSTANCE:
        out: set[int] = set()
        for _, c in g.p31:
            out |= naive_up_set(g, c)
        return out
    if selector is Selector.HAS_SUB_OR_SUPER:
        return {x for pair in g.p279 for x in pair}
    if selector is Selector.INSTANCE_OF_CLASS_CLASS:
        return {x for x in g.entities if class_class in naive_type_set(g, x)}
    return set().union(*(naive_classes(g, s, class_class) for s in
                         (Selector.HAS_INSTANCE, Selector.HAS_SUB_OR_SUPER, Selector.INSTANCE_OF_CLASS_CLASS)))


def naive_census(g: SmallGraph, class_class: int = parse_qid(CLASS_CLASS)) -> dict[Selector, int]:
    return {s: len(naive_classes(g, s, class_class)) for s in Selector}


# -- minimum-order levels ------------------------------------------------------


def naive_min_levels(g: SmallGraph, selector: Selector | str, k: int, class_class: int = parse_qid(CLASS_CLASS)) -> list[set[int]]:
    """``L[n-1]`` = ends of instance chains ``x0 ∈ x1 ∈ ... ∈ x(n-1)`` with ``x0`` a class.

    Chains are enumerated depth first; a ``(node, depth)`` state is expanded
    once since its continuations do not depend on how it was reached.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    types = {x: naive_type_set(g, x) for x in g.entities}
    levels: list[set[int]] = [set() for _ in range(k)]
    expanded: set[tuple[int, int]] = set()

    def walk(x: int, depth: int) -> None:
        if (x, depth) in expanded:
            return
        expanded.add((x, depth))
        levels[depth].add(x)
        if depth + 1 < k:
            for y in types[x]:
                walk(y, depth + 1)

    for x0 in sorted(naive_classes(g, selector, class_class)):
        walk(x0, 0)
    return levels


# -- split pairs -----------------------------------------------------------------


def naive_split_pairs(g: SmallGraph) -> set[Pair]:
    """Triple loop: ``s ∈ up(c)``, ``m ∈ up(c)``, ``m ∈ t`` with ``s ∈ up(t)``."""
    ents = sorted(g.entities)
    up = {x: naive_up_set(g, x) for x in ents}
    out = set()
    for c in ents:
        for m in ents:
            if m not in up[c]:
                continue
            for s in ents:
                if s in up[c] and any(s in up[t] for t in g.adjacency["P31"].get(m, ())):
                    out.add((c, s))
    return out


def naive_split_exclusions(g: SmallGraph, raw: set[Pair]) -> set[Pair]:
    out = set()
    for c, s in raw:
        if c == s:
            continue
        if any((sup, s) in raw for sup in g.adjacency["P279"].get(c, ()) if sup != c):
            out.add((c, s))
        elif any((c, kid) in raw for kid in g.adjacency["P279-"].get(s, ()) if kid not in (s, c)):
            out.add((c, s))
    return out


# -- loops ---------------------------------------------------------------------


def naive_loops(g: SmallGraph) -> dict[str, set[tuple[int, ...]]]:
    """Member tuples per loop kind, found from the definitions.

    ``SelfViaSubclass`` lists items that reach themselves through an instance
    edge and at least one subclass edge but have no direct self-instance edge.
    ``TwoHop`` holds mutual pairs under ``type_set`` and every strongly
    connected group of three or more items in that relation.
    """
    ents = sorted(g.entities)
    direct = {(x,) for x, y in g.p31 if x == y}
    via = set()
    for x, y in g.p31:
        if (x,) not in direct and x in naive_up_set(g, y, strict=True):
            via.add((x,))
    rel = {a: naive_type_set(g, a) - {a} for a in ents}
    pairs = {(a, b) for a in ents for b in rel[a] if a < b and a in rel[b]}
    rel_adj = {a: sorted(bs) for a, bs in rel.items()}
    reach = {a: _dfs(rel_adj, [a], reflexive=True) for a in ents}
    groups = {tuple(sorted(b for b in ents if b in reach[a] and a in reach[b])) for a in ents}
    big = {grp for grp in groups if len(grp) >= 3}
    return {"SelfDirect": direct, "SelfViaSubclass": via, "TwoHop": pairs | big}


def naive_affected(g: SmallGraph, seeds: Iterable[int]) -> set[int]:
    current = set(seeds)
    while True:
        grown = current.union(*(naive_type_set(g, x) for x in current)) if current else set()
        if grown == current:
            return current
        current = grown


# -- fixed orders --------------------------------------------------------------


def naive_orders(g: SmallGraph, universal: Iterable[tuple[int, int]], members: bool = False) -> dict[int, set[int]]:
    """Least fixed point of the two order rules; ``universal`` is ``(order, Q value)``.

    The universal class listed for ``k`` is an order-``k`` class, so its
    instances have order ``k - 1``. With ``members`` its instances have order
    ``k`` instead.
    """
    seeds = dict(universal)
    known: set[tuple[int, int]] = set()
    for k, u in seeds.items():
        own = k if members else k - 1
        if own >= 1:
            known.update((x, own) for x, y in g.p31 if y == u)
    while True:
        new = set()
        for x, y in g.p31:
            new.update((x, k - 1) for z, k in known if z == y and k > 1)
        for x, y in g.p279:
            new.update((x, k) for z, k in known if z == y)
        if new <= known:
            break
        known |= new
    out: dict[int, set[int]] = {}
    for x, k in known:
        out.setdefault(x, set()).add(k)
    return out


def query_orders(g: SmallGraph, third_order_class: int) -> dict[int, set[int]]:
    """The three hand-simplified queries for third-, second- and first-order classes.

    Valid only when the order-3 universal class is the sole seed with instances.
    """
    u3 = third_order_class
    inst_of = lambda targets: {x for x, y in g.p31 if y in targets}  # noqa: E731
    down = lambda targets: set().union(*(naive_down_set(g, t) for t in targets if t in g.entities)) if targets else set()  # noqa: E731

    direct3 = inst_of({u3})
    third = down(direct3)  # ?third wdt:P279*/wdt:P31 u3
    second = down(inst_of(third))  # ?second wdt:P279*/wdt:P31/wdt:P279*/wdt:P31 u3
    c = inst_of(third)
    c = inst_of(down(c))  # ?c wdt:P31/wdt:P279*/wdt:P31/wdt:P279*/wdt:P31 u3
    first = down(c)  # ?first wdt:P279* ?c
    out: dict[int, set[int]] = {}
    for k, members in ((3, third), (2, second), (1, first)):
        for x in members:
            out.setdefault(x, set()).add(k)
    return out


# -- fixtures and random graphs --------------------------------------------------


G1 = SmallGraph.of(
    p31=[(2, 1), (3, 2), (4, 3), (5, 5), (6, 7), (7, 6), (8, 1), (11, 9)],
    p279=[(9, 1), (10, 9), (11, 1)],
)

G2 = SmallGraph.of(
    p31=[(901, 24017414), (903, 24017414), (903, 24017465)],
    p279=[(902, 901)],
)

UNIVERSAL_QIDS = tuple((k, parse_qid(q)) for k, q in DEFAULT_UNIVERSAL)


@dataclass(frozen=True)
class RandomGraphConfig:
    max_nodes: int = 60
    p_instance: float = 0.05
    p_subclass: float = 0.05
    p_forced_self_loop: float = 0.10
    inject_loops: bool = False


def random_graph(seed: int, cfg: RandomGraphConfig = RandomGraphConfig()) -> SmallGraph:
    """Erdős–Rényi style edges over ``Q1..Qn``, ``n`` uniform in ``[2, max_nodes]``.

    Self pairs are never drawn at random; with probability
    ``p_forced_self_loop`` one node gets ``x ∈ x``. With ``inject_loops`` a
    self loop, a loop through a subclass edge and a two-item instance cycle
    are added on random nodes.
    """
    rng = random.Random(seed)
    n = rng.randint(2, cfg.max_nodes)
    nodes = range(1, n + 1)
    p31 = {(a, b) for a in nodes for b in nodes if a != b and rng.random() < cfg.p_instance}
    p279 = {(a, b) for a in nodes for b in nodes if a != b and rng.random() < cfg.p_subclass}
    if rng.random() < cfg.p_forced_self_loop:
        x = rng.randint(1, n)
        p31.add((x, x))
    if cfg.inject_loops and n >= 3:
        x = rng.randint(1, n)
        p31.add((x, x))
        a, b = rng.sample(range(1, n + 1), 2)
        p31.add((a, b))
        p279.add((b, a))
        a, b = rng.sample(range(1, n + 1), 2)
        p31.update({(a, b), (b, a)})
    return SmallGraph.of(p31, p279, extra=nodes)


def random_universal(seed: int, g: SmallGraph, n_orders: int = 5) -> tuple[tuple[int, int], ...]:
    """Pick distinct graph entities to act as universal classes for ``1..n_orders``."""
    rng = random.Random(seed ^ 0x5EED)
    ents = sorted(g.entities)
    picked = rng.sample(ents, min(n_orders, len(ents)))
    return tuple((k + 1, q) for k, q in enumerate(picked))
