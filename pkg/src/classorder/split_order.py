"""Split-order classes.

A class ``s`` is split-order when some item ``c`` is both a subclass of ``s``
and a subclass of an instance of ``s`` (all subclass hops possibly empty)::

    c ⊑* s   and   c ⊑* m ∈ t ⊑* s

Pairs are enumerated natively in one pass. Each pair carries the case of the
decomposition it falls in (``Self`` when ``c == s``; otherwise ``AB``, ``C``
or ``D`` depending on which subclass hops around the instance hop are empty)
so results line up with per-case query output.
"""
from __future__ import annotations

import enum
import os
import tempfile
from collections import Counter
from typing import Iterable, Iterator, NamedTuple

import numpy as np

from .graph import OntoGraph, closure, scc_condense

_S_BITS = 30
_S_MASK = (1 << _S_BITS) - 1


class Case(enum.IntEnum):
    SELF = 0
    AB = 1  # c ⊑* m, m ∈ s directly
    C = 2  # c ∈ t ⊑+ s
    D = 3  # c ⊑+ m ∈ t ⊑+ s


class SplitPair(NamedTuple):
    c: int
    s: int
    case: Case


def _pack(c: np.ndarray, s: np.ndarray, case: np.ndarray) -> np.ndarray:
    return (c.astype(np.int64) << (_S_BITS + 2)) | (s.astype(np.int64) << 2) | case.astype(np.int64)


class SplitPairs:
    """Sorted, duplicate-free pair set backed by one packed int64 array.

    Ordering is by ``(c, s)``; each ``(c, s)`` occurs once with one case.
    """

    def __init__(self, keys: np.ndarray):
        self.keys = keys

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[int, int, int]]) -> "SplitPairs":
        rows = list(pairs)
        if not rows:
            return cls(np.zeros(0, np.int64))
        arr = np.array(rows, dtype=np.int64).reshape(-1, 3)
        keys = np.unique(_pack(arr[:, 0], arr[:, 1], arr[:, 2]))
        return cls(keys)

    def __len__(self) -> int:
        return len(self.keys)

    @property
    def c(self) -> np.ndarray:
        return np.asarray(self.keys) >> (_S_BITS + 2)

    @property
    def s(self) -> np.ndarray:
        return (np.asarray(self.keys) >> 2) & _S_MASK

    @property
    def case(self) -> np.ndarray:
        return np.asarray(self.keys) & 3

    @property
    def pair_keys(self) -> np.ndarray:
        return np.asarray(self.keys) >> 2

    def __iter__(self) -> Iterator[SplitPair]:
        for c, s, k in zip(self.c.tolist(), self.s.tolist(), self.case.tolist()):
            yield SplitPair(c, s, Case(k))

    def pairs(self) -> set[tuple[int, int]]:
        return set(zip(self.c.tolist(), self.s.tolist()))

    def classes(self) -> np.ndarray:
        return np.unique(self.s)

    def select(self, mask: np.ndarray) -> "SplitPairs":
        return SplitPairs(np.asarray(self.keys)[mask])

    def difference(self, other: "SplitPairs") -> "SplitPairs":
        return self.select(~np.isin(self.pair_keys, other.pair_keys))

    def contains_pairs(self, pair_keys: np.ndarray) -> np.ndarray:
        own = self.pair_keys
        pos = np.searchsorted(own, pair_keys)
        pos = np.minimum(pos, max(len(own) - 1, 0))
        if len(own) == 0:
            return np.zeros(len(pair_keys), dtype=bool)
        return own[pos] == pair_keys


class PairSpool:
    """Append-only store for packed pairs produced in ascending key order.

    Keys are buffered in memory and spilled to a temporary file once the
    buffer passes ``limit`` entries; the result is then a read-only memmap.
    """

    def __init__(self, limit: int = 1 << 22, directory: str | None = None):
        self.limit = limit
        self.directory = directory
        self._buf: list[np.ndarray] = []
        self._buffered = 0
        self._file = None
        self._written = 0
        self._last = -1

    def add(self, keys: np.ndarray) -> None:
        if not len(keys):
            return
        if keys[0] <= self._last:
            raise ValueError("spool keys must arrive in ascending order")
        self._last = int(keys[-1])
        self._buf.append(keys)
        self._buffered += len(keys)
        if self._buffered >= self.limit:
            self._spill()

    def _spill(self) -> None:
        if self._file is None:
            fd, self._path = tempfile.mkstemp(prefix="split-pairs-", suffix=".i64", dir=self.directory)
            self._file = os.fdopen(fd, "wb")
        for chunk in self._buf:
            chunk.astype(np.int64).tofile(self._file)
            self._written += len(chunk)
        self._buf, self._buffered = [], 0

    def finish(self) -> np.ndarray:
        if self._file is None:
            return np.concatenate(self._buf) if self._buf else np.zeros(0, np.int64)
        self._spill()
        self._file.close()
        arr = np.memmap(self._path, dtype=np.int64, mode="r", shape=(self._written,)) if self._written else np.zeros(0, np.int64)
        os.unlink(self._path)  # the mapping stays valid on POSIX
        return arr


def split_pairs_raw(g: OntoGraph, spool_limit: int = 1 << 22) -> SplitPairs:
    """All ``(c, s)`` with ``c ⊑* s`` and ``c ⊑* m ∈ t ⊑* s``, tagged by case.

    Entities are visited in ascending order so the output streams into a
    sorted spool; up-sets are shared by every member of a subclass cycle.
    """
    sub, inst = g.subclass_of, g.instance_of
    sub_out = sub.degree() > 0
    sub_in = g.subclass_rev.degree() > 0
    inst_out = inst.degree() > 0
    # with no outgoing subclass edge the up-set is {c}, so only (c, c) can
    # form; without incoming subclass edges that needs a direct c ∈ c
    isrc, idst = inst.pairs()
    self_inst = np.zeros(g.n_entities, dtype=bool)
    self_inst[isrc[isrc == idst]] = True
    todo = np.flatnonzero(sub_out | (inst_out & sub_in) | self_inst)
    scc = scc_condense(g)
    shared_up = scc.members.degree() > 1
    cache: dict[int, tuple[set[int], set[int]]] = {}
    spool = PairSpool(spool_limit)
    for c in todo.tolist():
        comp = int(scc.component[c])
        if comp in cache:
            direct, shared = cache[comp]
        else:
            up = closure(sub, [c])
            direct = set()
            for m in up:
                direct.update(inst.indices[inst.indptr[m] : inst.indptr[m + 1]].tolist())
            shared = (closure(sub, direct) & up) if direct else set()
            if shared_up[comp]:
                cache[comp] = (direct, shared)
        if not shared:
            continue
        own_types = inst.indices[inst.indptr[c] : inst.indptr[c + 1]].tolist()
        strict_own = closure(sub, own_types, reflexive=False) if own_types else set()
        ss = sorted(shared)
        cases = []
        for s in ss:
            if s == c:
                cases.append(Case.SELF)
            elif s in direct:
                cases.append(Case.AB)
            elif s in strict_own:
                cases.append(Case.C)
            else:
                cases.append(Case.D)
        spool.add(_pack(np.full(len(ss), c, np.int64), np.array(ss, dtype=np.int64), np.array(cases, np.int64)))
    return SplitPairs(spool.finish())


def split_exclusions(g: OntoGraph, raw: SplitPairs, chunk: int = 1 << 20) -> SplitPairs:
    """Pairs of ``raw`` reducible to a pair one subclass step closer.

    ``(c, s)`` is discarded when ``(c', s)`` is in ``raw`` for a direct
    superclass ``c' != c`` of ``c``, or ``(c, s')`` is in ``raw`` for a direct
    subclass ``s'`` of ``s`` with ``s' != s`` and ``s' != c``. Self pairs stay.
    """
    keys = np.asarray(raw.keys)
    drop = np.zeros(len(keys), dtype=bool)
    for lo in range(0, len(keys), chunk):
        part = SplitPairs(keys[lo : lo + chunk])
        c, s = part.c, part.s
        cand = c != s
        idx = np.flatnonzero(cand)
        hit = np.zeros(len(idx), dtype=bool)
        sup, owner = g.subclass_of.gather(c[idx])
        ok = sup != c[idx][owner]
        probe = (sup[ok] << _S_BITS) | s[idx][owner[ok]]
        hit[np.unique(owner[ok][raw.contains_pairs(probe)])] = True
        kids, owner = g.subclass_rev.gather(s[idx])
        ok = (kids != s[idx][owner]) & (kids != c[idx][owner])
        probe = (c[idx][owner[ok]] << _S_BITS) | kids[ok]
        hit[np.unique(owner[ok][raw.contains_pairs(probe)])] = True
        drop[lo + idx[hit]] = True
    return SplitPairs(keys[drop])


def split_reduce(g: OntoGraph, raw: SplitPairs, iterate: bool = False) -> tuple[SplitPairs, SplitPairs]:
    """``(reduced, excluded)`` with ``raw`` = reduced ⊎ excluded.

    One exclusion pass by default. With ``iterate`` the pass is repeated on
    the survivors until it removes nothing.
    """
    excluded = split_exclusions(g, raw)
    reduced = raw.difference(excluded)
    while iterate and len(excluded):
        excluded = split_exclusions(g, reduced)
        reduced = reduced.difference(excluded)
    return reduced, raw.difference(reduced)


def split_classes(pairs: SplitPairs) -> set[int]:
    return set(pairs.classes().tolist())


class HistogramRow(NamedTuple):
    cumulative: int
    count: int
    cls: int
    samples: tuple[int, ...]


def split_histogram(pairs: SplitPairs, n_samples: int = 9) -> list[HistogramRow]:
    """Witness counts per split-order class, ascending, with a running total."""
    c, s = pairs.c, pairs.s
    if not len(s):
        return []
    order = np.lexsort((c, s))
    c, s = c[order], s[order]
    classes, starts, counts = np.unique(s, return_index=True, return_counts=True)
    rank = np.lexsort((classes, counts))
    rows, running = [], 0
    for i in rank.tolist():
        running += int(counts[i])
        lo = int(starts[i])
        rows.append(HistogramRow(running, int(counts[i]), int(classes[i]), tuple(c[lo : lo + min(n_samples, counts[i])].tolist())))
    return rows


def histogram_summary(rows: list[HistogramRow], few: int = 10) -> dict[str, int]:
    sizes = Counter(r.count for r in rows)
    return {
        "classes": len(rows),
        "single_witness": sizes.get(1, 0),
        f"at_most_{few}": sum(v for k, v in sizes.items() if k <= few),
    }


# -- per-case evaluation, one query shape at a time ---------------------------


def case_pairs(g: OntoGraph, case: Case) -> set[tuple[int, int]]:
    """Pairs matched by one case's own pattern, evaluated independently.

    ``SELF`` is the unified pattern restricted to ``c == s``. ``AB``, ``C``
    and ``D`` are the proper-subclass subcases::

        AB: c ⊑+ s  and  c ⊑* m ∈ s
        C:  c ⊑+ s  and  c ∈ t ⊑+ s
        D:  c ⊑+ s  and  c ⊑+ m ∈ t ⊑+ s
    """
    sub, inst = g.subclass_of, g.instance_of
    out: set[tuple[int, int]] = set()
    for c in range(g.n_entities):
        strict_up = closure(sub, [c], reflexive=False)
        if case is Case.SELF:
            up = strict_up | {c}
            types = set()
            for m in up:
                types.update(inst.row(m).tolist())
            if c in closure(sub, types):
                out.add((c, c))
            continue
        targets: set[int] = set()
        if case is Case.AB:
            for m in strict_up | {c}:
                targets.update(inst.row(m).tolist())
        elif case is Case.C:
            targets = closure(sub, inst.row(c).tolist(), reflexive=False)
        else:
            ts = set()
            for m in strict_up:
                ts.update(inst.row(m).tolist())
            targets = closure(sub, ts, reflexive=False)
        out.update((c, s) for s in strict_up & targets)
    # a proper-subclass case never pairs an entity with itself
    if case is not Case.SELF:
        out = {(c, s) for c, s in out if c != s}
    return out


def self_case_simplified(g: OntoGraph) -> set[int]:
    """Literal self-case query: ``c ∈ c`` or ``c ∈ t ⊑+ c``.

    This omits loops entered through a superclass first (``c ⊑+ m ∈ t ⊑* c``),
    which the unified pattern does catch.
    """
    out = set()
    for c in range(g.n_entities):
        types = g.instance_of.row(c).tolist()
        if c in types or c in closure(g.subclass_of, types, reflexive=False):
            out.add(c)
    return out
