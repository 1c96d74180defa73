"""Minimum-order level sets from instance chains that start at a class."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .census import ClassDef, Selector, class_mask
from .graph import OntoGraph, type_mask

DEFAULT_MAX_LEVEL = 6


@dataclass
class MinOrderLevels:
    levels: list[np.ndarray]  # boolean masks, levels[0] is L1
    class_def: ClassDef

    @property
    def k(self) -> int:
        return len(self.levels)

    def level(self, n: int) -> set[int]:
        return set(np.flatnonzero(self.levels[n - 1]).tolist())

    def counts(self) -> list[int]:
        return [int(m.sum()) for m in self.levels]


def min_order_levels(g: OntoGraph, cdef: ClassDef | Selector | str = Selector.ANY_OF, k: int = DEFAULT_MAX_LEVEL) -> MinOrderLevels:
    """``L1`` is the class set; ``L(n+1)`` is the union of ``type_set`` over ``Ln``.

    Each level is deduplicated before the next hop. Once a level repeats,
    every later level is the same set, so the remaining levels are copied.
    """
    if k < 1:
        raise ValueError(f"max level must be >= 1, got {k}")
    if not isinstance(cdef, ClassDef):
        cdef = ClassDef(Selector(cdef))
    levels = [class_mask(g, cdef)]
    while len(levels) < k:
        prev = levels[-1]
        nxt = type_mask(g, np.flatnonzero(prev))
        levels.append(nxt)
        if np.array_equal(nxt, prev):
            levels.extend(nxt for _ in range(k - len(levels)))
    return MinOrderLevels(levels, cdef)


def min_order_of(levels: MinOrderLevels, x: int) -> int:
    """Largest computed level containing ``x``, or 0 when ``x`` is not in L1."""
    best = 0
    for n, mask in enumerate(levels.levels, start=1):
        if mask[x]:
            best = n
    return best
