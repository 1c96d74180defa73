"""Which entities count as classes, under several definitions."""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .graph import OntoGraph, UnknownEntityError, down_mask, reach

CLASS_CLASS = "Q16889133"


class Selector(str, enum.Enum):
    HAS_INSTANCE = "instance"
    HAS_SUB_OR_SUPER = "subsuper"
    INSTANCE_OF_CLASS_CLASS = "classclass"
    ANY_OF = "any"


@dataclass(frozen=True)
class ClassDef:
    selector: Selector = Selector.ANY_OF
    class_class: str = CLASS_CLASS


def class_mask(g: OntoGraph, cdef: ClassDef | Selector | str = Selector.ANY_OF) -> np.ndarray:
    if not isinstance(cdef, ClassDef):
        cdef = ClassDef(Selector(cdef))
    sel = cdef.selector
    if sel is Selector.HAS_INSTANCE:
        # direct targets of instance-of, closed upward over subclass-of
        targets = np.flatnonzero(g.instance_rev.degree() > 0)
        return reach(g.subclass_of, targets)
    if sel is Selector.HAS_SUB_OR_SUPER:
        return (g.subclass_of.degree() > 0) | (g.subclass_rev.degree() > 0)
    if sel is Selector.INSTANCE_OF_CLASS_CLASS:
        try:
            root = g.node(cdef.class_class)
        except UnknownEntityError:
            return np.zeros(g.n_entities, dtype=bool)
        below = np.flatnonzero(down_mask(g, [root]))
        subjects, _ = g.instance_rev.gather(below)
        mask = np.zeros(g.n_entities, dtype=bool)
        mask[subjects] = True
        return mask
    mask = np.zeros(g.n_entities, dtype=bool)
    for part in (Selector.HAS_INSTANCE, Selector.HAS_SUB_OR_SUPER, Selector.INSTANCE_OF_CLASS_CLASS):
        mask |= class_mask(g, ClassDef(part, cdef.class_class))
    return mask


def classes(g: OntoGraph, cdef: ClassDef | Selector | str = Selector.ANY_OF) -> set[int]:
    return set(np.flatnonzero(class_mask(g, cdef)).tolist())


CENSUS_ORDER = (
    Selector.HAS_INSTANCE,
    Selector.HAS_SUB_OR_SUPER,
    Selector.INSTANCE_OF_CLASS_CLASS,
    Selector.ANY_OF,
)

CENSUS_NAMES = {
    Selector.HAS_INSTANCE: "has_instance",
    Selector.HAS_SUB_OR_SUPER: "has_sub_or_super",
    Selector.INSTANCE_OF_CLASS_CLASS: "instance_of_class_class",
    Selector.ANY_OF: "any_of",
}


def census_counts(g: OntoGraph, class_class: str = CLASS_CLASS) -> dict[Selector, int]:
    masks = {
        sel: class_mask(g, ClassDef(sel, class_class))
        for sel in CENSUS_ORDER[:3]
    }
    masks[Selector.ANY_OF] = masks[Selector.HAS_INSTANCE] | masks[Selector.HAS_SUB_OR_SUPER] | masks[Selector.INSTANCE_OF_CLASS_CLASS]
    return {sel: int(masks[sel].sum()) for sel in CENSUS_ORDER}


def count_by_subclass(g: OntoGraph, root: int) -> list[tuple[int, int]]:
    """``(direct subclass of root, |{f : sub in type_set(f)}|)`` rows, largest first."""
    g.check(root)
    rows = []
    for sub in g.subclass_rev.row(root).tolist():
        below = np.flatnonzero(down_mask(g, [sub]))
        instances, _ = g.instance_rev.gather(below)
        rows.append((sub, int(np.unique(instances).size)))
    rows.sort(key=lambda r: (-r[1], r[0]))
    return rows
