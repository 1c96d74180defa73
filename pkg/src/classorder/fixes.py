"""Edit batches that break bad instance loops, in QuickStatements v1 text."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

from .graph import OntoGraph
from .ingest import EdgeKind, parse_qid
from .loops import LoopRecord, find_loops


class Op(enum.IntEnum):
    REMOVE = 0
    ADD = 1


@dataclass(frozen=True, order=True)
class FixStatement:
    op: Op
    subject: int  # Q value
    property: int  # P value
    object: int  # Q value

    @property
    def pid(self) -> str:
        return f"P{self.property}"

    def render(self) -> str:
        sign = "-" if self.op is Op.REMOVE else ""
        return f"{sign}Q{self.subject}\t{self.pid}\tQ{self.object}"


def _choose_edge(record: LoopRecord) -> tuple[int, str, int]:
    instance_edges = sorted({e for e in record.edges if e[1] == "P31"})
    return instance_edges[0]


def _one_round(g: OntoGraph, loops: Iterable[LoopRecord], keep: set[int]) -> list[tuple[int, str, int]]:
    chosen = []
    for record in loops:
        if set(record.members) <= keep:
            continue
        chosen.append(_choose_edge(record))
    return sorted(set(chosen))


def propose_loop_breaks(
    g: OntoGraph,
    loops: Iterable[LoopRecord],
    keep: Iterable[int] = (),
    close: bool = True,
    direct_only: bool = False,
) -> list[FixStatement]:
    """One removal per loop not wholly inside ``keep``.

    The removed edge is the instance-of edge of the loop with the smallest
    ``(subject, object)``. With ``close`` the removals are applied and loop
    detection rerun until the only loops left lie inside ``keep``, so loops
    hidden behind the first ones get their own proposal.
    """
    keep = set(keep)
    removed: set[tuple[int, str, int]] = set()
    batch = _one_round(g, loops, keep)
    current = g
    while batch:
        removed.update(batch)
        if not close:
            break
        current = current.without_edges((s, EdgeKind.INSTANCE_OF, o) for s, _, o in batch)
        batch = [e for e in _one_round(current, find_loops(current, direct_only), keep) if e not in removed]
    return sorted(
        FixStatement(Op.REMOVE, int(g.qids[s]), int(p[1:]), int(g.qids[o])) for s, p, o in removed
    )


def apply_fixes(g: OntoGraph, fixes: Iterable[FixStatement]) -> OntoGraph:
    """Graph with every removal applied. Additions are not supported."""
    drop = []
    for fx in fixes:
        if fx.op is not Op.REMOVE:
            raise ValueError("only removals can be applied")
        kind = EdgeKind.from_pid(fx.pid)
        s, o = g.node(fx.subject), g.node(fx.object)
        if not g.has_edge(s, kind, o):
            raise ValueError(f"no such edge: {fx.render()}")
        drop.append((s, kind, o))
    return g.without_edges(drop)


def emit_quickstatements(fixes: Iterable[FixStatement]) -> str:
    """One statement per line, removals first, then by subject, property, object."""
    lines = [fx.render() + "\n" for fx in sorted(set(fixes))]
    return "".join(lines)


def parse_quickstatements(text: str) -> list[FixStatement]:
    out = []
    for line in text.splitlines():
        if not line.strip():
            continue
        s, p, o = line.split("\t")
        op = Op.REMOVE if s.startswith("-") else Op.ADD
        if not p.startswith("P") or not p[1:].isdigit():
            raise ValueError(f"bad property: {p!r}")
        out.append(FixStatement(op, parse_qid(s.lstrip("-")), int(p[1:]), parse_qid(o)))
    return out
