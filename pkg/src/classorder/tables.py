"""CSV table builders, one per analysis. Column layouts are the file contract."""
from __future__ import annotations

from typing import Iterable

from .census import CENSUS_NAMES, CENSUS_ORDER, Selector
from .fixed_order import MetaclassFinding, OrderAssignment
from .graph import OntoGraph
from .loops import LoopRecord
from .min_order import MinOrderLevels
from .reports import SetDiff, Table
from .split_order import HistogramRow, SplitPairs


def census_table(counts: dict[Selector, int]) -> Table:
    return Table("census", ("definition", "count"), [(CENSUS_NAMES[s], counts[s]) for s in CENSUS_ORDER])


def _chain(g: OntoGraph, steps) -> str:
    parts = [g.qid(steps[0].subject)]
    for st in steps:
        parts += [st.pid, g.qid(st.object)]
    return ">".join(parts)


def orders_table(g: OntoGraph, a: OrderAssignment, conflicts_only: bool = False) -> Table:
    rows = []
    for x, ks in a.as_dict().items():
        if conflicts_only and len(ks) < 2:
            continue
        ordered = sorted(ks)
        witness = "|".join(f"{k}:{_chain(g, a.witness(x, k))}" for k in ordered)
        rows.append((g.qid(x), ";".join(map(str, ordered)), witness))
    return Table("orders", ("entity", "orders", "witness"), rows)


def order_counts_table(a: OrderAssignment) -> Table:
    ks = sorted(a.strata)
    rows = []
    for k in ks:
        row = [k, len(a.members(k))]
        rows.append(row)
    return Table("order_counts", ("order", "count"), rows)


def order_overlap_table(a: OrderAssignment) -> Table:
    from .fixed_order import order_overlap

    ks = sorted(a.strata)
    rows = [(n, m, order_overlap(a, n, m)) for n in reversed(ks) for m in reversed(ks) if m < n]
    return Table("order_overlap", ("order", "other", "count"), rows)


def metaclass_table(g: OntoGraph, findings: Iterable[MetaclassFinding]) -> Table:
    rows = []
    for f in findings:
        st = f.statement
        rows.append((
            f"Q{st.subject}", st.pid, f"Q{st.object}", f.status.value, f.expected,
            ";".join(map(str, sorted(f.subject_orders))), ";".join(map(str, sorted(f.object_orders))),
        ))
    return Table("metaclass", ("subject", "property", "object", "status", "expected", "subject_orders", "object_orders"), rows)


def min_order_table(levels: MinOrderLevels) -> Table:
    return Table("min_order", ("level", "count"), [(n, c) for n, c in enumerate(levels.counts(), start=1)])


def members_table(g: OntoGraph, name: str, nodes: Iterable[int]) -> Table:
    return Table(name, ("entity", "label"), [(g.qid(x), g.label(x)) for x in sorted(nodes)])


def split_pairs_table(g: OntoGraph, pairs: SplitPairs, name: str = "split_pairs") -> Table:
    rows = [(g.qid(p.c), g.qid(p.s), p.case.name.title() if p.case.name == "SELF" else p.case.name) for p in pairs]
    return Table(name, ("c", "s", "case"), rows)


def split_histogram_table(g: OntoGraph, rows: list[HistogramRow]) -> Table:
    out = [
        (r.cumulative, r.count, g.qid(r.cls), g.label(r.cls), " ".join(g.qid(x) for x in r.samples))
        for r in rows
    ]
    return Table("split_histogram", ("cumulative", "count", "classId", "label", "samples"), out)


def _edge_text(g: OntoGraph, edges) -> str:
    return ";".join(f"{g.qid(s)}>{p}>{g.qid(o)}" for s, p, o in edges)


def loops_table(g: OntoGraph, records: Iterable[LoopRecord]) -> Table:
    rows = [(r.kind.value, ";".join(g.qid(m) for m in r.members), _edge_text(g, r.edges)) for r in records]
    return Table("loops", ("kind", "members", "edges"), rows)


def count_by_subclass_table(g: OntoGraph, rows: list[tuple[int, int]]) -> Table:
    return Table("count_by_subclass", ("subclass", "label", "count"), [(g.qid(s), g.label(s), n) for s, n in rows])


def diff_table(d: SetDiff) -> Table:
    rows = []
    for status, rs in (("only_a", d.only_a), ("only_b", d.only_b), ("both", d.both)):
        rows.extend((status, f"Q{q}") for q in rs.ids)
    return Table("diff", ("status", "entity"), rows)


def diff_counts_table(d: SetDiff) -> Table:
    return Table("diff_counts", ("status", "count"), [("only_a", len(d.only_a)), ("only_b", len(d.only_b)), ("both", len(d.both))])
