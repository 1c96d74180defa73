"""Command line entry point.

Every subcommand writes its main table as CSV to ``-o`` (stdout by default).
``--report-dir`` additionally writes every table produced plus a
``report.json`` envelope, and ``--figures`` renders PNG figures there too.
Progress goes to stderr. Exit status: 0 success, 1 usage error, 2 data error.
"""
from __future__ import annotations

import argparse
import csv
import io
import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable

from . import __version__
from . import tables as T
from .census import CENSUS_NAMES, CENSUS_ORDER, CLASS_CLASS, ClassDef, Selector, census_counts, count_by_subclass
from .fixed_order import Numbering, UniversalOrderClasses, check_metaclass_edges, derive_orders
from .fixes import emit_quickstatements, propose_loop_breaks
from .graph import OntoGraph, UnknownEntityError, build_graph
from .ingest import Format, guess_format, open_input, parse_edge_file, parse_metaclass_file
from .loops import LoopKind, LoopRecord, find_loops, find_two_hop_loops, loop_affected_classes
from .min_order import DEFAULT_MAX_LEVEL, min_order_levels
from .reports import Report, Table, diff_sets, read_result_set
from .split_order import split_histogram, split_pairs_raw, split_reduce

log = logging.getLogger("classorder")

THREADS_ENV = "ONTO_ORDER_THREADS"

# flags that change how a run executes but not what it computes
_RUNTIME_ONLY = {"output", "report_dir", "threads", "timings", "verbose", "func", "command"}


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


class Timer:
    def __init__(self):
        self.laps: dict[str, float] = {}

    def __call__(self, name: str, fn: Callable, *a, **kw):
        t0 = time.perf_counter()
        out = fn(*a, **kw)
        self.laps[name] = self.laps.get(name, 0.0) + time.perf_counter() - t0
        log.info("%s: %.2fs", name, self.laps[name])
        return out


# -- shared helpers --------------------------------------------------------------


def _threads(args) -> int:
    if args.threads:
        return args.threads
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            n = int(env)
        except ValueError:
            raise UsageError(f"{THREADS_ENV} must be an integer, got {env!r}")
        if n >= 1:
            return n
    return os.cpu_count() or 1


def _load(args, timer: Timer) -> tuple[OntoGraph, str]:
    path = args.input
    fmt = Format(args.format) if args.format else guess_format(path)
    try:
        with open_input(path) as fh:
            edges = timer("ingest", parse_edge_file, fh, fmt)
    except (OSError, UnicodeDecodeError, EOFError) as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    st = edges.stats
    log.info("read %d lines, skipped %d, %d edges, %d labels", st.lines_read, st.lines_skipped, len(edges), len(edges.labels))
    g = timer("build", build_graph, edges)
    return g, edges.digest


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc


def _read_ids(path: str) -> list[int]:
    try:
        return list(read_result_set(path).ids)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc


def _nodes(g: OntoGraph, ids, what: str, strict: bool = False) -> list[int]:
    out = []
    for q in ids:
        if g.has(q):
            out.append(g.node(q))
        elif strict:
            raise DataError(f"{what}: Q{q} not in graph")
        else:
            log.warning("%s: Q%d not in graph, ignored", what, q)
    return out


def _config(args) -> dict:
    cfg = {}
    for k, v in sorted(vars(args).items()):
        if k in _RUNTIME_ONLY:
            continue
        cfg[k] = v.value if hasattr(v, "value") else v
    cfg["command"] = args.command
    return cfg


def _universal(args) -> UniversalOrderClasses:
    numbering = Numbering(args.numbering)
    if not getattr(args, "seeds", None):
        return UniversalOrderClasses(numbering=numbering)
    try:
        return UniversalOrderClasses.parse(_read_text(args.seeds), numbering)
    except ValueError as exc:
        raise DataError(f"bad seeds file {args.seeds}: {exc}") from exc


def _class_def(args) -> ClassDef:
    return ClassDef(Selector(args.definition), args.class_class)


# -- subcommands -----------------------------------------------------------------


def _census(g, args, rep: Report, timer: Timer) -> Table:
    counts = timer("census", census_counts, g, args.class_class)
    table = T.census_table(counts)
    rep.add(table)
    if args.figures:
        from .plots import census_figure

        rep.figures.append(census_figure([(CENSUS_NAMES[s], counts[s]) for s in CENSUS_ORDER], _fig(args, "census")).name)
    return table


def _orders(g, args, rep: Report, timer: Timer) -> Table:
    a = timer("orders", derive_orders, g, _universal(args))
    table = T.orders_table(g, a, conflicts_only=args.conflicts_only)
    rep.add(table)
    rep.add(T.order_counts_table(a))
    rep.add(T.order_overlap_table(a))
    if args.metaclass:
        try:
            with open(args.metaclass, "rb") as fh:
                statements, _ = parse_metaclass_file(fh)
        except OSError as exc:
            raise DataError(f"cannot read {args.metaclass}: {exc}") from exc
        rep.add(T.metaclass_table(g, check_metaclass_edges(g, a, statements)))
    if args.figures:
        from .plots import order_figure

        rep.figures.append(order_figure({k: len(a.members(k)) for k in a.strata}, _fig(args, "orders")).name)
    return table


def _min_order(g, args, rep: Report, timer: Timer) -> Table:
    if args.max_level < 1:
        raise UsageError("--max-level must be at least 1")
    levels = timer("min_order", min_order_levels, g, _class_def(args), args.max_level)
    table = T.min_order_table(levels)
    rep.add(table)
    if args.members is not None:
        if not 1 <= args.members <= levels.k:
            raise UsageError(f"--members must be between 1 and {levels.k}")
        members = T.members_table(g, f"min_order_level{args.members}", levels.level(args.members))
        rep.add(members)
        table = members
    if args.figures:
        from .plots import min_order_figure

        rep.figures.append(min_order_figure({args.definition: levels.counts()}, _fig(args, "min_order")).name)
    return table


def _split(g, args, rep: Report, timer: Timer) -> Table:
    raw = timer("split_raw", split_pairs_raw, g)
    reduced, excluded = timer("split_reduce", split_reduce, g, raw, args.iterate)
    pairs = raw if args.raw else reduced
    rep.add(T.split_pairs_table(g, raw, "split_pairs_raw"))
    rep.add(T.split_pairs_table(g, excluded, "split_excluded"))
    rep.add(T.split_pairs_table(g, reduced, "split_pairs_reduced"))
    rows = split_histogram(pairs)
    hist = T.split_histogram_table(g, rows)
    rep.add(hist)
    classes = T.members_table(g, "split_classes", pairs.classes().tolist())
    rep.add(classes)
    if args.figures:
        from .plots import split_histogram_figure

        rep.figures.append(split_histogram_figure(rows, _fig(args, "split_histogram")).name)
    if args.histogram:
        return hist
    if args.classes_only:
        return classes
    return rep.tables["split_pairs_raw" if args.raw else "split_pairs_reduced"]


def _loops(g, args, rep: Report, timer: Timer) -> Table:
    if args.affected:
        if not args.seeds:
            raise UsageError("--affected needs --seeds FILE")
        seeds = _nodes(g, _read_ids(args.seeds), "seeds")
        table = T.members_table(g, "loop_affected", timer("affected", loop_affected_classes, g, seeds))
        rep.add(table)
        return table
    if args.two_hop:
        records = timer("loops", find_two_hop_loops, g, args.direct_only)
    else:
        records = timer("loops", find_loops, g, args.direct_only)
    table = T.loops_table(g, records)
    rep.add(table)
    return table


def _parse_loops(g: OntoGraph, path: str) -> list[LoopRecord]:
    records = []
    text = _read_text(path)
    try:
        for row in csv.DictReader(io.StringIO(text)):
            members = tuple(g.node(m) for m in row["members"].split(";"))
            edges = []
            for part in row["edges"].split(";"):
                s, p, o = part.split(">")
                edges.append((g.node(s), p, g.node(o)))
            records.append(LoopRecord(LoopKind(row["kind"]), members, tuple(edges)))
    except (KeyError, ValueError, UnknownEntityError) as exc:
        raise DataError(f"bad loop report {path}: {exc}") from exc
    return records


def _emit_fixes(g, args, rep: Report, timer: Timer) -> Table:
    records = _parse_loops(g, args.loops) if args.loops else timer("loops", find_loops, g, args.direct_only)
    keep = _nodes(g, _read_ids(args.keep), "keep") if args.keep else []
    fixes = timer("fixes", propose_loop_breaks, g, records, keep, True, args.direct_only)
    rep.add(Table("fixes", ("op", "subject", "property", "object"),
                  [(fx.op.name.lower(), f"Q{fx.subject}", fx.pid, f"Q{fx.object}") for fx in fixes]))
    return _Text("fixes", emit_quickstatements(fixes))


def _count_by_subclass(g, args, rep: Report, timer: Timer) -> Table:
    try:
        root = g.node(args.root)
    except (UnknownEntityError, ValueError) as exc:
        raise DataError(str(exc)) from exc
    table = T.count_by_subclass_table(g, timer("count_by_subclass", count_by_subclass, g, root))
    rep.add(table)
    return table


def _all(g, args, rep: Report, timer: Timer) -> Table:
    """Every analysis over one loaded graph; independent parts run in a pool."""
    universal = _universal(args)
    jobs = {
        "census": lambda: census_counts(g, args.class_class),
        "orders": lambda: derive_orders(g, universal),
        "min_order_any": lambda: min_order_levels(g, ClassDef(Selector.ANY_OF, args.class_class), args.max_level),
        "min_order_instance": lambda: min_order_levels(g, ClassDef(Selector.HAS_INSTANCE, args.class_class), args.max_level),
        "split": lambda: split_reduce(g, split_pairs_raw(g)),
        "loops": lambda: find_loops(g, args.direct_only),
    }
    t0 = time.perf_counter()
    with ThreadPoolExecutor(max_workers=_threads(args)) as pool:
        futures = {name: pool.submit(fn) for name, fn in jobs.items()}
        res = {name: fut.result() for name, fut in futures.items()}
    timer.laps["analyses"] = time.perf_counter() - t0
    census = T.census_table(res["census"])
    rep.add(census)
    a = res["orders"]
    rep.add(T.orders_table(g, a, conflicts_only=True))
    rep.add(T.order_counts_table(a))
    rep.add(T.order_overlap_table(a))
    for name in ("min_order_any", "min_order_instance"):
        t = T.min_order_table(res[name])
        rep.add(Table(name, t.columns, t.rows))
    reduced, excluded = res["split"]
    rep.add(T.split_pairs_table(g, reduced, "split_pairs_reduced"))
    rows = split_histogram(reduced)
    rep.add(T.split_histogram_table(g, rows))
    records = res["loops"]
    rep.add(T.loops_table(g, records))
    fixes = propose_loop_breaks(g, records, (), True, args.direct_only)
    rep.add(Table("fixes", ("op", "subject", "property", "object"),
                  [(fx.op.name.lower(), f"Q{fx.subject}", fx.pid, f"Q{fx.object}") for fx in fixes]))
    if args.figures:
        from .plots import census_figure, min_order_figure, order_figure, split_histogram_figure

        rep.figures += [
            census_figure([(CENSUS_NAMES[s], res["census"][s]) for s in CENSUS_ORDER], _fig(args, "census")).name,
            order_figure({k: len(a.members(k)) for k in a.strata}, _fig(args, "orders")).name,
            min_order_figure({"any": res["min_order_any"].counts(), "instance": res["min_order_instance"].counts()},
                             _fig(args, "min_order")).name,
            split_histogram_figure(rows, _fig(args, "split_histogram")).name,
        ]
    return census


class _Text(Table):
    """Non-CSV primary output (a QuickStatements batch)."""

    def __init__(self, name: str, text: str):
        super().__init__(name, (), [])
        self.text = text

    def to_csv(self) -> bytes:
        return self.text.encode("utf-8")


def _fig(args, name: str) -> Path:
    return Path(args.report_dir) / f"{name}.png"


def _diff(args) -> int:
    a = read_result_set(args.a, "a", args.column)
    b = read_result_set(args.b, "b", args.column)
    d = diff_sets(a, b)
    counts = T.diff_counts_table(d)
    for row in counts.rows:
        log.info("%s: %d", *row)
    _write(args, T.diff_table(d), Report(_config(args), tables={"diff_counts": counts}))
    return 0


# -- wiring ------------------------------------------------------------------


def _write(args, main: Table, rep: Report) -> None:
    data = main.to_csv()
    if args.output in (None, "-"):
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        Path(args.output).write_bytes(data)
    if args.report_dir:
        if not isinstance(main, _Text):
            rep.add(main)
        rep.write(args.report_dir)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("-o", "--output", default="-", help="main output file, '-' for stdout (default)")
    common.add_argument("--report-dir", help="also write every table and report.json here")
    common.add_argument("--figures", action="store_true", help="render PNG figures into --report-dir")
    common.add_argument("--timings", action="store_true", help="record wall-clock timings in report.json")
    common.add_argument("--threads", type=int, help=f"worker threads (default ${THREADS_ENV} or all cores)")
    common.add_argument("-v", "--verbose", action="store_true")

    graph = _Parser(add_help=False)
    graph.add_argument("-i", "--input", required=True, help="edge file (.tsv or .nt, optionally .gz/.bz2)")
    graph.add_argument("--format", choices=[f.value for f in Format], help="input format (default: from suffix)")
    graph.add_argument("--class-class", default=CLASS_CLASS, help="class of all classes (default %(default)s)")

    ap = _Parser(prog="classorder", description="Class-order diagnostics for instance-of / subclass-of ontologies.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("census", parents=[common, graph], help="class counts under each definition")
    p.set_defaults(func=_census)

    p = sub.add_parser("orders", parents=[common, graph], help="fixed orders derived from the universal classes")
    p.add_argument("--seeds", help="TSV 'order<TAB>Qid' overriding the universal classes")
    p.add_argument(
        "--numbering", default=Numbering.SEED.value, choices=[n.value for n in Numbering],
        help="seed: the universal class for k is an order-k class; members: its instances have order k",
    )
    p.add_argument("--conflicts-only", action="store_true", help="only entities with two or more orders")
    p.add_argument("--metaclass", help="TSV of P2445/P8225 statements to check")
    p.set_defaults(func=_orders)

    p = sub.add_parser("min-order", parents=[common, graph], help="minimum-order level sizes")
    p.add_argument("--def", dest="definition", default="any", choices=[s.value for s in Selector])
    p.add_argument("--max-level", type=int, default=DEFAULT_MAX_LEVEL)
    p.add_argument("--members", type=int, metavar="LEVEL", help="output the members of this level instead")
    p.set_defaults(func=_min_order)

    p = sub.add_parser("split-order", parents=[common, graph], help="split-order pairs and classes")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--raw", action="store_true", help="all pairs, before exclusion")
    mode.add_argument("--reduced", action="store_true", help="pairs left after exclusion (default)")
    what = p.add_mutually_exclusive_group()
    what.add_argument("--histogram", action="store_true", help="witness counts per class")
    what.add_argument("--classes-only", action="store_true", help="distinct split-order classes")
    p.add_argument("--iterate", action="store_true", help="repeat exclusion until nothing changes")
    p.set_defaults(func=_split)

    p = sub.add_parser("loops", parents=[common, graph], help="instance loops")
    p.add_argument("--two-hop", action="store_true", help="only loops through two or more items")
    p.add_argument("--affected", action="store_true", help="classes reachable from --seeds by instance chains")
    p.add_argument("--seeds", help="file of seed ids (first CSV column)")
    p.add_argument("--direct-only", action="store_true", help="multi-item loops over raw P31 edges only")
    p.set_defaults(func=_loops)

    p = sub.add_parser("emit-fixes", parents=[common, graph], help="QuickStatements batch breaking loops")
    p.add_argument("--loops", help="loops CSV from the loops command (default: detect)")
    p.add_argument("--keep", help="file of loop members to leave alone")
    p.add_argument("--direct-only", action="store_true")
    p.set_defaults(func=_emit_fixes)

    p = sub.add_parser("count-by-subclass", parents=[common, graph], help="instances per direct subclass of a root")
    p.add_argument("--root", default=CLASS_CLASS)
    p.set_defaults(func=_count_by_subclass)

    p = sub.add_parser("all", parents=[common, graph], help="every analysis over one graph load")
    p.add_argument("--seeds", help="TSV 'order<TAB>Qid' overriding the universal classes")
    p.add_argument(
        "--numbering", default=Numbering.SEED.value, choices=[n.value for n in Numbering],
        help="seed: the universal class for k is an order-k class; members: its instances have order k",
    )
    p.add_argument("--max-level", type=int, default=DEFAULT_MAX_LEVEL)
    p.add_argument("--direct-only", action="store_true")
    p.set_defaults(func=_all)

    p = sub.add_parser("diff", parents=[common], help="compare two result CSVs by entity id")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--column", type=int, default=0, help="0-based column holding the ids")
    p.set_defaults(func=None)
    return ap


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        if not argv:
            parser.print_usage(sys.stderr)
            return 1
        args = parser.parse_args(argv)
        if args.command is None:
            parser.print_usage(sys.stderr)
            return 1
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s", stream=sys.stderr)
        if args.threads is not None and args.threads < 1:
            raise UsageError("--threads must be at least 1")
        if args.figures and not args.report_dir:
            raise UsageError("--figures needs --report-dir")
        if args.report_dir:
            Path(args.report_dir).mkdir(parents=True, exist_ok=True)
        if args.command == "diff":
            try:
                return _diff(args)
            except OSError as exc:
                raise DataError(str(exc)) from exc
        timer = Timer()
        g, digest = _load(args, timer)
        rep = Report(_config(args), digest)
        main = args.func(g, args, rep, timer)
        if args.timings:
            rep.timings = dict(timer.laps)
        _write(args, main, rep)
        return 0
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except DataError as exc:
        print(f"classorder: {exc}", file=sys.stderr)
        return 2
    except UnknownEntityError as exc:
        print(f"classorder: unknown entity {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
