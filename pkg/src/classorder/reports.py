"""Result-set algebra between runs and deterministic report output."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np

from .ingest import ENTITY_IRI, parse_qid

REPORT_VERSION = 1


@dataclass(frozen=True)
class ResultSet:
    """Named set of entity Q values, sorted numerically."""

    name: str
    ids: tuple[int, ...]

    @classmethod
    def of(cls, name: str, ids: Iterable[int]) -> "ResultSet":
        return cls(name, tuple(sorted(set(int(x) for x in ids))))

    def __len__(self) -> int:
        return len(self.ids)


@dataclass(frozen=True)
class SetDiff:
    only_a: ResultSet
    only_b: ResultSet
    both: ResultSet


def diff_sets(a: ResultSet, b: ResultSet) -> SetDiff:
    """Three-way split of two sorted sets, like ``comm`` but in numeric order."""
    x = np.asarray(a.ids, dtype=np.int64)
    y = np.asarray(b.ids, dtype=np.int64)
    return SetDiff(
        ResultSet(f"only_{a.name}", tuple(np.setdiff1d(x, y, assume_unique=True).tolist())),
        ResultSet(f"only_{b.name}", tuple(np.setdiff1d(y, x, assume_unique=True).tolist())),
        ResultSet("both", tuple(np.intersect1d(x, y, assume_unique=True).tolist())),
    )


def _cell_qid(cell: str) -> int | None:
    cell = cell.strip()
    if cell.startswith(ENTITY_IRI):
        cell = cell[len(ENTITY_IRI) :]
    try:
        return parse_qid(cell)
    except ValueError:
        return None


def read_result_set(path: str | Path, name: str | None = None, column: int = 0) -> ResultSet:
    """Entity ids from one CSV column; header and non-id cells are ignored."""
    path = Path(path)
    ids = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if len(row) > column:
                q = _cell_qid(row[column])
                if q is not None:
                    ids.append(q)
    return ResultSet.of(name or path.stem, ids)


# -- tables and envelopes -------------------------------------------------------


@dataclass
class Table:
    name: str
    columns: Sequence[str]
    rows: list[Sequence[Any]]

    def to_csv(self) -> bytes:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        writer.writerows(self.rows)
        return buf.getvalue().encode("utf-8")


@dataclass
class Report:
    config: dict[str, Any]
    input_digest: str = ""
    tables: dict[str, Table] = field(default_factory=dict)
    figures: list[str] = field(default_factory=list)
    timings: dict[str, float] | None = None

    def add(self, table: Table) -> None:
        self.tables[table.name] = table

    def envelope(self) -> bytes:
        doc: dict[str, Any] = {
            "version": REPORT_VERSION,
            "input_digest": self.input_digest,
            "config": self.config,
            "tables": {
                name: {"file": f"{name}.csv", "columns": list(t.columns), "rows": len(t.rows)}
                for name, t in sorted(self.tables.items())
            },
            "figures": sorted(self.figures),
        }
        if self.timings is not None:
            doc["timings"] = {k: round(v, 3) for k, v in sorted(self.timings.items())}
        return (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode("utf-8")

    def write(self, directory: str | Path) -> list[Path]:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        written = []
        for name, table in sorted(self.tables.items()):
            path = directory / f"{name}.csv"
            path.write_bytes(table.to_csv())
            written.append(path)
        path = directory / "report.json"
        path.write_bytes(self.envelope())
        written.append(path)
        return written


def write_report(sections: Iterable[Table], config: dict[str, Any] | None = None, input_digest: str = "") -> bytes:
    """JSON envelope for ``sections``; the CSV bodies come from :meth:`Table.to_csv`."""
    report = Report(dict(config or {}), input_digest)
    for t in sections:
        report.add(t)
    return report.envelope()
