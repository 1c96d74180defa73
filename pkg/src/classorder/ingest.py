"""Streaming ingest of instance-of / subclass-of edge dumps.

Two input grammars are understood:

* TSV: ``Qs<TAB>P31|P279<TAB>Qo`` edge lines, ``Qs<TAB>label<TAB>text`` label
  lines and ``#`` comments.
* A filtered N-Triples subset of the Wikidata truthy dump, where only the two
  direct-property predicates and English ``rdfs:label`` literals are kept.

Entities are carried as their numeric ``Q`` value. Dense interning happens when
the graph is built.
"""
from __future__ import annotations

import bz2
import enum
import gzip
import hashlib
import io
import re
from array import array
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator, NamedTuple

import numpy as np

_QID_RE = re.compile(r"Q([1-9][0-9]*)\Z")

ENTITY_IRI = "http://www.wikidata.org/entity/"
DIRECT_IRI = "http://www.wikidata.org/prop/direct/"
LABEL_IRI = "http://www.w3.org/2000/01/rdf-schema#label"


class EdgeKind(enum.IntEnum):
    INSTANCE_OF = 0
    SUBCLASS_OF = 1

    @property
    def pid(self) -> str:
        return _KIND_PID[self]

    @classmethod
    def from_pid(cls, pid: str) -> "EdgeKind":
        try:
            return _PID_KIND[pid]
        except KeyError:
            raise ValueError(f"not an ontology predicate: {pid!r}") from None


_KIND_PID = {EdgeKind.INSTANCE_OF: "P31", EdgeKind.SUBCLASS_OF: "P279"}
_PID_KIND = {v: k for k, v in _KIND_PID.items()}


class RawEdge(NamedTuple):
    subject: int
    kind: EdgeKind
    object: int


class Format(str, enum.Enum):
    TSV = "tsv"
    NTRIPLES = "nt"


def parse_qid(text: str) -> int:
    """``"Q42"`` -> ``42``. Raises ``ValueError`` for anything else."""
    m = _QID_RE.match(text)
    if m is None:
        raise ValueError(f"malformed entity id: {text!r}")
    return int(m.group(1))


def render_qid(value: int) -> str:
    if value <= 0:
        raise ValueError(f"entity ids are positive, got {value}")
    return f"Q{value}"


@dataclass
class ParseStats:
    lines_read: int = 0
    lines_skipped: int = 0
    # edge-shaped lines whose object was a blank node, literal or somevalue
    nonentity_objects: int = 0


@dataclass
class EdgeList:
    """Deduplicated edges sorted by (subject, kind, object), ids as Q values."""

    subjects: np.ndarray
    kinds: np.ndarray
    objects: np.ndarray
    labels: dict[int, str] = field(default_factory=dict)
    stats: ParseStats = field(default_factory=ParseStats)
    digest: str = ""

    def __len__(self) -> int:
        return len(self.subjects)

    def __iter__(self) -> Iterator[RawEdge]:
        for s, k, o in zip(self.subjects.tolist(), self.kinds.tolist(), self.objects.tolist()):
            yield RawEdge(s, EdgeKind(k), o)

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[int, int, int]], labels: dict[int, str] | None = None) -> "EdgeList":
        rows = list(edges)
        subj = np.array([int(r[0]) for r in rows], dtype=np.int64)
        kind = np.array([int(r[1]) for r in rows], dtype=np.int8)
        obj = np.array([int(r[2]) for r in rows], dtype=np.int64)
        for arr in (subj, obj):
            if arr.size and arr.min() <= 0:
                raise ValueError("entity ids are positive")
        s, k, o = _dedup_sort(subj, kind, obj)
        return cls(s, k, o, dict(labels or {}))


def _dedup_sort(subj: np.ndarray, kind: np.ndarray, obj: np.ndarray):
    if subj.size == 0:
        return (np.zeros(0, np.int64), np.zeros(0, np.int8), np.zeros(0, np.int64))
    order = np.lexsort((obj, kind, subj))
    subj, kind, obj = subj[order], kind[order], obj[order]
    keep = np.ones(subj.size, dtype=bool)
    keep[1:] = (subj[1:] != subj[:-1]) | (kind[1:] != kind[:-1]) | (obj[1:] != obj[:-1])
    return subj[keep], kind[keep].astype(np.int8), obj[keep]


class _DigestReader(io.RawIOBase):
    """Pass-through byte reader that hashes everything it hands out."""

    def __init__(self, raw: IO[bytes]):
        self._raw = raw
        self.sha = hashlib.sha256()

    def readable(self) -> bool:
        return True

    def readinto(self, b) -> int:
        data = self._raw.read(len(b))
        n = len(data)
        b[:n] = data
        self.sha.update(data)
        return n


_NT_EDGE_RE = re.compile(
    r"<http://www\.wikidata\.org/entity/Q([1-9][0-9]*)>\s+"
    r"<http://www\.wikidata\.org/prop/direct/(P31|P279)>\s+(\S+)\s+\.\s*\Z"
)
_NT_ENTITY_OBJ_RE = re.compile(r"<http://www\.wikidata\.org/entity/Q([1-9][0-9]*)>\Z")
_NT_LABEL_RE = re.compile(
    r"<http://www\.wikidata\.org/entity/Q([1-9][0-9]*)>\s+"
    r"<http://www\.w3\.org/2000/01/rdf-schema#label>\s+"
    r'"((?:[^"\\]|\\.)*)"@([A-Za-z0-9-]+)\s+\.\s*\Z'
)
_NT_ESCAPE_RE = re.compile(r"\\(u[0-9A-Fa-f]{4}|U[0-9A-Fa-f]{8}|[tbnrf\"'\\])")
_SIMPLE_ESCAPES = {"t": "\t", "b": "\b", "n": "\n", "r": "\r", "f": "\f", '"': '"', "'": "'", "\\": "\\"}


def _unescape_literal(text: str) -> str:
    def sub(m: re.Match) -> str:
        esc = m.group(1)
        if esc[0] in "uU":
            return chr(int(esc[1:], 16))
        return _SIMPLE_ESCAPES[esc]

    return _NT_ESCAPE_RE.sub(sub, text)


def parse_edge_file(stream: IO[bytes], fmt: Format | str = Format.TSV) -> EdgeList:
    """Parse a UTF-8 byte stream into a deduplicated, sorted :class:`EdgeList`.

    Malformed or out-of-scope lines are counted in ``stats.lines_skipped`` and
    never abort the parse. The returned ``digest`` is the SHA-256 of the bytes
    consumed.
    """
    fmt = Format(fmt)
    reader = _DigestReader(stream)
    text = io.TextIOWrapper(io.BufferedReader(reader, buffer_size=1 << 20), encoding="utf-8", newline="\n")
    subj, obj, kind = array("q"), array("q"), array("b")
    labels: dict[int, str] = {}
    stats = ParseStats()
    if fmt is Format.TSV:
        _parse_tsv(text, subj, kind, obj, labels, stats)
    else:
        _parse_nt(text, subj, kind, obj, labels, stats)
    s, k, o = _dedup_sort(
        np.frombuffer(subj, dtype=np.int64).copy(),
        np.frombuffer(kind, dtype=np.int8).copy(),
        np.frombuffer(obj, dtype=np.int64).copy(),
    )
    return EdgeList(s, k, o, labels, stats, reader.sha.hexdigest())


def _parse_tsv(lines, subj, kind, obj, labels, stats) -> None:
    read = skipped = nonentity = 0
    s_append, o_append, k_append = subj.append, obj.append, kind.append
    for line in lines:
        read += 1
        line = line.rstrip("\r\n")
        if not line or line[0] == "#":
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            skipped += 1
            continue
        a, p, b = parts
        if p == "P31":
            k = 0
        elif p == "P279":
            k = 1
        elif p == "label":
            try:
                labels[parse_qid(a)] = b
            except ValueError:
                skipped += 1
            continue
        else:
            skipped += 1
            continue
        ma = _QID_RE.match(a)
        mb = _QID_RE.match(b)
        if ma is None or mb is None:
            skipped += 1
            if ma is not None:
                nonentity += 1
            continue
        s_append(int(ma.group(1)))
        o_append(int(mb.group(1)))
        k_append(k)
    stats.lines_read += read
    stats.lines_skipped += skipped
    stats.nonentity_objects += nonentity


def _parse_nt(lines, subj, kind, obj, labels, stats) -> None:
    read = skipped = nonentity = 0
    for line in lines:
        read += 1
        line = line.strip()
        if not line or line[0] == "#":
            continue
        if "/prop/direct/P" in line:
            m = _NT_EDGE_RE.match(line)
            if m is None:
                skipped += 1
                continue
            mo = _NT_ENTITY_OBJ_RE.match(m.group(3))
            if mo is None:
                nonentity += 1
                skipped += 1
                continue
            subj.append(int(m.group(1)))
            obj.append(int(mo.group(1)))
            kind.append(0 if m.group(2) == "P31" else 1)
        elif "rdf-schema#label" in line:
            m = _NT_LABEL_RE.match(line)
            if m is None or m.group(3).lower() != "en":
                skipped += 1
                continue
            labels[int(m.group(1))] = _unescape_literal(m.group(2))
        else:
            skipped += 1
    stats.lines_read += read
    stats.lines_skipped += skipped
    stats.nonentity_objects += nonentity


def open_input(path: str | Path) -> IO[bytes]:
    """Open a dump for binary reading, decompressing ``.gz``/``.bz2`` by suffix."""
    path = Path(path)
    if path.suffix == ".gz":
        return gzip.open(path, "rb")
    if path.suffix == ".bz2":
        return bz2.open(path, "rb")
    return open(path, "rb")


def guess_format(path: str | Path) -> Format:
    name = Path(path).name
    for suffix in (".gz", ".bz2"):
        if name.endswith(suffix):
            name = name[: -len(suffix)]
    return Format.NTRIPLES if name.endswith((".nt", ".ntriples")) else Format.TSV


def load_edges(path: str | Path, fmt: Format | str | None = None) -> EdgeList:
    with open_input(path) as fh:
        return parse_edge_file(fh, fmt or guess_format(path))


def render_tsv(edges: EdgeList, include_labels: bool = True) -> str:
    """Inverse of the TSV reader: labels first (sorted by id), then edges."""
    out = []
    if include_labels:
        for q in sorted(edges.labels):
            out.append(f"Q{q}\tlabel\t{edges.labels[q]}\n")
    for s, k, o in zip(edges.subjects.tolist(), edges.kinds.tolist(), edges.objects.tolist()):
        out.append(f"Q{s}\t{_KIND_PID[EdgeKind(k)]}\tQ{o}\n")
    return "".join(out)


# -- metaclass statements -------------------------------------------------

METACLASS_PIDS = ("P2445", "P8225")


class MetaclassStatement(NamedTuple):
    subject: int
    pid: str
    object: int


def parse_metaclass_file(stream: IO[bytes]) -> tuple[list[MetaclassStatement], ParseStats]:
    """Read ``Qs<TAB>P2445|P8225<TAB>Qo`` lines.

    Objects that are not entities (``somevalue``, blanks) are skipped and
    counted, as are lines with any other predicate.
    """
    stats = ParseStats()
    out: set[MetaclassStatement] = set()
    for raw in io.TextIOWrapper(stream, encoding="utf-8"):
        stats.lines_read += 1
        line = raw.rstrip("\r\n")
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3 or parts[1] not in METACLASS_PIDS:
            stats.lines_skipped += 1
            continue
        try:
            s = parse_qid(parts[0])
        except ValueError:
            stats.lines_skipped += 1
            continue
        try:
            o = parse_qid(parts[2])
        except ValueError:
            stats.lines_skipped += 1
            stats.nonentity_objects += 1
            continue
        out.add(MetaclassStatement(s, parts[1], o))
    return sorted(out), stats
