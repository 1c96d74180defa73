"""Seeded synthetic ontology generator for scale runs.

The shape loosely follows a large crowd-sourced taxonomy: a subclass forest
in which each class points at a random older class, a small number of
subclass cycles, many individuals with about two types each, drawn with a
heavy-tailed preference for a few popular classes, a sprinkling of
class-to-class instance edges (metaclasses), and injected instance loops.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class SynthConfig:
    instance_edges: int = 10_000_000
    subclass_edges: int = 1_000_000
    metaclass_fraction: float = 0.005
    subclass_cycles: int = 100
    self_loops: int = 120
    two_hop_loops: int = 20
    seed: int = 20240617

    def __post_init__(self):
        if not 0 <= self.subclass_cycles < self.subclass_edges:
            raise ValueError("subclass_cycles must be below subclass_edges")
        if self.self_loops > self.subclass_edges - self.subclass_cycles:
            raise ValueError("too many self loops for the subclass forest")
        if self.self_loops + 2 * self.two_hop_loops > self.instance_edges:
            raise ValueError("injected loops exceed instance_edges")


@dataclass
class SynthGraph:
    p31_s: np.ndarray
    p31_o: np.ndarray
    p279_s: np.ndarray
    p279_o: np.ndarray


def generate(cfg: SynthConfig = SynthConfig()) -> SynthGraph:
    """Edge arrays with exactly the configured numbers of distinct edges."""
    rng = np.random.default_rng(cfg.seed)
    n_classes = cfg.subclass_edges + 1
    # classes are Q1..Q(n_classes); class c > 1 gets a parent among older classes
    extra = cfg.subclass_cycles
    tree = cfg.subclass_edges - extra
    kids = np.arange(2, tree + 2, dtype=np.int64)
    parents = (rng.random(tree) * (kids - 1)).astype(np.int64) + 1
    # back edges parent -> descendant close subclass cycles
    cyc = rng.choice(kids, size=extra, replace=False)
    cyc_back = parents[cyc - 2]
    p279_s = np.concatenate([kids, cyc_back])
    p279_o = np.concatenate([parents, cyc])

    n_meta = int(cfg.instance_edges * cfg.metaclass_fraction)
    n_loop = cfg.self_loops + 2 * cfg.two_hop_loops
    n_items = cfg.instance_edges - n_meta - n_loop
    # individuals average two types each, so item ids cover half the edges
    first_item = n_classes + 1
    items = first_item + np.sort(rng.integers(0, max(n_items // 2, 1), size=n_items))
    popular = np.minimum(rng.zipf(1.3, size=n_items), n_classes).astype(np.int64)
    uniform = rng.integers(1, n_classes + 1, size=n_items)
    item_types = np.where(rng.random(n_items) < 0.5, popular, uniform)

    meta_s = rng.integers(1, n_classes + 1, size=n_meta)
    meta_o = np.minimum(rng.zipf(1.6, size=n_meta), n_classes).astype(np.int64)

    # half the self loops are direct; the other half point at a subclass
    # x ∈ y ⊑ x, found by picking y first and taking its parent
    direct = rng.choice(np.arange(1, n_classes + 1), size=cfg.self_loops // 2, replace=False)
    via_kids = rng.choice(kids, size=cfg.self_loops - len(direct), replace=False)
    self_s = np.concatenate([direct, parents[via_kids - 2]])
    self_o = np.concatenate([direct, via_kids])
    a = rng.integers(1, n_classes + 1, size=cfg.two_hop_loops)
    b = rng.integers(1, n_classes + 1, size=cfg.two_hop_loops)
    p31_s = np.concatenate([items, meta_s, self_s, a, b])
    p31_o = np.concatenate([item_types, meta_o, self_o, b, a])
    # drop repeats, then top up with fresh single-typed items so the
    # distinct edge count is exact
    key = np.unique(p31_s * (1 << 32) + p31_o)
    short = cfg.instance_edges - len(key)
    fresh = np.arange(short, dtype=np.int64) + int(p31_s.max()) + 1
    p31_s = np.concatenate([key >> 32, fresh])
    p31_o = np.concatenate([key & 0xFFFFFFFF, rng.integers(1, n_classes + 1, size=short)])
    return SynthGraph(p31_s, p31_o, p279_s, p279_o)


def write_tsv(g: SynthGraph, path: str | Path, chunk: int = 1_000_000) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# synthetic ontology\n")
        for pid, s, o in (("P279", g.p279_s, g.p279_o), ("P31", g.p31_s, g.p31_o)):
            tag = f"\t{pid}\tQ"
            for lo in range(0, len(s), chunk):
                ss, oo = s[lo : lo + chunk].tolist(), o[lo : lo + chunk].tolist()
                fh.write("".join(f"Q{x}{tag}{y}\n" for x, y in zip(ss, oo)))
    return path


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="classorder-synth", description=__doc__.splitlines()[0])
    ap.add_argument("output", help="TSV file to write")
    ap.add_argument("--instance-edges", type=int, default=SynthConfig.instance_edges)
    ap.add_argument("--subclass-edges", type=int, default=SynthConfig.subclass_edges)
    ap.add_argument("--subclass-cycles", type=int, default=SynthConfig.subclass_cycles)
    ap.add_argument("--self-loops", type=int, default=SynthConfig.self_loops)
    ap.add_argument("--two-hop-loops", type=int, default=SynthConfig.two_hop_loops)
    ap.add_argument("--seed", type=int, default=SynthConfig.seed)
    args = ap.parse_args(argv)
    try:
        cfg = SynthConfig(
            instance_edges=args.instance_edges, subclass_edges=args.subclass_edges,
            subclass_cycles=args.subclass_cycles, self_loops=args.self_loops,
            two_hop_loops=args.two_hop_loops, seed=args.seed,
        )
    except ValueError as exc:
        ap.error(str(exc))
    g = generate(cfg)
    write_tsv(g, args.output)
    print(f"wrote {len(g.p31_s)} P31 and {len(g.p279_s)} P279 edges to {args.output}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
