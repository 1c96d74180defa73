"""Ingest + census + self-loop detection on one edge file, reported as JSON.

Usage: python3 benchmarks/scale.py EDGES.tsv [--generate]

With ``--generate`` the file is first written by the seeded synthetic
generator at full size (10M instance, 1M subclass edges). Peak memory is the
``ru_maxrss`` of this process, so run generation separately when measuring.
"""
from __future__ import annotations

import argparse
import json
import resource
import sys
import time
from pathlib import Path

from classorder.census import census_counts
from classorder.graph import build_graph
from classorder.ingest import load_edges
from classorder.loops import find_self_loops
from classorder.synth import SynthConfig, generate, write_tsv


def run(path: Path) -> dict:
    laps = {}
    t0 = time.perf_counter()
    edges = load_edges(path)
    laps["ingest"] = time.perf_counter() - t0
    g = build_graph(edges)
    laps["build"] = time.perf_counter() - t0 - laps["ingest"]
    t1 = time.perf_counter()
    counts = census_counts(g)
    laps["census"] = time.perf_counter() - t1
    t2 = time.perf_counter()
    loops = find_self_loops(g)
    laps["self_loops"] = time.perf_counter() - t2
    return {
        "instance_edges": g.n_instance_edges,
        "subclass_edges": g.n_subclass_edges,
        "census": {s.value: n for s, n in counts.items()},
        "self_loops": len(loops),
        "seconds": {k: round(v, 2) for k, v in laps.items()},
        "wall_seconds": round(time.perf_counter() - t0, 2),
        "peak_rss_bytes": resource.getrusage(resource.RUSAGE_SELF).ru_maxrss * 1024,
    }


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("edges", type=Path)
    ap.add_argument("--generate", action="store_true", help="write the synthetic graph first")
    args = ap.parse_args(argv)
    if args.generate:
        write_tsv(generate(SynthConfig()), args.edges)
        return 0
    json.dump(run(args.edges), sys.stdout, indent=2)
    print()
    return 0


if __name__ == "__main__":
    sys.exit(main())
