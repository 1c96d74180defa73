from __future__ import annotations

import numpy as np
import pytest

from classorder.graph import build_graph
from classorder.ingest import load_edges
from classorder.loops import find_self_loops
from classorder.synth import SynthConfig, generate, main, write_tsv

SMALL = SynthConfig(instance_edges=20_000, subclass_edges=2_000, subclass_cycles=10, self_loops=12, two_hop_loops=4, seed=3)


def distinct(s, o) -> int:
    return len(set(zip(s.tolist(), o.tolist())))


def test_exact_distinct_counts():
    g = generate(SMALL)
    assert len(g.p31_s) == distinct(g.p31_s, g.p31_o) == SMALL.instance_edges
    assert len(g.p279_s) == distinct(g.p279_s, g.p279_o) == SMALL.subclass_edges


def test_deterministic():
    a, b = generate(SMALL), generate(SMALL)
    for x, y in zip(vars(a).values(), vars(b).values()):
        assert np.array_equal(x, y)


def test_written_file_loads_with_injected_self_loops(tmp_path):
    path = write_tsv(generate(SMALL), tmp_path / "s.tsv")
    edges = load_edges(path)
    g = build_graph(edges)
    assert g.n_instance_edges == SMALL.instance_edges
    assert g.n_subclass_edges == SMALL.subclass_edges
    assert len(find_self_loops(g)) >= SMALL.self_loops


def test_main_writes_file(tmp_path):
    out = tmp_path / "x.tsv"
    argv = [str(out), "--instance-edges", "500", "--subclass-edges", "100", "--subclass-cycles", "5", "--self-loops", "4"]
    assert main(argv) == 0
    assert sum(1 for line in out.read_text().splitlines() if "\tP31\t" in line) == 500


def test_config_validation():
    with pytest.raises(ValueError):
        SynthConfig(subclass_edges=10, subclass_cycles=10)
    with pytest.raises(ValueError):
        SynthConfig(instance_edges=10, subclass_edges=1000, subclass_cycles=0, self_loops=8, two_hop_loops=2)
