from __future__ import annotations

import pytest

from classorder.oracle import G1, G2, RandomGraphConfig, random_graph

# The random-graph manifest: seeds and generator parameters are fixed so any
# failure reproduces with ``random_graph(seed, SUITE_CONFIG)``.
SUITE_SEEDS = range(200)
SUITE_CONFIG = RandomGraphConfig(max_nodes=60, p_instance=0.05, p_subclass=0.05, p_forced_self_loop=0.10)
LOOP_SEEDS = range(1000, 1050)
LOOP_CONFIG = RandomGraphConfig(inject_loops=True)

_suite_cache: dict = {}


def suite():
    """``(seed, SmallGraph, OntoGraph)`` for the 200 manifest graphs, built once."""
    if "suite" not in _suite_cache:
        out = []
        for seed in SUITE_SEEDS:
            sg = random_graph(seed, SUITE_CONFIG)
            out.append((seed, sg, sg.build()))
        _suite_cache["suite"] = out
    return _suite_cache["suite"]


def qset(g, nodes) -> set[int]:
    """Dense ids to Q values."""
    return {int(g.qids[x]) for x in nodes}


@pytest.fixture(scope="session")
def g1():
    return G1.build()


@pytest.fixture(scope="session")
def g2():
    return G2.build()


# -- acceptance summary ---------------------------------------------------------

CRITERIA: list[tuple[str, bool | None, str]] = []


@pytest.fixture
def criterion():
    """Record a pass/fail line for the acceptance summary."""

    def record(name: str, ok: bool | None, detail: str = "") -> bool | None:
        CRITERIA.append((name, ok, detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in CRITERIA:
        status = "SKIP" if ok is None else "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"[{status}] {name}" + (f" -- {detail}" if detail else ""))
