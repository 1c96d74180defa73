from __future__ import annotations

import pytest

from classorder.fixes import (
    FixStatement,
    Op,
    apply_fixes,
    emit_quickstatements,
    parse_quickstatements,
    propose_loop_breaks,
)
from classorder.loops import find_loops
from classorder.oracle import SmallGraph, naive_loops, random_graph

from conftest import LOOP_CONFIG, LOOP_SEEDS


def test_g1_proposals(g1):
    fixes = propose_loop_breaks(g1, find_loops(g1))
    assert emit_quickstatements(fixes) == "-Q5\tP31\tQ5\n-Q6\tP31\tQ7\n"


def test_keep_everything_proposes_nothing(g1):
    keep = {g1.node(q) for q in (5, 6, 7)}
    assert propose_loop_breaks(g1, find_loops(g1), keep=keep) == []


def test_keep_part_of_a_loop_still_breaks_it(g1):
    fixes = propose_loop_breaks(g1, find_loops(g1), keep={g1.node(6)})
    assert [fx.render() for fx in fixes] == ["-Q5\tP31\tQ5", "-Q6\tP31\tQ7"]


def test_emit_puts_removals_first():
    fixes = [
        FixStatement(Op.ADD, 1, 31, 2),
        FixStatement(Op.REMOVE, 9, 279, 3),
        FixStatement(Op.REMOVE, 4, 31, 4),
        FixStatement(Op.REMOVE, 4, 31, 4),
    ]
    assert emit_quickstatements(fixes).splitlines() == ["-Q4\tP31\tQ4", "-Q9\tP279\tQ3", "Q1\tP31\tQ2"]


def test_parse_round_trip():
    fixes = [FixStatement(Op.REMOVE, 5, 31, 5), FixStatement(Op.ADD, 12, 279, 7)]
    text = emit_quickstatements(fixes)
    assert parse_quickstatements(text) == sorted(fixes)
    assert emit_quickstatements(parse_quickstatements(text)) == text


@pytest.mark.parametrize("line", ["Q1\tX31\tQ2", "Q1\tP31", "Q1 P31 Q2"])
def test_parse_rejects_bad_lines(line):
    with pytest.raises(ValueError):
        parse_quickstatements(line)


def test_apply_then_rerun_g1(g1):
    fixed = apply_fixes(g1, propose_loop_breaks(g1, find_loops(g1)))
    assert find_loops(fixed) == []
    assert fixed.n_instance_edges == g1.n_instance_edges - 2


@pytest.mark.parametrize("seed", LOOP_SEEDS)
def test_apply_then_rerun_injected(seed):
    sg = random_graph(seed, LOOP_CONFIG)
    g = sg.build()
    loops = find_loops(g)
    assert loops, "generator should inject at least one loop"
    fixed = apply_fixes(g, propose_loop_breaks(g, loops))
    assert find_loops(fixed) == []


def test_apply_fixes_only_removes_proposed_edges():
    sg = random_graph(LOOP_SEEDS[0], LOOP_CONFIG)
    g = sg.build()
    fixes = propose_loop_breaks(g, find_loops(g))
    dropped = {(fx.subject, fx.object) for fx in fixes}
    p31 = [e for e in sg.p31 if e not in dropped]
    rebuilt = SmallGraph.of(p31=p31, p279=sg.p279, extra=sg.extra)
    assert not any(naive_loops(rebuilt).values())
    fixed = apply_fixes(g, fixes)
    assert fixed.n_instance_edges == g.n_instance_edges - len(fixes)


def test_apply_fixes_errors(g1):
    with pytest.raises(ValueError, match="no such edge"):
        apply_fixes(g1, [FixStatement(Op.REMOVE, 1, 31, 2)])
    with pytest.raises(ValueError, match="only removals"):
        apply_fixes(g1, [FixStatement(Op.ADD, 5, 31, 5)])
