import pytest
from hypothesis import given

from cirquent.corpus import load_cirquent
from cirquent.errors import CirquentError
from cirquent.games import Interpretation, nice_game
from cirquent.runs import (BOT, TOP, Allocation, B, LabMove, PortMove, Select, T, classify, emit_run,
                           induced_arrangement, is_delay, legal_position_ars, legal_position_col, negate_run,
                           parse_run, port_run, project, resolution_state)
from oracles import cirquent_and_run

EMPTY = Interpretation()


def test_parse_and_emit():
    run = parse_run("T (1,5); T (2,7)")
    assert run == (T("(1,5)"), T("(2,7)"))
    assert emit_run(run) == "T (1,5); T (2,7)"
    assert parse_run("") == ()
    with pytest.raises(CirquentError) as info:
        parse_run("X 1.1")
    assert info.value.code == "PARSE_ERROR"


def test_classify():
    c = load_cirquent("fig20")
    assert classify(c, "(1,5)") == Allocation(1, 5)
    assert classify(c, "3.x") == PortMove(3, "x")
    assert classify(c, "9.1") == Select(9, 1)
    assert "parallel" in legal_position_ars(c, parse_run("T 9.1")).reason
    c7 = load_cirquent("fig7")
    assert classify(c7, "7.2") == Select(7, 2)
    assert classify(c7, "9.2") is None


def test_projection_helpers():
    run = parse_run("B 3.a; T 4.b; B 3.c")
    assert port_run(run, 3) == (B("a"), B("c"))
    assert project(run, "4.") == (T("b"),)
    assert negate_run(run)[0] == T("3.a")


def test_fig7_legality_pair():
    c = load_cirquent("fig7")
    assert legal_position_ars(c, parse_run("T 8.1; T 7.2"))
    bad = legal_position_ars(c, parse_run("T 8.1; T 9.2"))
    assert not bad and bad.index == 2 and bad.offender is TOP
    assert legal_position_col(c, EMPTY, parse_run("T 8.1; T 7.2"))
    assert not legal_position_col(c, EMPTY, parse_run("T 8.1; T 9.2"))


def test_selection_rules():
    c = load_cirquent("fig7")
    assert not legal_position_ars(c, parse_run("B 7.1"))
    assert not legal_position_ars(c, parse_run("T 7.3"))
    assert not legal_position_ars(c, parse_run("T 7.1; T 7.2"))
    assert not legal_position_ars(c, parse_run("T 10.1"))


def test_fig20_allocations():
    c = load_cirquent("fig20")
    g2 = parse_run("T (1,5); T (2,7); T (3,6); T (4,8)")
    assert legal_position_ars(c, g2)
    assert induced_arrangement(g2) == {(1, 5), (2, 7), (3, 6), (4, 8)}
    assert induced_arrangement(()) == frozenset()
    assert not legal_position_ars(c, parse_run("T (1,5); T (1,6)"))
    assert not legal_position_ars(c, parse_run("T (5,1)"))
    verdict = legal_position_ars(c, parse_run("B (1,5)"))
    assert not verdict and verdict.offender is BOT


def test_fig22_run():
    c = load_cirquent("fig22_right")
    run = parse_run("T (8,1); T (4,2); T (5,3)")
    assert legal_position_ars(c, run)
    assert induced_arrangement(run) == {(8, 1), (4, 2), (5, 3)}


def test_sequential_and_toggling():
    from cirquent.model import validate

    c = validate({"nodes": [{"id": 1, "label": "sor"}, {"id": 2, "label": "tand"}, {"id": 3, "label": "p"},
                            {"id": 4, "label": "q"}, {"id": 5, "label": "r"}],
                  "edges": [[1, 2], [1, 3], [1, 4], [2, 3], [2, 5]]})
    assert legal_position_ars(c, parse_run("T 1.1; T 1.3"))
    assert not legal_position_ars(c, parse_run("T 1.2; T 1.2"))
    assert legal_position_ars(c, parse_run("B 2.1; B 2.2; B 2.1; B 2.1"))
    assert resolution_state(c, parse_run("T 1.2; B 2.2; B 2.1")) == {1: 2, 2: 1}


def test_col_port_moves_follow_the_port_game():
    c = load_cirquent("excluded_middle_general")
    g = nice_game(["a", "b"], {("a", "b"): TOP})
    i = Interpretation(general={"P": g})
    assert legal_position_col(c, i, parse_run("T 3.a; B 3.b; B 2.a"))
    verdict = legal_position_col(c, i, parse_run("T 3.a; T 3.b"))
    assert not verdict and verdict.offender is TOP
    assert not legal_position_col(c, i, parse_run("B 3.z"))


def test_delay():
    gamma = (T("a"), B("b"))
    assert is_delay((B("b"), T("a")), gamma, TOP)
    assert not is_delay((B("b"), T("a")), gamma, BOT)
    assert is_delay(gamma, gamma, BOT)


@given(cirquent_and_run(general=("P",), max_len=6))
def test_ars_legality_is_prefix_closed(sample):
    c, run = sample
    verdict = legal_position_ars(c, run)
    if verdict:
        assert all(legal_position_ars(c, run[:k]) for k in range(len(run)))
    else:
        k = verdict.index
        assert legal_position_ars(c, run[:k - 1])
        assert all(not legal_position_ars(c, run[:j]) for j in range(k, len(run) + 1))
        assert verdict.offender is run[k - 1].player


@given(cirquent_and_run(general=("P",), max_len=6))
def test_col_legality_is_prefix_closed(sample):
    c, run = sample
    i = Interpretation(general={"P": nice_game(["1"], {("1", "1"): TOP})})
    verdict = legal_position_col(c, i, run)
    if verdict:
        assert all(legal_position_col(c, i, run[:k]) for k in range(len(run)))
    else:
        k = verdict.index
        assert legal_position_col(c, i, run[:k - 1])
        assert all(not legal_position_col(c, i, run[:j]) for j in range(k, len(run) + 1))


def test_labmove_str():
    assert str(LabMove(TOP, "1.1")) == "T 1.1"
