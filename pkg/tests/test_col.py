import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from cirquent.col import metatrue, port_values, true_col, wn
from cirquent.corpus import load_cirquent, load_interp
from cirquent.errors import CirquentError
from cirquent.games import Interpretation, nice_game
from cirquent.model import validate
from cirquent.runs import BOT, TOP, legal_position_col, parse_run, resolution_state
from cirquent.truth import engine
from oracles import (ATOMS, cirquent_and_run, cirquents, classical, classical_bits, elementary_port_values, gate_value,
                     legal_subrun, naive_truth, partial_choices, row_masks)

DAGGER = load_interp("dagger4")
RUN11 = parse_run("T 1.1; T 3.1; T 4.2; T 2.2; T 5.2; T 6.1")


def test_fig1_left_is_false_either_way():
    c = load_cirquent("fig1_left")
    assert not true_col(c, Interpretation({"p": True}))
    assert not true_col(c, Interpretation({"p": False}))
    assert classical(c, elementary_port_values(c, {"p"})) is False


def test_childless_gates():
    c = validate({"nodes": [{"id": 1, "label": "and"}, {"id": 2, "label": "or"}, {"id": 3, "label": "and"}],
                  "edges": [[1, 2], [1, 3]]})
    assert not true_col(c, Interpretation())
    assert metatrue(c, Interpretation(), (), {})  # unset root ∧
    assert not metatrue(c, Interpretation(), (), {1: 1})
    assert metatrue(c, Interpretation(), (), {1: 2})
    d = validate({"nodes": [{"id": 1, "label": "and"}]})
    assert true_col(d, Interpretation())


def test_fig12_false_under_dagger():
    assert not true_col(load_cirquent("fig12"), DAGGER)


def test_fig16_and_17():
    d, dd = load_interp("dagger3"), load_interp("ddagger3")
    assert true_col(load_cirquent("fig16"), d)
    assert not true_col(load_cirquent("fig16"), dd)
    assert not true_col(load_cirquent("fig17_left"), d)
    assert true_col(load_cirquent("fig17_right"), dd)


def test_fig13_metaselections_match_hand_evaluation():
    c = load_cirquent("fig13")
    rng = random.Random(7)
    atoms = list(c.elementary_atoms)
    for _ in range(20):
        true = {a for a in atoms if rng.random() < 0.5}
        interp = Interpretation.true_atoms(true)
        f1 = {cid: rng.choice([None, 1, 2]) for cid in c.ranks[0]}
        f2 = {cid: rng.choice([None, 1, 2]) for cid in c.ranks[1]}
        expect = gate_value(c, elementary_port_values(c, true), {}, {**f1, **f2}, c.root)
        assert metatrue(c, interp, (), [f1, f2]) is expect
        assert metatrue(c, interp, (), {**f1, **f2}) is expect


def test_bad_metaselections():
    c = load_cirquent("fig13")
    for f in ([{}], [{5: 1}, {}], {99: 1}, {3: 7}):
        with pytest.raises(CirquentError) as info:
            metatrue(c, Interpretation(), (), f)
        assert info.value.code == "BAD_METASELECTION"


def test_fig12_is_exists_then_forall():
    c = load_cirquent("fig12")
    assert len(c.ranks) == 2
    rng = random.Random(12)
    for _ in range(30):
        true = {a for a in c.elementary_atoms if rng.random() < 0.3}
        values = elementary_port_values(c, true)
        expect = any(all(gate_value(c, values, {}, {**f1, **f2}, c.root) for f2 in partial_choices(c, c.ranks[1]))
                     for f1 in partial_choices(c, c.ranks[0]))
        assert true_col(c, Interpretation.true_atoms(true)) is expect


def test_wn():
    assert wn(load_cirquent("fig10"), DAGGER, RUN11) is BOT
    assert not legal_position_col(load_cirquent("fig10"), DAGGER, RUN11)
    assert wn(load_cirquent("fig11"), DAGGER, RUN11) is TOP
    # ⊥ moving in a ⊤ cluster loses on the spot
    assert wn(load_cirquent("fig7"), Interpretation(), parse_run("B 7.1")) is TOP


def test_illegal_run_is_rejected_by_truth():
    with pytest.raises(CirquentError) as info:
        true_col(load_cirquent("fig10"), DAGGER, RUN11)
    assert info.value.code == "ILLEGAL_RUN"


def test_general_port_values_follow_the_game():
    c = load_cirquent("excluded_middle_general")
    i = Interpretation(general={"P": nice_game(["1", "2"], {("1", "2"): TOP})})
    assert port_values(c, i, ()) == {2: 0, 3: 1}
    run = parse_run("T 3.1; B 3.2; B 2.2; T 2.1")
    # port 2 carries ¬P: there ⊤ answered 1 to ⊥'s 2, i.e. (2,1) in P
    assert port_values(c, i, run) == {2: 1, 3: 1}
    assert wn(c, i, run) is TOP
    run = parse_run("T 3.2; B 3.1; B 2.1; T 2.2")
    assert port_values(c, i, run) == {2: 0, 3: 0}
    assert wn(c, i, run) is BOT


@given(cirquents(max_nodes=12), st.randoms(use_true_random=False))
def test_metatruth_is_monotone(c, rng):
    sel = {cid: rng.choice([None] + list(range(1, c.outdegree(cid) + 1))) for cid in c.selectional_clusters}
    f = {cid: rng.choice([None] + list(range(1, c.outdegree(cid) + 1))) for cid in c.parallel_clusters}
    ports = {a: rng.randint(0, 1) for a in c.ports}
    e = engine(c)
    before_meta = e.evaluate(ports, sel, f, 1)
    before_truth = e.truth(ports, sel, 1)
    for a in c.ports:
        if not ports[a]:
            lifted = {**ports, a: 1}
            assert e.evaluate(lifted, sel, f, 1) >= before_meta
            assert e.truth(lifted, sel, 1) >= before_truth


@given(cirquent_and_run(max_nodes=12, max_len=6), st.sets(st.sampled_from("pqr")))
def test_total_metaselections_suffice(sample, true):
    c, run = sample
    interp = Interpretation.true_atoms(true)
    run = legal_subrun(run, lambda r: bool(legal_position_col(c, interp, r)))
    values = elementary_port_values(c, true)
    sel = resolution_state(c, run)
    unrestricted = naive_truth(c, values, sel)
    assert naive_truth(c, values, sel, total_only=True) is unrestricted
    assert true_col(c, interp, run) is unrestricted


@pytest.mark.parametrize("name", ["fig1_left", "fig5_left", "fig6", "fig7", "fig12", "fig13", "fig14", "fig15",
                                  "fig16", "fig17_left", "fig17_right"])
def test_total_metaselections_suffice_on_corpus(name):
    c = load_cirquent(name)
    rng = random.Random(name)
    atoms = list(c.elementary_atoms)
    for _ in range(4):
        true = {a for a in atoms if rng.random() < 0.5}
        values = elementary_port_values(c, true)
        assert true_col(c, Interpretation.true_atoms(true)) is naive_truth(c, values, dict.fromkeys(c.selectional_clusters))


@settings(max_examples=500)
@given(cirquents(max_nodes=12, kinds=("and", "or"), atoms=tuple(ATOMS), clustered=False, ranked=False))
def test_conservative_over_classical_logic(c):
    atoms = list(c.elementary_atoms)
    k = len(atoms)
    full = (1 << (1 << k)) - 1
    amask = dict(zip(atoms, row_masks(k)))
    pmask = {a: (full ^ amask[c.label(a).atom]) if c.label(a).negated else amask[c.label(a).atom] for a in c.ports}
    expect = classical_bits(c, pmask, full)
    assert engine(c).truth(pmask, {}, full) == expect
    for row in list(range(1 << k))[:: max(1, (1 << k) // 8)]:
        interp = Interpretation({a: bool((row >> j) & 1) for j, a in enumerate(atoms)})
        assert true_col(c, interp) is bool((expect >> row) & 1)
