import itertools

import pytest
from hypothesis import given

from cirquent.ars import (EXACT_LIMIT, _fast_witness, accomplished, accomplished_state, consistent,
                          enumerate_situations, true_ars, witness, wn_ars)
from cirquent.corpus import load_cirquent
from cirquent.errors import CirquentError
from cirquent.model import validate
from cirquent.runs import BOT, TOP, induced_arrangement, legal_position_ars, parse_run, resolution_state
from oracles import cirquent_and_run, legal_subrun, naive_truth

GAMMA2 = parse_run("T (1,5); T (2,7); T (3,6); T (4,8)")
GAMMA1 = parse_run("T (1,5); T (2,6); T (3,7); T (4,8)")
FIG22_RUN = parse_run("T (8,1); T (4,2); T (5,3)")


def situations(c):
    """Situations in witness order, spelled out by hand."""
    atoms = sorted({c.label(a).atom for a in c.ports if not c.label(a).general})
    general = sorted(a for a in c.ports if c.label(a).general)
    for row in itertools.product((True, False), repeat=len(atoms) + len(general)):
        val = dict(zip(atoms + general, row))
        yield {a: val[a] if c.label(a).general else val[c.label(a).atom] != c.label(a).negated for a in c.ports}


def naive_witness(c, run):
    sel = resolution_state(c, run)
    arrangement = induced_arrangement(run)
    for s in situations(c):
        if all(s[a] != s[b] for a, b in arrangement) and not naive_truth(c, s, sel):
            return s
    return None


def test_fig20_situations():
    c = load_cirquent("fig20")
    assert sum(1 for _ in enumerate_situations(c)) == 256
    assert list(enumerate_situations(c)) == list(situations(c))


def test_fig20_runs():
    c = load_cirquent("fig20")
    assert accomplished(c, GAMMA2) and wn_ars(c, GAMMA2) is TOP
    assert not accomplished(c, GAMMA1) and wn_ars(c, GAMMA1) is BOT
    assert witness(c, GAMMA2) is None


def test_fig20_witness_is_the_figure_situation():
    c = load_cirquent("fig20")
    dagger = {1: True, 2: True, 3: False, 4: False, 5: False, 6: False, 7: True, 8: True}
    w = witness(c, GAMMA1)
    assert w == dagger == naive_witness(c, GAMMA1)
    assert consistent(w, induced_arrangement(GAMMA1))
    assert not true_ars(c, w, GAMMA1)
    assert not consistent(w, induced_arrangement(GAMMA2))


def test_fig22_prefixes():
    c = load_cirquent("fig22_right")
    got = [accomplished(c, FIG22_RUN[:k]) for k in range(len(FIG22_RUN) + 1)]
    assert got == sorted(got) and got[-1] and not got[0]
    assert not accomplished(load_cirquent("fig22_drawn_right"), FIG22_RUN)


def test_environment_allocating_loses():
    c = load_cirquent("fig20")
    assert wn_ars(c, parse_run("B (1,5)")) is TOP
    assert wn_ars(c, parse_run("T (1,5); T (5,2)")) is BOT
    with pytest.raises(CirquentError) as info:
        accomplished(c, parse_run("B (1,5)"))
    assert info.value.code == "ILLEGAL_RUN"


def test_excluded_middle():
    c = load_cirquent("excluded_middle_general")
    run = parse_run("T (3,2)")
    assert not accomplished(c, ())
    assert accomplished(c, run)
    assert not legal_position_ars(c, parse_run("T (2,3)"))


def test_fast_path_above_the_limit():
    n = EXACT_LIMIT // 2 + 1
    nodes = [{"id": 1, "label": "and"}]
    edges = []
    for k in range(n):
        g, p, q = 2 + 3 * k, 3 + 3 * k, 4 + 3 * k
        nodes += [{"id": g, "label": "or"}, {"id": p, "label": "~P"}, {"id": q, "label": "P"}]
        edges += [[1, g], [g, p], [g, q]]
    c = validate({"nodes": nodes, "edges": edges})
    run = tuple(lm for k in range(n) for lm in parse_run(f"T ({4 + 3 * k},{3 + 3 * k})"))
    assert accomplished(c, run)
    assert witness(c, run) is None
    w = witness(c, run[:-1])
    assert w is not None and consistent(w, induced_arrangement(run[:-1])) and not true_ars(c, w, run[:-1])


@given(cirquent_and_run(general=("P", "Q"), max_nodes=10, max_len=6))
def test_witness_and_accomplishment_match_the_definition(sample):
    c, run = sample
    run = legal_subrun(run, lambda r: bool(legal_position_ars(c, r)))
    expect = naive_witness(c, run)
    assert witness(c, run) == expect
    assert accomplished(c, run) is (expect is None)
    sel, arrangement = resolution_state(c, run), induced_arrangement(run)
    assert accomplished_state(c, sel, arrangement) is (expect is None)
    fast = _fast_witness(c, sel, arrangement)
    assert (fast is None) is (expect is None)
    if fast is not None:
        assert consistent(fast, arrangement) and not naive_truth(c, fast, sel)


@given(cirquent_and_run(general=("P", "Q"), max_nodes=10, max_len=6))
def test_more_allocations_never_hurt(sample):
    c, run = sample
    run = legal_subrun(run, lambda r: bool(legal_position_ars(c, r)))
    allocations = tuple(lm for lm in run if lm.move.startswith("("))
    got = [accomplished(c, allocations[:k]) for k in range(len(allocations) + 1)]
    assert got == sorted(got)
