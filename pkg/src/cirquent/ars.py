"""Abstract resource semantics: situations, arrangements, accomplishment."""

from __future__ import annotations

import itertools

from .model import Cirquent
from .runs import BOT, TOP, Player, induced_arrangement, legal_position_ars, require_legal, resolution_state
from .truth import engine, var_masks

# above this many variables the witness search drops the exact order
EXACT_LIMIT = 20


def _variables(c: Cirquent) -> list:
    """Situation coordinates in enumeration order: atoms, then general ports."""
    return list(c.elementary_atoms) + list(c.general_ports)


def _expand(c: Cirquent, values: dict) -> dict[int, bool]:
    """Port values from values of elementary atoms and general ports."""
    out = {}
    for a in c.ports:
        lit = c.label(a)
        out[a] = values[a] if lit.general else values[lit.atom] != lit.negated
    return out


def enumerate_situations(c: Cirquent):
    """Every situation of ``c``, T before F, atoms first then ports by id."""
    keys = _variables(c)
    for row in itertools.product((True, False), repeat=len(keys)):
        yield _expand(c, dict(zip(keys, row)))


def consistent(s: dict[int, bool], arrangement) -> bool:
    return all(s[a] != s[b] for a, b in arrangement)


def true_ars(c: Cirquent, s: dict[int, bool], run=()) -> bool:
    require_legal(legal_position_ars(c, run))
    sel = resolution_state(c, run)
    return bool(engine(c).truth({a: int(s[a]) for a in c.ports}, sel, 1))


def witness(c: Cirquent, run=()) -> dict[int, bool] | None:
    """First situation consistent with the run's arrangement that makes
    ``c`` false, or None when the run is accomplished."""
    require_legal(legal_position_ars(c, run))
    sel = resolution_state(c, run)
    arrangement = induced_arrangement(run)
    keys = _variables(c)
    if len(keys) > EXACT_LIMIT:
        return _fast_witness(c, sel, arrangement)
    n = len(keys)
    full = (1 << (1 << n)) - 1
    masks = dict(zip(keys, var_masks(n)))
    ports = {}
    for a in c.ports:
        lit = c.label(a)
        m = masks[a] if lit.general else masks[lit.atom]
        ports[a] = full ^ m if (not lit.general and lit.negated) else m
    ok = full
    for a, b in arrangement:
        ok &= ports[a] ^ ports[b]
    bad = ok & ~engine(c).truth(ports, sel, full)
    if not bad:
        return None
    k = (bad & -bad).bit_length() - 1
    row = [not (k >> (n - 1 - j)) & 1 for j in range(n)]
    return _expand(c, dict(zip(keys, row)))


def accomplished(c: Cirquent, run=()) -> bool:
    require_legal(legal_position_ars(c, run))
    return accomplished_state(c, resolution_state(c, run), induced_arrangement(run))


def _fast_table(c: Cirquent, arrangement):
    """Port masks over the situations that matter for falsification.

    Unmatched general ports are fixed to F: truth is monotone, so any
    falsifying consistent situation stays one after lowering them.
    """
    cache = engine(c).tables
    key = ("fast", frozenset(arrangement))
    if key not in cache:
        cache[key] = _build_fast_table(c, arrangement)
    return cache[key]


def _build_fast_table(c: Cirquent, arrangement):
    partner = {}
    for a, b in arrangement:
        partner[a], partner[b] = a, a
    keys = list(c.elementary_atoms) + sorted({a for a, _ in arrangement})
    n = len(keys)
    full = (1 << (1 << n)) - 1
    masks = dict(zip(keys, var_masks(n)))
    ports = {}
    for a in c.ports:
        lit = c.label(a)
        if not lit.general:
            ports[a] = full ^ masks[lit.atom] if lit.negated else masks[lit.atom]
        elif a in partner:
            m = masks[partner[a]]
            ports[a] = m if partner[a] == a else full ^ m
        else:
            ports[a] = 0
    return keys, full, ports


def accomplished_state(c: Cirquent, sel: dict, arrangement) -> bool:
    """Accomplishment from resolvents and an arrangement, no run needed."""
    _, full, ports = _fast_table(c, arrangement)
    return engine(c).truth(ports, sel, full) == full


def _fast_witness(c: Cirquent, sel: dict, arrangement) -> dict[int, bool] | None:
    keys, full, ports = _fast_table(c, arrangement)
    bad = full & ~engine(c).truth(ports, sel, full)
    if not bad:
        return None
    k = (bad & -bad).bit_length() - 1
    return {a: bool((m >> k) & 1) for a, m in ports.items()}


def wn_ars(c: Cirquent, run=()) -> Player:
    verdict = legal_position_ars(c, run)
    if not verdict:
        return verdict.offender.opp
    sel = resolution_state(c, run)
    return TOP if accomplished_state(c, sel, induced_arrangement(run)) else BOT
