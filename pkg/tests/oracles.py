"""Reference evaluators and random generators used only by the tests.

Everything here is written from the definitions, straight and slow:
no bitsets, no rank-suffix shortcut, no restriction to total
metaselections.
"""

from __future__ import annotations

import itertools

from hypothesis import strategies as st

from cirquent.formula import Atom, Conn, Not
from cirquent.model import GateKind, validate

K = GateKind
CONJ = {K.AND, K.CAND, K.SAND, K.TAND}


# ---- cirquent evaluation --------------------------------------------------------

def gate_value(c, values, sel, f, node, memo=None):
    """Metatruth of ``node`` by direct recursion.

    ``values``: port id -> bool.  ``sel``: selectional cluster -> index or
    None.  ``f``: parallel cluster -> index or None (missing = None).
    """
    memo = {} if memo is None else memo
    if node in memo:
        return memo[node]
    n = c.nodes[node]
    if n.is_port:
        out = bool(values[node])
    else:
        kind = n.payload
        cid = c.cluster_of[node]
        pick = f.get(cid) if kind.parallel else sel.get(cid)
        if pick is None:
            out = kind in CONJ
        else:
            out = gate_value(c, values, sel, f, c.children[node][pick - 1], memo)
    memo[node] = out
    return out


def classical(c, values, node=None, memo=None):
    """Plain circuit value of an and/or-only cirquent."""
    memo = {} if memo is None else memo
    node = c.root if node is None else node
    if node in memo:
        return memo[node]
    n = c.nodes[node]
    if n.is_port:
        out = bool(values[node])
    else:
        kids = [classical(c, values, k, memo) for k in c.children[node]]
        out = all(kids) if n.payload is K.AND else any(kids)
    memo[node] = out
    return out


def partial_choices(c, rank):
    """Every partial function from the clusters of ``rank`` to indices."""
    cids = list(rank)
    options = [[None] + list(range(1, c.outdegree(cid) + 1)) for cid in cids]
    for row in itertools.product(*options):
        yield dict(zip(cids, row))


def naive_truth(c, values, sel, total_only=False):
    """Rank-by-rank quantification over metaselections.

    With ``total_only`` each cluster of positive outdegree must get an
    index, which is the restriction the engine relies on.
    """

    def rank_choices(rank):
        for fi in partial_choices(c, rank):
            if total_only and any(v is None and c.outdegree(k) > 0 for k, v in fi.items()):
                continue
            yield fi

    def go(i, f):
        if i == len(c.ranks):
            return gate_value(c, values, sel, f, c.root)
        conj = c.cluster_kind(c.ranks[i][0]) in CONJ
        results = (go(i + 1, {**f, **fi}) for fi in rank_choices(c.ranks[i]))
        return all(results) if conj else any(results)

    return go(0, {})


def elementary_port_values(c, true_atoms):
    return {a: (c.label(a).atom in true_atoms) != c.label(a).negated for a in c.ports}


# ---- formula evaluation --------------------------------------------------------

def formula_bits(f, masks, full):
    """Bit-parallel classical value of a quantifier-free and/or/not formula."""
    if isinstance(f, Atom):
        m = masks[f.name]
        return full ^ m if f.negated else m
    if isinstance(f, Not):
        return full ^ formula_bits(f.body, masks, full)
    vals = [formula_bits(p, masks, full) for p in f.parts]
    if f.kind is K.AND:
        out = full
        for v in vals:
            out &= v
        return out
    out = 0
    for v in vals:
        out |= v
    return out


def row_masks(n):
    """Masks over the 2^n rows; row r gives variable j the value of bit j of r."""
    rows = 1 << n
    out = []
    for j in range(n):
        m = 0
        for r in range(rows):
            if (r >> j) & 1:
                m |= 1 << r
        out.append(m)
    return out


def formula_size(f):
    if isinstance(f, Atom):
        return 1
    if isinstance(f, Not):
        return 1 + formula_size(f.body)
    return 1 + sum(formula_size(p) for p in f.parts)


# ---- generators ---------------------------------------------------------------

ATOMS = "abcdefghijkl"


def formula_texts(max_leaves=10):
    leaf = st.sampled_from(ATOMS).map(lambda a: a)

    def extend(inner):
        return st.one_of(
            inner.map(lambda x: f"~{x}"),
            st.tuples(inner, inner).map(lambda t: f"({t[0]} /\\ {t[1]})"),
            st.tuples(inner, inner).map(lambda t: f"({t[0]} \\/ {t[1]})"),
            st.tuples(inner, inner).map(lambda t: f"({t[0]} -> {t[1]})"),
        )

    return st.recursive(leaf, extend, max_leaves=max_leaves)


@st.composite
def cirquent_docs(draw, max_nodes=12, kinds=("and", "or", "cand", "cor", "sand", "sor"),
                  atoms=("p", "q", "r"), general=(), clustered=True, ranked=True, min_nodes=2):
    n = draw(st.integers(min_nodes, max_nodes))
    g = draw(st.integers(1, n - 1))
    labels = {i: draw(st.sampled_from(kinds)) for i in range(1, g + 1)}
    pool = list(atoms) + list(general)
    for i in range(g + 1, n + 1):
        atom = draw(st.sampled_from(pool))
        labels[i] = ("~" if draw(st.booleans()) else "") + atom
    edges = []
    for i in range(2, n + 1):
        edges.append((draw(st.integers(1, min(i - 1, g))), i))
    extra = draw(st.lists(st.tuples(st.integers(1, g), st.integers(2, n)), max_size=3))
    edges += [(a, b) for a, b in extra if a < b]
    order = draw(st.permutations(range(len(edges))))
    edges = [edges[k] for k in order]
    outdeg = {i: sum(1 for a, _ in edges if a == i) for i in range(1, g + 1)}
    groups: dict = {}
    for i in range(1, g + 1):
        bucket = draw(st.integers(0, 2)) if clustered else i
        groups.setdefault((labels[i], outdeg[i], bucket), []).append(i)
    clusters = [sorted(m) for m in groups.values()]
    doc = {"nodes": [{"id": i, "label": labels[i]} for i in range(1, n + 1)],
           "edges": [list(e) for e in edges],
           "clusters": [{"id": m[0], "members": m} for m in clusters]}
    if ranked:
        levels: dict = {}
        for m in clusters:
            kind = K(labels[m[0]])
            if kind.parallel:
                lvl = draw(st.integers(0, 2))
                levels.setdefault((lvl, kind in CONJ), []).append(m[0])
        doc["ranks"] = [levels[k] for k in sorted(levels)]
    return doc


def cirquents(**kw):
    return cirquent_docs(**kw).map(validate)


def moves_for(c):
    """A pool of plausible and implausible moves for run generation."""
    out = [f"{cid}.{j}" for cid in c.clusters for j in range(0, c.outdegree(cid) + 2)]
    ports = c.general_ports
    out += [f"({a},{b})" for a in ports for b in ports if a != b]
    out += [f"{a}.1" for a in c.ports] + ["junk", "99.1"]
    return out


@st.composite
def cirquent_and_run(draw, max_len=6, **kw):
    from cirquent.runs import BOT, TOP, LabMove

    c = draw(cirquents(**kw))
    pool = moves_for(c)
    run = draw(st.lists(st.tuples(st.sampled_from([TOP, BOT]), st.sampled_from(pool)), max_size=max_len))
    return c, tuple(LabMove(p, m) for p, m in run)


def legal_subrun(run, is_legal):
    """Drop every labmove that would make the run illegal."""
    out = ()
    for lm in run:
        if is_legal(out + (lm,)):
            out += (lm,)
    return out


def classical_bits(c, masks, full, node=None, memo=None):
    """Bit-parallel classical value of an and/or-only cirquent; ``masks``: port -> mask."""
    memo = {} if memo is None else memo
    node = c.root if node is None else node
    if node in memo:
        return memo[node]
    n = c.nodes[node]
    if n.is_port:
        out = masks[node]
    elif n.payload is K.AND:
        out = full
        for k in c.children[node]:
            out &= classical_bits(c, masks, full, k, memo)
    else:
        out = 0
        for k in c.children[node]:
            out |= classical_bits(c, masks, full, k, memo)
    memo[node] = out
    return out
