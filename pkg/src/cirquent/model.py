"""Cirquents: rooted DAGs of ports and gates with clusters and ranks.

A cirquent is built from a raw document (the JSON layout below) by
:func:`validate`, which either returns an immutable :class:`Cirquent`
or raises a :class:`CirquentError` listing every violated invariant::

    {"nodes": [{"id": 1, "label": "or"}, {"id": 2, "label": "~p"}, ...],
     "edges": [[1, 2], ...],
     "clusters": [{"id": 1, "members": [1]}],
     "ranks": [[1]]}
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

from .errors import CirquentError


class GateKind(Enum):
    AND = "and"
    OR = "or"
    CAND = "cand"
    COR = "cor"
    SAND = "sand"
    SOR = "sor"
    TAND = "tand"
    TOR = "tor"

    @property
    def conjunctive(self) -> bool:
        return self in (GateKind.AND, GateKind.CAND, GateKind.SAND, GateKind.TAND)

    @property
    def disjunctive(self) -> bool:
        return not self.conjunctive

    @property
    def parallel(self) -> bool:
        return self in (GateKind.AND, GateKind.OR)

    @property
    def selectional(self) -> bool:
        return not self.parallel

    @property
    def choice(self) -> bool:
        return self in (GateKind.CAND, GateKind.COR)

    @property
    def sequential(self) -> bool:
        return self in (GateKind.SAND, GateKind.SOR)

    @property
    def toggling(self) -> bool:
        return self in (GateKind.TAND, GateKind.TOR)

    @property
    def dual(self) -> GateKind:
        return _DUAL[self]

    @property
    def symbol(self) -> str:
        return _SYMBOL[self]


_DUAL = {
    GateKind.AND: GateKind.OR, GateKind.OR: GateKind.AND,
    GateKind.CAND: GateKind.COR, GateKind.COR: GateKind.CAND,
    GateKind.SAND: GateKind.SOR, GateKind.SOR: GateKind.SAND,
    GateKind.TAND: GateKind.TOR, GateKind.TOR: GateKind.TAND,
}
_SYMBOL = {
    GateKind.AND: "∧", GateKind.OR: "∨", GateKind.CAND: "⊓", GateKind.COR: "⊔",
    GateKind.SAND: "△", GateKind.SOR: "▽", GateKind.TAND: "⩓", GateKind.TOR: "⩔",
}
GATE_LABELS = {k.value: k for k in GateKind}

_ATOM_RE = re.compile(r"[A-Za-z0-9_]+\Z")


@dataclass(frozen=True, order=True)
class Literal:
    atom: str
    negated: bool = False

    def __post_init__(self):
        if not _ATOM_RE.match(self.atom) or not any(ch.isalpha() for ch in self.atom):
            raise CirquentError("BAD_LABEL", f"not an atom: {self.atom!r}")

    @property
    def general(self) -> bool:
        """An atom is general iff its first letter is uppercase."""
        first = next(ch for ch in self.atom if ch.isalpha())
        return first.isupper()

    @property
    def kind(self) -> str:
        return "general" if self.general else "elementary"

    def negate(self) -> Literal:
        return Literal(self.atom, not self.negated)

    @classmethod
    def parse(cls, text: str) -> Literal:
        text = text.strip()
        negated = False
        while text.startswith("~"):
            negated = not negated
            text = text[1:].strip()
        return cls(text, negated)

    def __str__(self) -> str:
        return ("~" if self.negated else "") + self.atom


@dataclass(frozen=True)
class Node:
    id: int
    payload: Literal | GateKind

    @property
    def is_port(self) -> bool:
        return isinstance(self.payload, Literal)

    @property
    def label(self) -> str:
        return str(self.payload) if self.is_port else self.payload.value


class Cirquent:
    """A validated, immutable cirquent.

    Build instances with :func:`validate` or :func:`load_json`; the
    constructor assumes its arguments are already consistent.
    """

    def __init__(self, nodes, edges, clusters, ranks):
        self.nodes: dict[int, Node] = {n.id: n for n in sorted(nodes, key=lambda n: n.id)}
        self.edges: tuple[tuple[int, int], ...] = tuple((int(a), int(b)) for a, b in edges)
        self.clusters: dict[int, tuple[int, ...]] = {
            cid: tuple(sorted(m)) for cid, m in sorted(clusters.items())
        }
        self.ranks: tuple[tuple[int, ...], ...] = tuple(tuple(sorted(r)) for r in ranks)

    def __eq__(self, other):
        if not isinstance(other, Cirquent):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def _key(self):
        return (tuple(self.nodes.values()), self.edges,
                tuple(self.clusters.items()), self.ranks)

    def __repr__(self):
        return f"Cirquent({len(self.nodes)} nodes, {len(self.edges)} edges)"

    @cached_property
    def children(self) -> dict[int, tuple[int, ...]]:
        out: dict[int, list[int]] = {i: [] for i in self.nodes}
        for a, b in self.edges:
            out[a].append(b)
        return {i: tuple(c) for i, c in out.items()}

    @cached_property
    def root(self) -> int:
        targets = {b for _, b in self.edges}
        return next(i for i in self.nodes if i not in targets)

    def label(self, node_id: int):
        return self.nodes[node_id].payload

    def is_port(self, node_id: int) -> bool:
        return node_id in self.nodes and self.nodes[node_id].is_port

    @cached_property
    def ports(self) -> tuple[int, ...]:
        return tuple(i for i, n in self.nodes.items() if n.is_port)

    @cached_property
    def gates(self) -> tuple[int, ...]:
        return tuple(i for i, n in self.nodes.items() if not n.is_port)

    @cached_property
    def general_ports(self) -> tuple[int, ...]:
        return tuple(i for i in self.ports if self.nodes[i].payload.general)

    @cached_property
    def elementary_atoms(self) -> tuple[str, ...]:
        return tuple(sorted({self.nodes[i].payload.atom for i in self.ports
                             if not self.nodes[i].payload.general}))

    @cached_property
    def general_atoms(self) -> tuple[str, ...]:
        return tuple(sorted({self.nodes[i].payload.atom for i in self.general_ports}))

    @cached_property
    def cluster_of(self) -> dict[int, int]:
        return {g: cid for cid, members in self.clusters.items() for g in members}

    def cluster_kind(self, cid: int) -> GateKind:
        return self.nodes[cid].payload

    def outdegree(self, node_or_cluster: int) -> int:
        return len(self.children[node_or_cluster])

    @cached_property
    def selectional_clusters(self) -> tuple[int, ...]:
        return tuple(c for c in self.clusters if self.cluster_kind(c).selectional)

    @cached_property
    def parallel_clusters(self) -> tuple[int, ...]:
        return tuple(c for c in self.clusters if self.cluster_kind(c).parallel)

    @cached_property
    def rank_of(self) -> dict[int, int]:
        return {c: i for i, r in enumerate(self.ranks, 1) for c in r}

    @cached_property
    def has_toggling(self) -> bool:
        return any(self.cluster_kind(c).toggling for c in self.clusters)

    def to_doc(self) -> dict:
        return {
            "nodes": [{"id": n.id, "label": n.label} for n in self.nodes.values()],
            "edges": [[a, b] for a, b in self.edges],
            "clusters": [{"id": c, "members": list(m)} for c, m in self.clusters.items()],
            "ranks": [list(r) for r in self.ranks],
        }


def default_ranks(kinds: dict[int, GateKind]) -> list[list[int]]:
    """Disjunctive parallel clusters lowest, conjunctive highest."""
    ors = sorted(c for c, k in kinds.items() if k is GateKind.OR)
    ands = sorted(c for c, k in kinds.items() if k is GateKind.AND)
    return [r for r in (ors, ands) if r]


def validate(doc) -> Cirquent:
    """Check a raw document (or a Cirquent) and return a Cirquent."""
    if isinstance(doc, Cirquent):
        doc = doc.to_doc()
    problems: list[tuple[str, str]] = []

    def bad(code, detail):
        problems.append((code, detail))

    if not isinstance(doc, dict) or not isinstance(doc.get("nodes"), list):
        raise CirquentError("PARSE_ERROR", "document must be an object with a 'nodes' list")

    nodes: dict[int, Node] = {}
    for raw in doc["nodes"]:
        try:
            nid, label = raw["id"], raw["label"]
        except (TypeError, KeyError):
            raise CirquentError("PARSE_ERROR", f"bad node entry {raw!r}") from None
        if not isinstance(nid, int) or isinstance(nid, bool) or nid < 1:
            bad("BAD_NODE_ID", f"node id {nid!r} is not a positive integer")
            continue
        if nid in nodes:
            bad("DUPLICATE_NODE_ID", f"node {nid}")
            continue
        if not isinstance(label, str):
            bad("BAD_LABEL", f"node {nid}: label {label!r}")
            continue
        if label in GATE_LABELS:
            nodes[nid] = Node(nid, GATE_LABELS[label])
        else:
            try:
                nodes[nid] = Node(nid, Literal.parse(label))
            except CirquentError:
                bad("BAD_LABEL", f"node {nid}: label {label!r}")

    edges = []
    for e in doc.get("edges", []):
        if not (isinstance(e, (list, tuple)) and len(e) == 2):
            raise CirquentError("PARSE_ERROR", f"bad edge {e!r}")
        a, b = e
        if a not in nodes or b not in nodes:
            bad("UNKNOWN_NODE", f"edge {a}->{b}")
            continue
        edges.append((a, b))

    children: dict[int, list[int]] = {i: [] for i in nodes}
    for a, b in edges:
        children[a].append(b)
    for i, n in nodes.items():
        if n.is_port and children[i]:
            bad("PORT_WITH_CHILD", f"port {i}")

    if _has_cycle(children):
        bad("CYCLE", "the graph has a directed cycle")
    targets = {b for _, b in edges}
    roots = [i for i in nodes if i not in targets]
    if not roots:
        bad("NO_ROOT", "no node without parents")
    elif len(roots) > 1:
        bad("MULTIPLE_ROOTS", f"parentless nodes {sorted(roots)}")

    gates = {i: n.payload for i, n in nodes.items() if not n.is_port}
    clusters: dict[int, list[int]] = {}
    if doc.get("clusters") is None:
        clusters = {g: [g] for g in gates}
    else:
        seen: dict[int, int] = {}
        for raw in doc["clusters"]:
            try:
                cid, members = raw["id"], list(raw["members"])
            except (TypeError, KeyError):
                raise CirquentError("PARSE_ERROR", f"bad cluster entry {raw!r}") from None
            if cid in clusters:
                bad("BAD_CLUSTERING", f"cluster id {cid} used twice")
                continue
            ok = True
            for g in members:
                if g not in gates:
                    bad("BAD_CLUSTERING", f"cluster {cid}: member {g} is not a gate")
                    ok = False
                elif g in seen:
                    bad("BAD_CLUSTERING", f"gate {g} in clusters {seen[g]} and {cid}")
                    ok = False
                else:
                    seen[g] = cid
            if not members:
                bad("BAD_CLUSTERING", f"cluster {cid} is empty")
                continue
            if ok and cid != min(members):
                bad("BAD_CLUSTER_ID", f"cluster {cid} has smallest member {min(members)}")
            if ok:
                clusters[cid] = members
        for g in gates:
            if g not in seen:
                bad("BAD_CLUSTERING", f"gate {g} belongs to no cluster")
    cluster_kinds: dict[int, GateKind] = {}
    for cid, members in clusters.items():
        kinds = {gates[g] for g in members}
        degrees = {len(children[g]) for g in members}
        if len(kinds) > 1:
            bad("HETEROGENEOUS_CLUSTER", f"cluster {cid} mixes labels {sorted(k.value for k in kinds)}")
        elif len(degrees) > 1:
            bad("HETEROGENEOUS_CLUSTER", f"cluster {cid} mixes outdegrees {sorted(degrees)}")
        else:
            cluster_kinds[cid] = gates[members[0]]

    parallel = {c for c, k in cluster_kinds.items() if k.parallel}
    if doc.get("ranks") is None:
        ranks = default_ranks({c: cluster_kinds[c] for c in parallel})
    else:
        ranks = [list(r) for r in doc["ranks"]]
        placed: set[int] = set()
        for i, rank in enumerate(ranks, 1):
            if not rank:
                bad("BAD_RANK", f"rank {i} is empty")
            types = set()
            for c in rank:
                if c in placed:
                    bad("BAD_RANK", f"cluster {c} ranked twice")
                placed.add(c)
                if c not in clusters:
                    bad("BAD_RANK", f"rank {i}: {c} is not a cluster id")
                elif c in cluster_kinds and cluster_kinds[c].selectional:
                    bad("RANK_COVERS_SELECTIONAL", f"rank {i}: cluster {c}")
                elif c in cluster_kinds:
                    types.add(cluster_kinds[c])
            if len(types) > 1:
                bad("HETEROGENEOUS_RANK", f"rank {i} mixes conjunctive and disjunctive clusters")
        for c in sorted(parallel - placed):
            bad("RANK_MISSING_PARALLEL_CLUSTER", f"cluster {c}")

    if problems:
        raise CirquentError(problems[0][0], problems[0][1], problems)
    return Cirquent(nodes.values(), edges, clusters, ranks)


def _has_cycle(children: dict[int, list[int]]) -> bool:
    state = dict.fromkeys(children, 0)
    for start in children:
        if state[start]:
            continue
        stack = [(start, iter(children[start]))]
        state[start] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                state[node] = 2
                stack.pop()
            elif state[nxt] == 1:
                return True
            elif state[nxt] == 0:
                state[nxt] = 1
                stack.append((nxt, iter(children[nxt])))
    return False


def load_json(text: str) -> Cirquent:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CirquentError("PARSE_ERROR", f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return validate(doc)


def emit_json(c: Cirquent) -> str:
    """Deterministic JSON text, one node or edge group per line."""
    doc = c.to_doc()
    lines = ["{", '  "nodes": [']
    lines.append(",\n".join(f"    {json.dumps(n, ensure_ascii=False)}" for n in doc["nodes"]))
    lines.append("  ],")
    lines.append('  "edges": ' + json.dumps(doc["edges"]) + ",")
    lines.append('  "clusters": [')
    lines.append(",\n".join(f"    {json.dumps(cl)}" for cl in doc["clusters"]))
    lines.append("  ],")
    lines.append('  "ranks": ' + json.dumps(doc["ranks"]))
    lines.append("}")
    return "\n".join(line for line in lines if line) + "\n"


def emit_dot(c: Cirquent) -> str:
    """Graphviz text in the figure style: literals at ports, n^m at gates."""
    out = ["digraph cirquent {", "  rankdir=BT;", "  node [shape=plaintext];"]
    for nid, node in c.nodes.items():
        if node.is_port:
            text = str(node.payload).replace("~", "¬")
        else:
            cid = c.cluster_of[nid]
            note = f"{cid}^{c.rank_of[cid]}" if cid in c.rank_of else f"{cid}"
            text = f"{node.payload.symbol} {note}"
        shape = "plaintext" if node.is_port else "circle"
        out.append(f'  n{nid} [label="{text}", xlabel="{nid}", shape={shape}, ordering=out];')
    order: dict[int, int] = {}
    for a, b in c.edges:
        order[a] = order.get(a, 0) + 1
        out.append(f'  n{a} -> n{b} [label="{order[a]}"];')
    out.append("}")
    return "\n".join(out) + "\n"


def canonical(c: Cirquent):
    """Id-free structure: nodes renumbered in DFS preorder from the root.

    Two cirquents have equal canonical forms iff they differ only in
    node ids (labels, edge order, clusters and ranks all agree).
    """
    index: dict[int, int] = {}
    stack = [c.root]
    while stack:
        n = stack.pop()
        if n in index:
            continue
        index[n] = len(index)
        stack.extend(reversed(c.children[n]))
    nodes = tuple(sorted((index[i], c.nodes[i].label, tuple(index[ch] for ch in c.children[i]))
                         for i in c.nodes))
    cluster = {cid: frozenset(index[g] for g in members) for cid, members in c.clusters.items()}
    ranks = tuple(frozenset(cluster[cid] for cid in r) for r in c.ranks)
    return nodes, frozenset(cluster.values()), ranks
