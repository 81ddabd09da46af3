"""Formulas of CoL and (ranked) IF logic, and their compilation to cirquents.

Text syntax::

    ~F            negation
    F /\\ G        parallel and      F \\/ G      parallel or
    F cand G      choice and        F cor G     choice or
    F sand G      sequential        F sor G
    F tand G      toggling          F tor G
    F -> G        read as ~F \\/ G
    A x F, E x F, CA x F, CE x F, SA x F, SE x F, TA x F, TE x F
    E^2 y/x,z F   rank superscript and slash set
    F \\/^1 G      superscript on a connective

Conjunctions bind tighter than disjunctions, ``->`` is loosest and
right-associative, and a quantifier scopes over the single formula
that follows it (use parentheses for anything larger).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Union

from .errors import CirquentError
from .model import Cirquent, GateKind, Literal, default_ranks, validate

K = GateKind


@dataclass(frozen=True)
class Atom:
    name: str
    args: tuple = ()
    negated: bool = False


@dataclass(frozen=True)
class Not:
    body: Formula


@dataclass(frozen=True)
class Conn:
    kind: GateKind
    parts: tuple
    rank: int | None = None
    occ: int = 0


@dataclass(frozen=True)
class Quant:
    kind: GateKind
    var: str
    body: Formula
    slash: tuple = ()
    rank: int | None = None
    occ: int = 0


Formula = Union[Atom, Not, Conn, Quant]

INFIX = {"/\\": K.AND, "\\/": K.OR, "cand": K.CAND, "cor": K.COR,
         "sand": K.SAND, "sor": K.SOR, "tand": K.TAND, "tor": K.TOR}
QUANTIFIERS = {"A": K.AND, "E": K.OR, "CA": K.CAND, "CE": K.COR,
               "SA": K.SAND, "SE": K.SOR, "TA": K.TAND, "TE": K.TOR}
_INFIX_TEXT = {k: t for t, k in INFIX.items()}
_QUANT_TEXT = {k: t for t, k in QUANTIFIERS.items()}

_TOKEN_RE = re.compile(r"\s*(?:(/\\|\\/|->|[~^/(),])|([A-Za-z_][A-Za-z0-9_]*)|([0-9]+))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    out, pos = [], 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos == len(text):
            break
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise CirquentError("PARSE_ERROR", f"unexpected character {text[pos]!r} at column {pos + 1}")
        sym, ident, num = m.groups()
        start = m.start(1) if sym else m.start(2) if ident else m.start(3)
        if sym:
            out.append(("sym", sym, start))
        elif ident:
            out.append(("op" if ident in INFIX else "id", ident, start))
        else:
            out.append(("int", num, start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0
        self.occ = 0
        self.bound: list[str] = []

    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def fail(self, what: str):
        tok = self.peek()
        shown = repr(tok[1]) if tok[0] != "end" else "end of input"
        raise CirquentError("PARSE_ERROR", f"{what}, got {shown} at column {tok[2] + 1}")

    def take(self, kind=None, value=None):
        tok = self.peek()
        if (kind and tok[0] != kind) or (value is not None and tok[1] != value):
            self.fail(f"expected {value or kind}")
        self.i += 1
        return tok

    def next_occ(self) -> int:
        self.occ += 1
        return self.occ

    def superscript(self):
        if self.peek()[1] == "^" and self.peek()[0] == "sym":
            self.i += 1
            n = int(self.take("int")[1])
            if n < 1:
                raise CirquentError("BAD_SUPERSCRIPTS", "superscripts start at 1")
            return n
        return None

    def formula(self):
        lhs = self.level(disjunctive=True)
        if self.peek()[1] == "->":
            self.i += 1
            occ = self.next_occ()
            rhs = self.formula()
            return Conn(K.OR, (to_nnf(Not(lhs)), rhs), None, occ)
        return lhs

    def level(self, disjunctive: bool):
        sub = (lambda: self.level(False)) if disjunctive else self.unary
        node = sub()
        while self.peek()[0] in ("op", "sym") and self.peek()[1] in INFIX:
            kind = INFIX[self.peek()[1]]
            if kind.disjunctive != disjunctive:
                break
            self.i += 1
            rank = self.superscript()
            occ = self.next_occ()
            parts = [node, sub()]
            while (self.peek()[1] in INFIX and INFIX[self.peek()[1]] is kind
                   and self._rank_ahead() == rank):
                self.i += 1
                self.superscript()
                parts.append(sub())
            node = Conn(kind, tuple(parts), rank, occ)
        return node

    def _rank_ahead(self):
        if self.peek(1)[1] == "^" and self.peek(2)[0] == "int":
            return int(self.peek(2)[1])
        return None

    def unary(self):
        kind, val, _ = self.peek()
        if kind == "sym" and val == "~":
            self.i += 1
            return Not(self.unary())
        if kind == "sym" and val == "(":
            self.i += 1
            f = self.formula()
            self.take("sym", ")")
            return f
        if kind == "id" and val in QUANTIFIERS and (self.peek(1)[0] == "id" or self.peek(1)[1] == "^"):
            return self.quantifier()
        if kind == "id":
            return self.atom()
        self.fail("expected a formula")

    def quantifier(self):
        qkind = QUANTIFIERS[self.take("id")[1]]
        rank = self.superscript()
        occ = self.next_occ()
        var = self.take("id")[1]
        slash = []
        if self.peek()[1] == "/" and self.peek()[0] == "sym":
            self.i += 1
            slash.append(self.take("id")[1])
            while self.peek()[1] == "," and self.peek()[0] == "sym":
                self.i += 1
                slash.append(self.take("id")[1])
        if var in self.bound:
            raise CirquentError("DUPLICATE_BOUND_VARIABLE", f"variable {var} is bound twice")
        self.bound.append(var)
        body = self.unary()
        return Quant(qkind, var, body, tuple(slash), rank, occ)

    def atom(self):
        name = self.take("id")[1]
        args = []
        if self.peek()[1] == "(" and self.peek()[0] == "sym":
            self.i += 1
            while True:
                kind, val, _ = self.peek()
                if kind == "int":
                    args.append(int(val))
                elif kind == "id":
                    args.append(val)
                else:
                    self.fail("expected a term")
                self.i += 1
                if self.peek()[1] == ",":
                    self.i += 1
                    continue
                self.take("sym", ")")
                break
        try:
            Literal(name, False)
        except CirquentError:
            raise CirquentError("PARSE_ERROR", f"bad atom name {name!r}") from None
        return Atom(name, tuple(args))


def parse_formula(text: str) -> Formula:
    p = _Parser(text)
    f = p.formula()
    if p.peek()[0] != "end":
        p.fail("expected end of formula")
    _check_superscripts(f)
    return f


def _walk(f: Formula):
    yield f
    if isinstance(f, Not):
        yield from _walk(f.body)
    elif isinstance(f, Conn):
        for part in f.parts:
            yield from _walk(part)
    elif isinstance(f, Quant):
        yield from _walk(f.body)


def _strip_negations(f: Formula) -> tuple[Formula, int]:
    k = 0
    while isinstance(f, Not):
        f, k = f.body, k + 1
    return f, k


def _check_superscripts(f: Formula) -> None:
    core = to_nnf(_strip_negations(f)[0])
    ranks: dict[int, set[bool]] = {}
    with_rank = without = 0
    for node in _walk(core):
        if isinstance(node, (Conn, Quant)):
            if not node.kind.parallel:
                if node.rank is not None:
                    raise CirquentError("BAD_SUPERSCRIPTS", f"superscript on selectional {node.kind.symbol}")
                continue
            if node.rank is None:
                without += 1
            else:
                with_rank += 1
                ranks.setdefault(node.rank, set()).add(node.kind.disjunctive)
    if with_rank and without:
        raise CirquentError("BAD_SUPERSCRIPTS", "either every ∧, ∨, ∀, ∃ carries a superscript or none does")
    if ranks and sorted(ranks) != list(range(1, max(ranks) + 1)):
        raise CirquentError("BAD_SUPERSCRIPTS", f"superscripts {sorted(ranks)} are not 1..{max(ranks)}")
    mixed = [i for i, sides in ranks.items() if len(sides) > 1]
    if mixed:
        raise CirquentError("BAD_SUPERSCRIPTS", f"superscript {min(mixed)} is used on both ∃/∨ and ∀/∧")


def to_nnf(f: Formula, negate: bool = False) -> Formula:
    """Push negations to the atoms, dualizing every operator passed.

    Slash sets, superscripts and occurrence ids are kept.
    """
    if isinstance(f, Not):
        return to_nnf(f.body, not negate)
    if isinstance(f, Atom):
        return replace(f, negated=f.negated != negate)
    kind = f.kind.dual if negate else f.kind
    if isinstance(f, Conn):
        return Conn(kind, tuple(to_nnf(p, negate) for p in f.parts), f.rank, f.occ)
    return Quant(kind, f.var, to_nnf(f.body, negate), f.slash, f.rank, f.occ)


def show(f: Formula) -> str:
    """Render back to the text syntax."""
    if isinstance(f, Atom):
        args = f"({','.join(str(a) for a in f.args)})" if f.args else ""
        return ("~" if f.negated else "") + f.name + args
    if isinstance(f, Not):
        return "~" + _wrap(f.body)
    sup = f"^{f.rank}" if f.rank is not None else ""
    if isinstance(f, Conn):
        return f" {_INFIX_TEXT[f.kind]}{sup} ".join(_wrap(p) for p in f.parts)
    slash = "/" + ",".join(f.slash) if f.slash else ""
    return f"{_QUANT_TEXT[f.kind]}{sup} {f.var}{slash} {_wrap(f.body)}"


def _wrap(f: Formula) -> str:
    return f"({show(f)})" if isinstance(f, Conn) else show(f)


# ---- expansion --------------------------------------------------------------

@dataclass(frozen=True)
class Origin:
    """Source occurrence of a gate and the edges leading to it from the root.

    Each path step is (edge order number, variable the edge instantiates
    or None).
    """

    occ: int
    path: tuple


@dataclass(frozen=True)
class TGate:
    kind: GateKind
    parts: tuple
    rank: int | None
    slash: frozenset
    origin: Origin


def atom_name(name: str, args, universe: int) -> str:
    if not args:
        return name
    if universe >= 10:
        return name + "_" + "_".join(str(a) for a in args)
    return name + "".join(str(a) for a in args)


def expand(f: Formula, universe: int):
    """Replace quantifiers by ``universe``-ary connectives.

    Returns a tree of :class:`TGate` and :class:`~cirquent.model.Literal`.
    """
    if universe < 1:
        raise CirquentError("UNIVERSE_TOO_SMALL", "the universe needs at least one element")
    f = to_nnf(f)

    def go(f, env: dict, enclosing: tuple, path: tuple):
        if isinstance(f, Atom):
            vals = []
            for a in f.args:
                if isinstance(a, int):
                    if not 1 <= a <= universe:
                        raise CirquentError("UNIVERSE_TOO_SMALL", f"constant {a} is outside 1..{universe}")
                    vals.append(a)
                elif a in env:
                    vals.append(env[a])
                else:
                    raise CirquentError("UNBOUND_VARIABLE", f"variable {a} in {f.name} is not bound")
            return Literal(atom_name(f.name, vals, universe), f.negated)
        unknown = [v for v in getattr(f, "slash", ()) if v not in enclosing]
        if unknown:
            raise CirquentError("UNKNOWN_SLASH_VARIABLE",
                                f"{', '.join(unknown)} not bound by a quantifier enclosing {f.var}")
        origin = Origin(f.occ, path)
        if isinstance(f, Conn):
            parts = tuple(go(p, env, enclosing, path + ((i, None),)) for i, p in enumerate(f.parts, 1))
            return TGate(f.kind, parts, f.rank, frozenset(), origin)
        inner = enclosing + (f.var,)
        parts = tuple(go(f.body, {**env, f.var: v}, inner, path + ((v, f.var),))
                      for v in range(1, universe + 1))
        return TGate(f.kind, parts, f.rank, frozenset(f.slash), origin)

    return go(f, {}, (), ())


# ---- compilation --------------------------------------------------------------

MODES = ("col", "if_choice", "if_parallel")


def _default_rank_map(f: Formula) -> dict[int, int]:
    """Occurrence -> rank for a formula without superscripts.

    Computed on the formula with its leading negations removed, so that
    ``~F`` keeps the ranks ``F`` would get.
    """
    core = to_nnf(_strip_negations(f)[0])
    occs = [n for n in _walk(core) if isinstance(n, (Conn, Quant)) and n.kind.parallel]
    has_or = any(n.kind.disjunctive for n in occs)
    return {n.occ: (1 if n.kind.disjunctive or not has_or else 2) for n in occs}


def compile_formula(f: Formula | str, universe: int = 2, mode: str = "col", *, with_origins: bool = False):
    """Turn a formula into a cirquent.

    ``col``: the parse tree, singleton clusters, default ranks.
    ``if_choice``: ∨ becomes ⊔ and ⊔-gates from one occurrence share a
    cluster when their paths agree off the slashed variables.
    ``if_parallel``: ∧/∨ kept, every gate clustered by the same rule,
    ranks from superscripts (or ∨ below ∧ when there are none).
    """
    mode = mode.replace("-", "_")
    if mode not in MODES:
        raise CirquentError("BAD_MODE", f"mode must be one of {', '.join(MODES)}")
    if isinstance(f, str):
        f = parse_formula(f)
    if mode == "col" and any(isinstance(n, Quant) and n.slash for n in _walk(f)):
        raise CirquentError("SLASH_IN_COL_MODE", "slashed quantifiers need an IF mode")
    tree = expand(f, universe)
    rank_map = None
    if mode == "if_parallel" and not any(getattr(n, "rank", None) for n in _walk(f)):
        rank_map = _default_rank_map(f)

    nodes, edges, gates = [], [], []
    next_id = [0]

    def number(t) -> int:
        next_id[0] += 1
        me = next_id[0]
        if isinstance(t, Literal):
            nodes.append({"id": me, "label": str(t)})
            return me
        kind = t.kind
        if mode == "if_choice" and kind is K.OR:
            kind = K.COR
        nodes.append({"id": me, "label": kind.value})
        gates.append((me, kind, t))
        for part in t.parts:
            edges.append([me, number(part)])
        return me

    number(tree)

    def key(t: TGate):
        return (t.origin.occ, tuple("*" if var in t.slash else order for order, var in t.origin.path))

    groups: dict = {}
    for gid, kind, t in gates:
        clustered = mode == "if_parallel" or (mode == "if_choice" and kind is K.COR)
        groups.setdefault(key(t) if clustered else ("single", gid), []).append(gid)
    clusters = [{"id": min(m), "members": sorted(m)} for m in groups.values()]

    kinds = {gid: kind for gid, kind, _ in gates}
    if mode == "if_parallel":
        by_rank: dict[int, list[int]] = {}
        tags = {gid: t for gid, _, t in gates}
        for cl in clusters:
            kind = kinds[cl["id"]]
            if not kind.parallel:
                continue
            t = tags[cl["id"]]
            r = rank_map[t.origin.occ] if rank_map is not None else t.rank
            by_rank.setdefault(r, []).append(cl["id"])
        ranks = [sorted(by_rank[r]) for r in sorted(by_rank)]
    else:
        ranks = default_ranks({cl["id"]: kinds[cl["id"]] for cl in clusters if kinds[cl["id"]].parallel})
    c = validate({"nodes": nodes, "edges": edges,
                  "clusters": sorted(clusters, key=lambda cl: cl["id"]), "ranks": ranks})
    if with_origins:
        return c, {gid: t.origin for gid, _, t in gates}
    return c


def weak_neg_cirquent(c: Cirquent) -> Cirquent:
    """Negate every port literal and dualize every gate; keep clusters and ranks."""
    doc = c.to_doc()
    for n in doc["nodes"]:
        payload = c.label(n["id"])
        n["label"] = str(payload.negate()) if c.is_port(n["id"]) else payload.dual.value
    return validate(doc)


def strong_neg_cirquent(c: Cirquent) -> Cirquent:
    """Weak negation followed by exchanging the two ranks."""
    if len(c.ranks) > 2:
        raise CirquentError("TOO_MANY_RANKS_FOR_SWAP", f"{len(c.ranks)} ranks; a swap needs at most two")
    doc = weak_neg_cirquent(c).to_doc()
    doc["ranks"] = doc["ranks"][::-1]
    return validate(doc)
