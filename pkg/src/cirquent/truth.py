"""Rank-quantified metatruth over many situations at once.

Truth values are Python ints used as bitsets: bit k is the value in
situation k.  Gates become ``&``/``|``, and quantifying over the
metaselections of a rank becomes an OR (disjunctive rank) or AND
(conjunctive rank) of the masks obtained for each metaselection, which
is exactly a per-situation quantifier.

Two shortcuts keep enumeration small:

* Only metaselections that are total on clusters with children are
  tried.  Leaving a cluster undefined makes its gates false (∃ side) or
  true (∀ side), which never helps the quantifier that chose it.
* Ranks made only of singleton clusters at the end of the order are
  evaluated classically: a lone ∨-gate picks its best child, a lone
  ∧-gate its worst, and by monotonicity all gates can do so at once.
"""

from __future__ import annotations

import itertools
from functools import cached_property, lru_cache

from .model import Cirquent


class Engine:
    def __init__(self, c: Cirquent):
        self.c = c
        self.tables: dict = {}  # scratch space for callers, keyed by their own inputs

    @cached_property
    def order(self) -> tuple[int, ...]:
        """Gate ids, children before parents."""
        c, seen, out = self.c, set(), []
        stack = [(c.root, False)]
        while stack:
            n, done = stack.pop()
            if done:
                out.append(n)
                continue
            if n in seen:
                continue
            seen.add(n)
            stack.append((n, True))
            for ch in reversed(c.children[n]):
                if ch not in seen:
                    stack.append((ch, False))
        return tuple(n for n in out if not c.is_port(n))

    @cached_property
    def split(self) -> int:
        """Index of the first rank of the classical (all-singleton) suffix."""
        k = len(self.c.ranks)
        while k > 0 and all(len(self.c.clusters[cid]) == 1 for cid in self.c.ranks[k - 1]):
            k -= 1
        return k

    @cached_property
    def _choices(self) -> list[list[dict[int, int | None]]]:
        c = self.c
        out = []
        for rank in c.ranks[: self.split]:
            axes = [[None] if c.outdegree(cid) == 0 else range(1, c.outdegree(cid) + 1) for cid in rank]
            out.append([dict(zip(rank, pick)) for pick in itertools.product(*axes)])
        return out

    def evaluate(self, ports: dict[int, int], sel: dict[int, int | None], par: dict[int, int | None],
                 full: int) -> int:
        """Value mask of the root.

        ``sel`` gives resolvents of selectional clusters, ``par`` the
        metaselection of parallel clusters; parallel clusters missing from
        ``par`` are evaluated classically.
        """
        c = self.c
        val = dict(ports)
        cluster_of, nodes, children = c.cluster_of, c.nodes, c.children
        for g in self.order:
            kind = nodes[g].payload
            kids = children[g]
            cid = cluster_of[g]
            if kind.parallel and cid not in par:
                if kind.disjunctive:
                    v = 0
                    for ch in kids:
                        v |= val[ch]
                else:
                    v = full
                    for ch in kids:
                        v &= val[ch]
            else:
                pick = par.get(cid) if kind.parallel else sel.get(cid)
                if pick is None:
                    v = 0 if kind.disjunctive else full
                else:
                    v = val[kids[pick - 1]]
            val[g] = v
        return val[c.root]

    def truth(self, ports: dict[int, int], sel: dict[int, int | None], full: int) -> int:
        """Mask of situations in which Q1 f1 ... Qk fk makes the root metatrue."""
        c = self.c
        choices = self._choices

        def go(i: int, par: dict) -> int:
            if i == len(choices):
                return self.evaluate(ports, sel, par, full)
            existential = c.cluster_kind(c.ranks[i][0]).disjunctive
            acc = 0 if existential else full
            for f in choices[i]:
                v = go(i + 1, {**par, **f})
                if existential:
                    acc |= v
                    if acc == full:
                        break
                else:
                    acc &= v
                    if not acc:
                        break
            return acc

        return go(0, {})


_ENGINES: dict[int, tuple[Cirquent, Engine]] = {}


def engine(c: Cirquent) -> Engine:
    hit = _ENGINES.get(id(c))
    if hit is None or hit[0] is not c:
        if len(_ENGINES) > 512:
            _ENGINES.clear()
        hit = (c, Engine(c))
        _ENGINES[id(c)] = hit
    return hit[1]


@lru_cache(maxsize=64)
def var_masks(n: int) -> tuple[int, ...]:
    """Masks over the 2**n rows of a truth table listed with T before F.

    Row k gives variable j the value T iff bit ``n-1-j`` of k is 0.
    """
    size = 1 << n
    out = []
    for j in range(n):
        s = n - 1 - j
        block = (1 << (1 << s)) - 1
        pattern, length = block, 1 << (s + 1)
        while length < size:
            pattern |= pattern << length
            length <<= 1
        out.append(pattern)
    return tuple(out)
