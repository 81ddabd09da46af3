"""Deciding who wins Ĉ or C*, with strategy extraction.

The solver plays rounds: the environment moves or passes, then the
machine moves or passes; the play ends once both pass in one round.
Positions are compressed to configurations (resolvents, toggle counts,
arrangement, port runs), which is all the winning condition looks at.
"""

from __future__ import annotations

import itertools
import sys
from dataclasses import dataclass, field

from .ars import accomplished_state
from .col import wn
from .errors import CirquentError
from .games import Interpretation, literal_game
from .model import Cirquent
from .runs import (BOT, TOP, Allocation, LabMove, Player, PortMove, Select, classify, legal_position_ars,
                   legal_position_col)
from .strategies import Strategy
from .truth import engine

def default_budget(c: Cirquent) -> int:
    return 2 * len(c.selectional_clusters) + 1


class _Arena:
    """Configurations of one cirquent game and the moves between them."""

    def __init__(self, c: Cirquent, budget: int):
        self.c = c
        self.budget = budget
        self.sel = c.selectional_clusters
        self.slot = {cid: i for i, cid in enumerate(self.sel)}
        self.kind = {cid: c.cluster_kind(cid) for cid in self.sel}
        # (slot, cluster, owner, outdegree, mode) with mode c/s/t for choice, sequential, toggling
        self.spec = [(i, cid, TOP if k.disjunctive else BOT, c.outdegree(cid),
                      "c" if k.choice else "s" if k.sequential else "t")
                     for i, (cid, k) in enumerate(self.kind.items())]

    def initial(self):
        zeros = (0,) * len(self.sel)
        return (zeros, zeros, self.initial_extra())

    def resolution(self, cfg) -> dict:
        return {cid: (cfg[0][i] or None) for i, cid in enumerate(self.sel)}

    def selections(self, cfg, player: Player):
        res, counts, extra = cfg
        for i, cid, owner, n, mode in self.spec:
            if owner is not player:
                continue
            if mode == "c":
                options = range(1, n + 1) if not res[i] else ()
            elif mode == "s":
                options = range(res[i] + 1, n + 1)
            else:
                options = [j for j in range(1, n + 1) if j != res[i]] if counts[i] < self.budget else ()
            for j in options:
                yield f"{cid}.{j}", self._select(cfg, i, j)

    def _select(self, cfg, i, j):
        res, counts, extra = cfg
        res = res[:i] + (j,) + res[i + 1:]
        if self.kind[self.sel[i]].toggling:
            counts = counts[:i] + (min(counts[i] + 1, self.budget),) + counts[i + 1:]
        return (res, counts, extra)

    def moves(self, cfg, player: Player):
        yield from self.selections(cfg, player)
        yield from self.extra_moves(cfg, player)

    def apply(self, cfg, lm: LabMove):
        """Successor configuration; None if the move is not available."""
        what = classify(self.c, lm.move)
        if isinstance(what, Select) and what.cluster in self.slot:
            i = self.slot[what.cluster]
            kind = self.kind[what.cluster]
            owner = TOP if kind.disjunctive else BOT
            res = cfg[0][i]
            if lm.player is not owner or not 1 <= what.index <= self.c.outdegree(what.cluster):
                return None
            if (kind.choice and res) or (kind.sequential and what.index <= res):
                return None
            return self._select(cfg, i, what.index)
        return self.apply_extra(cfg, lm, what)


class _ArsArena(_Arena):
    def initial_extra(self):
        return frozenset()

    def extra_moves(self, cfg, player):
        if player is not TOP:
            return
        c, arr = self.c, cfg[2]
        used = {p for pair in arr for p in pair}
        free = [a for a in c.general_ports if a not in used]
        for a in free:
            la = c.label(a)
            if la.negated:
                continue
            for b in free:
                lb = c.label(b)
                if lb.negated and lb.atom == la.atom:
                    yield f"({a},{b})", (cfg[0], cfg[1], arr | {(a, b)})

    def apply_extra(self, cfg, lm, what):
        if not isinstance(what, Allocation) or lm.player is not TOP:
            return None
        for move, nxt in self.extra_moves(cfg, TOP):
            if move == lm.move:
                return nxt
        return None

    def terminal(self, cfg) -> bool:
        return accomplished_state(self.c, self.resolution(cfg), cfg[2])


class _ColArena(_Arena):
    def __init__(self, c, budget, interp: Interpretation):
        super().__init__(c, budget)
        self.interp = interp
        self.games = {a: literal_game(interp, c.label(a)) for a in c.ports}
        self.gports = c.general_ports

    def initial_extra(self):
        return tuple(() for _ in self.gports)

    def extra_moves(self, cfg, player):
        for k, a in enumerate(self.gports):
            pr = cfg[2][k]
            for m in self.games[a].next_moves(pr, player):
                runs = cfg[2][:k] + (pr + (LabMove(player, m),),) + cfg[2][k + 1:]
                yield f"{a}.{m}", (cfg[0], cfg[1], runs)

    def apply_extra(self, cfg, lm, what):
        if not isinstance(what, PortMove) or what.port not in self.gports:
            return None
        k = self.gports.index(what.port)
        pr = cfg[2][k] + (LabMove(lm.player, what.suffix),)
        if not self.games[what.port].is_legal(pr):
            return None
        return (cfg[0], cfg[1], cfg[2][:k] + (pr,) + cfg[2][k + 1:])

    def terminal(self, cfg) -> bool:
        ports = {}
        for a in self.c.ports:
            g = self.games[a]
            pr = cfg[2][self.gports.index(a)] if a in self.gports else ()
            ports[a] = int(g.winner(pr) is TOP)
        return bool(engine(self.c).truth(ports, self.resolution(cfg), 1))


class _Search:
    """Memoized values of the round model, from the machine's side."""

    def __init__(self, arena: _Arena):
        self.arena = arena
        self.env_memo: dict = {}
        self.mach_memo: dict = {}
        self.term_memo: dict = {}
        self.succ_memo: dict = {}

    def succ(self, cfg, player):
        key = (cfg, player)
        hit = self.succ_memo.get(key)
        if hit is None:
            hit = self.succ_memo[key] = list(self.arena.moves(cfg, player))
        return hit

    def terminal(self, cfg) -> bool:
        hit = self.term_memo.get(cfg)
        if hit is None:
            hit = self.term_memo[cfg] = self.arena.terminal(cfg)
        return hit

    def env(self, cfg) -> bool:
        hit = self.env_memo.get(cfg)
        if hit is None:
            hit = self.mach(cfg, True) and all(self.mach(nxt, False) for _, nxt in self.succ(cfg, BOT))
            self.env_memo[cfg] = hit
        return hit

    def mach(self, cfg, env_passed: bool) -> bool:
        key = (cfg, env_passed)
        hit = self.mach_memo.get(key)
        if hit is None:
            stay = self.terminal(cfg) if env_passed else self.env(cfg)
            hit = stay or any(self.env(nxt) for _, nxt in self.succ(cfg, TOP))
            self.mach_memo[key] = hit
        return hit

    @property
    def explored(self) -> int:
        return len(self.env_memo.keys() | {k for k, _ in self.mach_memo})


class _SolverStrategy(Strategy):
    def __init__(self, search: _Search, player: Player):
        self.search = search
        self.player = player
        self._cache: dict = {}

    def config(self, run):
        arena = self.search.arena
        cfg = arena.initial()
        for lm in run:
            cfg = arena.apply(cfg, lm)
            if cfg is None:
                return None
        return cfg

    def __call__(self, run):
        run = tuple(run)
        if run in self._cache:
            return self._cache[run]
        cfg = self.config(run)
        move = None if cfg is None else (self._machine(cfg) if self.player is TOP else self._env(cfg))
        self._cache[run] = move
        return move

    def _machine(self, cfg):
        s = self.search
        if s.terminal(cfg) and s.env(cfg):
            return None
        for move, nxt in s.succ(cfg, TOP):
            if s.env(nxt):
                return move
        return None

    def _env(self, cfg):
        s = self.search
        if not s.mach(cfg, True):
            return None
        for move, nxt in s.succ(cfg, BOT):
            if not s.mach(nxt, False):
                return move
        return None

    def __repr__(self):
        return f"SolverStrategy({self.player.value})"


@dataclass
class SolveResult:
    winner: Player
    machine: Strategy
    environment: Strategy
    explored: int
    budget: int | None = None
    notes: list = field(default_factory=list)

    @property
    def strategy(self) -> Strategy:
        return self.machine if self.winner is TOP else self.environment


def _run_search(arena) -> tuple[bool, _Search]:
    s = _Search(arena)
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 20000))
    try:
        return s.env(arena.initial()), s
    finally:
        sys.setrecursionlimit(limit)


def _solve(make_arena, c: Cirquent, toggle_budget: int | None) -> SolveResult:
    if not c.has_toggling:
        won, s = _run_search(make_arena(0))
        return SolveResult(TOP if won else BOT, _SolverStrategy(s, TOP), _SolverStrategy(s, BOT), s.explored)
    budget = default_budget(c) if toggle_budget is None else toggle_budget
    won, s = _run_search(make_arena(budget))
    won_more, _ = _run_search(make_arena(budget + 1))
    if won != won_more:
        raise CirquentError("BUDGET_EXCEEDED_UNDECIDED",
                            f"verdict changes between toggle budgets {budget} and {budget + 1}")
    return SolveResult(TOP if won else BOT, _SolverStrategy(s, TOP), _SolverStrategy(s, BOT), s.explored,
                       budget, [f"toggle budget {budget}, stable at {budget + 1}"])


def solve_ars(c: Cirquent, toggle_budget: int | None = None) -> SolveResult:
    """Can the machine accomplish ``c``?  Results are cached per cirquent."""
    cache = engine(c).tables
    key = ("solve_ars", toggle_budget)
    if key not in cache:
        cache[key] = _solve(lambda b: _ArsArena(c, b), c, toggle_budget)
    return cache[key]


def solve_col(c: Cirquent, interp: Interpretation, toggle_budget: int | None = None) -> SolveResult:
    """Can the machine win C* under ``interp``?"""
    return _solve(lambda b: _ColArena(c, b, interp), c, toggle_budget)


def _interpretations(atoms):
    for row in itertools.product((False, True), repeat=len(atoms)):
        yield Interpretation(dict(zip(atoms, row)))


def weak_validity(c: Cirquent) -> bool:
    """True iff the machine wins C* under every interpretation."""
    if c.general_ports:
        raise CirquentError("GENERAL_PORTS_UNSUPPORTED", "weak validity is decided for elementary cirquents only")
    return all(solve_col(c, i).winner is TOP for i in _interpretations(c.elementary_atoms))


def legal_runs(c: Cirquent) -> set:
    """All legal runs of an elementary, toggling-free cirquent."""
    if c.general_ports or c.has_toggling:
        raise CirquentError("UNSUPPORTED", "needs an elementary, toggling-free cirquent")
    interp = Interpretation()
    cands = [LabMove(p, f"{cid}.{j}") for cid in c.selectional_clusters
             for j in range(1, c.outdegree(cid) + 1) for p in (TOP, BOT)]
    out, stack = set(), [()]
    while stack:
        run = stack.pop()
        out.add(run)
        for lm in cands:
            nxt = run + (lm,)
            if nxt not in out and legal_position_col(c, interp, nxt):
                stack.append(nxt)
    return out


def extensional_identity(c1: Cirquent, c2: Cirquent) -> bool:
    """Same legal runs, and the same winner of each under every interpretation."""
    runs = legal_runs(c1)
    if runs != legal_runs(c2):
        return False
    atoms = sorted(set(c1.elementary_atoms) | set(c2.elementary_atoms))
    return all(wn(c1, i, r) is wn(c2, i, r) for i in _interpretations(atoms) for r in runs)


# ---- brute force over histories ------------------------------------------------

def candidate_moves(c: Cirquent, interp: Interpretation | None = None):
    """Every move string that could possibly be legal, for either player."""
    out = [f"{cid}.{j}" for cid in sorted(c.clusters) for j in range(1, c.outdegree(cid) + 1)]
    ports = c.general_ports
    out += [f"({a},{b})" for a in ports for b in ports if a != b]
    if interp is not None:
        for a in ports:
            out += [f"{a}.{m}" for m in literal_game(interp, c.label(a)).alphabet]
    return out


def brute_force_oracle(c: Cirquent, regime: str = "ars", interp: Interpretation | None = None,
                       max_len: int = 8) -> Player:
    """Winner by exhaustive search over histories up to ``max_len`` moves.

    ``W(h) = (for every ⊥ move e: W(h+e)) and (h is won or some ⊤ move m has W(h+m))``,
    with ``W(h) = h is won`` at the length bound.
    """
    from .ars import wn_ars

    if regime == "col" and interp is None:
        raise CirquentError("USAGE", "the col regime needs an interpretation")
    cands = candidate_moves(c, interp if regime == "col" else None)
    order_free = not c.has_toggling

    def legal(run):
        return legal_position_ars(c, run) if regime == "ars" else legal_position_col(c, interp, run)

    def won(run):
        return (wn_ars(c, run) if regime == "ars" else wn(c, interp, run)) is TOP

    def key(run):
        if not order_free:
            return run
        if regime == "ars":
            return frozenset(run)
        # port runs keep their order, the rest does not matter
        ports = tuple(tuple(lm for lm in run if lm.move.startswith(f"{a}.")) for a in c.general_ports)
        return frozenset(lm for lm in run if not isinstance(classify(c, lm.move), PortMove)), ports

    # in the resource game without toggling a move that is illegal once
    # stays illegal, so children only need the moves legal at the parent
    shrink = order_free and regime == "ars"
    memo: dict = {}

    def W(run, options) -> bool:
        k = key(run)
        if k in memo:
            return memo[k]
        if len(run) >= max_len:
            val = won(run)
        else:
            ok = [lm for lm in options if legal(run + (lm,))]
            passed = ok if shrink else options
            val = (all(W(run + (lm,), passed) for lm in ok if lm.player is BOT)
                   and (won(run) or any(W(run + (lm,), passed) for lm in ok if lm.player is TOP)))
        memo[k] = val
        return val

    return TOP if W((), [LabMove(p, m) for p in (BOT, TOP) for m in cands]) else BOT
