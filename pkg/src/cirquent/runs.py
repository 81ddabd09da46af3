"""Runs, labmoves and their legality.

A move is a plain string, as in the games it is played in.  Moves of a
cirquent's game come in three shapes, recognised relative to a cirquent
by :func:`classify`:

* ``c.i``   selection of the i-th edge in cluster ``c``
* ``a.β``   move ``β`` inside the game of general port ``a``
* ``(a,b)`` allocation of port ``a`` to port ``b`` (resource semantics)
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from enum import Enum
from typing import NamedTuple

from .errors import CirquentError
from .model import Cirquent


class Player(Enum):
    TOP = "T"
    BOT = "B"

    @property
    def opp(self) -> Player:
        return Player.BOT if self is Player.TOP else Player.TOP

    @property
    def symbol(self) -> str:
        return "⊤" if self is Player.TOP else "⊥"

    def __str__(self) -> str:
        return self.value


TOP, BOT = Player.TOP, Player.BOT


class LabMove(NamedTuple):
    player: Player
    move: str

    def __str__(self) -> str:
        return f"{self.player.value} {self.move}"


Run = tuple  # tuple[LabMove, ...]


def T(move) -> LabMove:
    return LabMove(TOP, str(move))


def B(move) -> LabMove:
    return LabMove(BOT, str(move))


@dataclass(frozen=True)
class Select:
    cluster: int
    index: int


@dataclass(frozen=True)
class PortMove:
    port: int
    suffix: str


@dataclass(frozen=True)
class Allocation:
    a: int
    b: int

    def __str__(self) -> str:
        return f"({self.a},{self.b})"


_DOT_RE = re.compile(r"([1-9][0-9]*)\.(\S+)\Z")
_ALLOC_RE = re.compile(r"\(([1-9][0-9]*),([1-9][0-9]*)\)\Z")
_INDEX_RE = re.compile(r"[1-9][0-9]*\Z")


@lru_cache(maxsize=1 << 16)
def split_move(move: str):
    """Syntactic shape of a move: ('dot', n, rest), ('alloc', a, b) or None."""
    m = _DOT_RE.match(move)
    if m:
        return ("dot", int(m.group(1)), m.group(2))
    m = _ALLOC_RE.match(move)
    if m:
        return ("alloc", int(m.group(1)), int(m.group(2)))
    return None


def classify(c: Cirquent, move: str):
    """Read ``move`` against ``c`` as a Select, PortMove or Allocation.

    Returns None for strings that fit none of the shapes.  Selections
    are only recognised at cluster ids; node ids are unique, so
    ``7.2`` is never both a selection and a port move.
    """
    shape = split_move(move)
    if shape is None:
        return None
    if shape[0] == "alloc":
        return Allocation(shape[1], shape[2])
    _, n, rest = shape
    if c.is_port(n):
        return PortMove(n, rest)
    if n in c.clusters and _INDEX_RE.match(rest):
        return Select(n, int(rest))
    return None


def parse_run(text: str) -> Run:
    """Parse ``T 7.2; B 5.1; T (3,9)`` into a run."""
    if not text.strip():
        return ()
    out = []
    for k, chunk in enumerate(text.split(";"), 1):
        parts = chunk.split()
        if len(parts) != 2 or parts[0] not in ("T", "B"):
            raise CirquentError("PARSE_ERROR", f"labmove {k}: expected 'T move' or 'B move', got {chunk.strip()!r}")
        out.append(LabMove(Player(parts[0]), parts[1]))
    return tuple(out)


def emit_run(run) -> str:
    return "; ".join(str(lm) for lm in run)


def negate_run(run) -> Run:
    return tuple(LabMove(lm.player.opp, lm.move) for lm in run)


def project(run, prefix: str) -> Run:
    """Keep labmoves whose move starts with ``prefix``; strip the prefix."""
    n = len(prefix)
    return tuple(LabMove(lm.player, lm.move[n:]) for lm in run if lm.move.startswith(prefix))


def port_run(run, port: int) -> Run:
    return project(run, f"{port}.")


def is_delay(upsilon, gamma, player: Player) -> bool:
    """True iff ``upsilon`` is a ``player``-delay of ``gamma``."""
    for who in (TOP, BOT):
        if [lm.move for lm in upsilon if lm.player is who] != [lm.move for lm in gamma if lm.player is who]:
            return False
    # for every n-th player move, how many opponent moves precede it
    def before(run):
        counts, seen = [], 0
        for lm in run:
            if lm.player is player:
                counts.append(seen)
            else:
                seen += 1
        return counts
    # "n-th player move later than k-th opponent move" must be preserved,
    # i.e. the number of preceding opponent moves can only grow
    return all(u >= g for u, g in zip(before(upsilon), before(gamma)))


@dataclass(frozen=True)
class Verdict:
    """Outcome of a legality check: ``offender`` is None for legal runs."""

    legal: bool
    index: int | None = None
    offender: Player | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.legal


LEGAL = Verdict(True)


class _SelectionTracker:
    """Per-cluster bookkeeping shared by both legality regimes."""

    def __init__(self, c: Cirquent):
        self.c = c
        self.count: dict[int, int] = {}
        self.last: dict[int, int] = {}

    def check(self, player: Player, sel: Select) -> str:
        c = self.c
        if sel.cluster not in c.clusters:
            return f"{sel.cluster} is not a cluster id"
        kind = c.cluster_kind(sel.cluster)
        if kind.parallel:
            return f"cluster {sel.cluster} is parallel"
        owner = TOP if kind.disjunctive else BOT
        if player is not owner:
            return f"cluster {sel.cluster} belongs to {owner.symbol}"
        if not 1 <= sel.index <= c.outdegree(sel.cluster):
            return f"index {sel.index} exceeds outdegree of cluster {sel.cluster}"
        if kind.choice and self.count.get(sel.cluster):
            return f"choice cluster {sel.cluster} already resolved"
        if kind.sequential and sel.index <= self.last.get(sel.cluster, 0):
            return f"sequential cluster {sel.cluster} needs an index above {self.last[sel.cluster]}"
        return ""

    def apply(self, sel: Select) -> None:
        self.count[sel.cluster] = self.count.get(sel.cluster, 0) + 1
        self.last[sel.cluster] = sel.index


def legal_position_col(c: Cirquent, interp, run) -> Verdict:
    """Legality of ``run`` in the game C* under ``interp``."""
    from .games import literal_game

    tracker = _SelectionTracker(c)
    games = {}
    port_runs: dict[int, list[LabMove]] = {}
    for k, lm in enumerate(run, 1):
        what = classify(c, lm.move)
        reason = ""
        if isinstance(what, Select):
            reason = tracker.check(lm.player, what)
            if not reason:
                tracker.apply(what)
        elif isinstance(what, PortMove):
            a = what.port
            if a not in games:
                games[a] = literal_game(interp, c.label(a))
            pr = port_runs.setdefault(a, [])
            pr.append(LabMove(lm.player, what.suffix))
            if not games[a].is_legal(tuple(pr)):
                reason = f"illegal move {what.suffix!r} in the game of port {a}"
        else:
            reason = f"{lm.move!r} is not a move of this game"
        if reason:
            return Verdict(False, k, lm.player, reason)
    return LEGAL


def legal_position_ars(c: Cirquent, run) -> Verdict:
    """Legality of ``run`` in the resource game of ``c``."""
    tracker = _SelectionTracker(c)
    used: set[int] = set()
    for k, lm in enumerate(run, 1):
        what = classify(c, lm.move)
        reason = ""
        if isinstance(what, Select):
            reason = tracker.check(lm.player, what)
            if not reason:
                tracker.apply(what)
        elif isinstance(what, Allocation):
            reason = allocation_problem(c, what, used, lm.player)
            if not reason:
                used.update((what.a, what.b))
        else:
            reason = f"{lm.move!r} is not a move of this game"
        if reason:
            return Verdict(False, k, lm.player, reason)
    return LEGAL


def allocation_problem(c: Cirquent, al: Allocation, used, player: Player = TOP) -> str:
    if player is not TOP:
        return "only ⊤ allocates"
    a, b = al.a, al.b
    if a not in c.general_ports or b not in c.general_ports:
        return f"({a},{b}) does not pair two general ports"
    la, lb = c.label(a), c.label(b)
    if la.negated or not lb.negated or la.atom != lb.atom:
        return f"({a},{b}) must pair a P-port with a ~P-port"
    if a in used or b in used:
        return f"({a},{b}) reuses an allocated port"
    return ""


def resolution_state(c: Cirquent, run) -> dict[int, int | None]:
    """Last selected index per selectional cluster (None when unresolved).

    Selections are checked for legality; port moves and allocations are
    skipped since their legality depends on the regime.
    """
    tracker = _SelectionTracker(c)
    state: dict[int, int | None] = dict.fromkeys(c.selectional_clusters)
    for k, lm in enumerate(run, 1):
        what = classify(c, lm.move)
        if isinstance(what, Select):
            reason = tracker.check(lm.player, what)
            if reason:
                require_legal(Verdict(False, k, lm.player, reason))
            tracker.apply(what)
            state[what.cluster] = what.index
        elif what is None:
            require_legal(Verdict(False, k, lm.player, f"{lm.move!r} is not a move of this game"))
    return state


def induced_arrangement(run) -> frozenset[tuple[int, int]]:
    out = set()
    for lm in run:
        shape = split_move(lm.move)
        if lm.player is TOP and shape and shape[0] == "alloc":
            out.add((shape[1], shape[2]))
    return frozenset(out)


def require_legal(verdict: Verdict) -> None:
    if not verdict:
        raise CirquentError("ILLEGAL_RUN",
                            f"labmove {verdict.index} by {verdict.offender.symbol}: {verdict.reason}")
