"""Explicit finite games, nice games, negation, staticness, interpretations."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property

from .errors import CirquentError
from .model import Literal
from .runs import BOT, TOP, LabMove, Player, is_delay, negate_run, parse_run, emit_run


class ExplicitGame:
    """A game given by its finite, prefix-closed set of legal runs.

    ``won`` assigns a winner to every legal run.  Illegal runs are lost
    by whoever made the first illegal move.
    """

    def __init__(self, legal, won, *, nice=None):
        self.legal = frozenset(tuple(r) for r in legal) | {()}
        self.won = {tuple(r): p for r, p in won.items()}
        for run in self.legal:
            if run[:-1] not in self.legal:
                raise CirquentError("BAD_GAME", f"legal runs not prefix-closed at {emit_run(run)!r}")
            if run not in self.won:
                raise CirquentError("BAD_GAME", f"no winner for legal run {emit_run(run)!r}")
        self.nice = nice  # (alphabet, table) when built by nice_game

    def __eq__(self, other):
        if not isinstance(other, ExplicitGame):
            return NotImplemented
        return self.legal == other.legal and all(self.won[r] == other.won[r] for r in self.legal)

    def __hash__(self):
        return hash(self.legal)

    def __repr__(self):
        return f"ExplicitGame({len(self.legal)} legal runs)"

    def is_legal(self, run) -> bool:
        return tuple(run) in self.legal

    def offence(self, run):
        """(index, player) of the first illegal labmove, or None."""
        run = tuple(run)
        for k in range(1, len(run) + 1):
            if run[:k] not in self.legal:
                return k, run[k - 1].player
        return None

    def winner(self, run) -> Player:
        run = tuple(run)
        if run in self.legal:
            return self.won[run]
        return self.offence(run)[1].opp

    @cached_property
    def _next(self) -> dict:
        out: dict[tuple, list[LabMove]] = {}
        for run in self.legal:
            if run:
                out.setdefault(run[:-1], []).append(run[-1])
        return {r: sorted(ms, key=lambda lm: (lm.player.value, lm.move)) for r, ms in out.items()}

    def next_moves(self, run, player: Player) -> list[str]:
        return [lm.move for lm in self._next.get(tuple(run), ()) if lm.player is player]

    @cached_property
    def alphabet(self) -> tuple[str, ...]:
        return tuple(sorted({lm.move for run in self.legal for lm in run}))


def elementary_game(winner: Player) -> ExplicitGame:
    return ExplicitGame([()], {(): winner})


TRUE_GAME = elementary_game(TOP)
FALSE_GAME = elementary_game(BOT)


def nice_game(alphabet, table=None) -> ExplicitGame:
    """The nice game over ``alphabet``.

    ``table`` maps ``(m, n)`` to the winner of the run in which ⊤ moved
    ``m`` and ⊥ moved ``n`` (in either order); missing pairs go to ⊥.
    """
    alphabet = tuple(sorted(set(str(a) for a in alphabet)))
    table = {(str(m), str(n)): p for (m, n), p in (table or {}).items()}
    legal = [()]
    won = {(): TOP}
    for m in alphabet:
        legal.append((LabMove(TOP, m),))
        won[(LabMove(TOP, m),)] = TOP
        legal.append((LabMove(BOT, m),))
        won[(LabMove(BOT, m),)] = BOT
    for m, n in itertools.product(alphabet, repeat=2):
        p = table.get((m, n), BOT)
        for run in ((LabMove(TOP, m), LabMove(BOT, n)), (LabMove(BOT, n), LabMove(TOP, m))):
            legal.append(run)
            won[run] = p
    full = {(m, n): table.get((m, n), BOT) for m, n in itertools.product(alphabet, repeat=2)}
    return ExplicitGame(legal, won, nice=(alphabet, full))


def negate_game(g: ExplicitGame) -> ExplicitGame:
    """Swap the roles of the two players."""
    legal = [negate_run(r) for r in g.legal]
    won = {negate_run(r): p.opp for r, p in g.won.items()}
    return ExplicitGame(legal, won)


def _interleavings(a, b):
    n = len(a) + len(b)
    for slots in itertools.combinations(range(n), len(a)):
        out, ia, ib = [], 0, 0
        chosen = set(slots)
        for i in range(n):
            if i in chosen:
                out.append(a[ia])
                ia += 1
            else:
                out.append(b[ib])
                ib += 1
        yield tuple(out)


def delays(run, player: Player):
    """Every ``player``-delay of ``run``."""
    mine = [lm for lm in run if lm.player is player]
    theirs = [lm for lm in run if lm.player is not player]
    for cand in _interleavings(mine, theirs):
        if is_delay(cand, run, player):
            yield cand


def is_static(g: ExplicitGame) -> bool:
    """Check both staticness conditions over legal runs and their
    one-step illegal extensions, for both players."""
    moves = list(g.alphabet) + ["♠"]
    runs = set(g.legal)
    for run in g.legal:
        for p in (TOP, BOT):
            for m in moves:
                runs.add(run + (LabMove(p, m),))
    for gamma in runs:
        off = g.offence(gamma)
        winner = g.winner(gamma)
        for p in (TOP, BOT):
            p_legal = off is None or off[1] is not p
            for ups in delays(gamma, p):
                if p_legal:
                    o2 = g.offence(ups)
                    if o2 is not None and o2[1] is p:
                        return False
                if winner is p and g.winner(ups) is not p:
                    return False
    return True


@dataclass
class Interpretation:
    """Elementary atoms to truth values, general atoms to games.

    Unlisted elementary atoms are false; unlisted general atoms get the
    nice game over the empty alphabet.
    """

    elementary: dict[str, bool] = field(default_factory=dict)
    general: dict[str, ExplicitGame] = field(default_factory=dict)

    def value(self, atom: str) -> bool:
        return bool(self.elementary.get(atom, False))

    def game(self, atom: str) -> ExplicitGame:
        return self.general.get(atom) or _EMPTY_NICE

    @classmethod
    def true_atoms(cls, atoms) -> Interpretation:
        return cls({a: True for a in atoms})

    def to_doc(self) -> dict:
        general = {}
        for atom, g in sorted(self.general.items()):
            if g.nice is None:
                raise CirquentError("UNSUPPORTED", f"game of {atom} is not a nice game")
            alphabet, table = g.nice
            general[atom] = {"alphabet": list(alphabet),
                             "win": {f"{m}|{n}": p.value for (m, n), p in sorted(table.items())}}
        return {"elementary": dict(sorted(self.elementary.items())), "general": general}


_EMPTY_NICE = nice_game(())


def literal_game(interp: Interpretation, lit: Literal) -> ExplicitGame:
    if lit.general:
        g = interp.game(lit.atom)
        return _negated(g) if lit.negated else g
    value = interp.value(lit.atom) != lit.negated
    return TRUE_GAME if value else FALSE_GAME


_NEG_CACHE: dict[int, tuple[ExplicitGame, ExplicitGame]] = {}


def _negated(g: ExplicitGame) -> ExplicitGame:
    hit = _NEG_CACHE.get(id(g))
    if hit is None or hit[0] is not g:
        hit = (g, negate_game(g))
        _NEG_CACHE[id(g)] = hit
    return hit[1]


def interpretation_from_doc(doc) -> Interpretation:
    if not isinstance(doc, dict):
        raise CirquentError("PARSE_ERROR", "interpretation must be a JSON object")
    elementary = {}
    for atom, v in (doc.get("elementary") or {}).items():
        if not isinstance(v, bool):
            raise CirquentError("PARSE_ERROR", f"elementary atom {atom}: expected true/false")
        elementary[atom] = v
    general = {}
    for atom, spec in (doc.get("general") or {}).items():
        try:
            alphabet = [str(a) for a in spec.get("alphabet", [])]
            table = {}
            for key, p in (spec.get("win") or {}).items():
                m, n = key.split("|")
                table[(m, n)] = Player(p)
        except (AttributeError, ValueError) as exc:
            raise CirquentError("PARSE_ERROR", f"general atom {atom}: {exc}") from None
        unknown = {x for pair in table for x in pair} - set(alphabet)
        if unknown:
            raise CirquentError("PARSE_ERROR", f"general atom {atom}: moves {sorted(unknown)} not in alphabet")
        general[atom] = nice_game(alphabet, table)
    return Interpretation(elementary, general)


def load_interpretation(text: str) -> Interpretation:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CirquentError("PARSE_ERROR", f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return interpretation_from_doc(doc)


def game_from_runs(legal_text, won_text) -> ExplicitGame:
    """Build a game from run strings, e.g. for small hand-made tables."""
    legal = [parse_run(t) for t in legal_text]
    won = {parse_run(t): Player(p) for t, p in won_text.items()}
    return ExplicitGame(legal, won)
