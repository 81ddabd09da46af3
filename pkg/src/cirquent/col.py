"""Truth and winning under game semantics (the game C* of a cirquent)."""

from __future__ import annotations

from .errors import CirquentError
from .games import Interpretation, literal_game
from .model import Cirquent
from .runs import TOP, Player, legal_position_col, port_run, require_legal, resolution_state
from .truth import engine


def port_values(c: Cirquent, interp: Interpretation, run) -> dict[int, int]:
    """1 for ports whose projected run is won by ⊤ in the port's game."""
    out = {}
    for a in c.ports:
        g = literal_game(interp, c.label(a))
        out[a] = int(g.winner(port_run(run, a)) is TOP)
    return out


def _flatten(c: Cirquent, f) -> dict[int, int | None]:
    """Accept one dict for all ranks, or a sequence of per-rank dicts."""
    if isinstance(f, dict):
        parts = [f]
    else:
        parts = list(f)
        if len(parts) != len(c.ranks):
            raise CirquentError("BAD_METASELECTION", f"expected {len(c.ranks)} rank functions, got {len(parts)}")
        for i, fi in enumerate(parts):
            stray = set(fi) - set(c.ranks[i])
            if stray:
                raise CirquentError("BAD_METASELECTION", f"clusters {sorted(stray)} are not in rank {i + 1}")
    out: dict[int, int | None] = dict.fromkeys(c.parallel_clusters)
    for fi in parts:
        for cid, idx in fi.items():
            if cid not in out:
                raise CirquentError("BAD_METASELECTION", f"{cid} is not a parallel cluster")
            if idx is not None and not 1 <= idx <= c.outdegree(cid):
                raise CirquentError("BAD_METASELECTION", f"index {idx} out of range for cluster {cid}")
            out[cid] = idx
    return out


def metatrue(c: Cirquent, interp: Interpretation, run, f) -> bool:
    """Metatruth of ``c`` w.r.t. ``interp``, ``run`` and metaselection ``f``.

    Parallel clusters that ``f`` leaves out are undefined (unresolved).
    """
    require_legal(legal_position_col(c, interp, run))
    sel = resolution_state(c, run)
    return bool(engine(c).evaluate(port_values(c, interp, run), sel, _flatten(c, f), 1))


def true_col(c: Cirquent, interp: Interpretation, run=()) -> bool:
    require_legal(legal_position_col(c, interp, run))
    return truth_unchecked(c, interp, run)


def truth_unchecked(c: Cirquent, interp: Interpretation, run) -> bool:
    sel = resolution_state(c, run)
    return bool(engine(c).truth(port_values(c, interp, run), sel, 1))


def wn(c: Cirquent, interp: Interpretation, run=()) -> Player:
    """Winner of ``run`` in C*: the offender loses an illegal run."""
    verdict = legal_position_col(c, interp, run)
    if not verdict:
        return verdict.offender.opp
    return TOP if truth_unchecked(c, interp, run) else TOP.opp
