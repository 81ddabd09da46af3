"""Interactive strategies and the play scheduler.

A strategy is any callable taking the visible run and returning a move
string or None.  It must be deterministic in the run; private caches
are fine.  In every step the machine gets one chance to move, then the
environment is asked repeatedly until it stays silent.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CirquentError
from .runs import BOT, TOP, LabMove, Player, emit_run


class Strategy:
    def __call__(self, run) -> str | None:
        raise NotImplementedError


class Silent(Strategy):
    def __call__(self, run):
        return None

    def __repr__(self):
        return "Silent()"


class Scripted(Strategy):
    """Emit ``moves`` one by one, the k-th once the player has made k-1 moves."""

    def __init__(self, moves, player: Player = TOP):
        self.moves = [str(m) for m in moves]
        self.player = player

    def __call__(self, run):
        k = sum(1 for lm in run if lm.player is self.player)
        return self.moves[k] if k < len(self.moves) else None

    def __repr__(self):
        return f"Scripted({self.moves!r}, {self.player.value})"


class FromFunction(Strategy):
    def __init__(self, fn, name: str = ""):
        self.fn = fn
        self.name = name or getattr(fn, "__name__", "fn")

    def __call__(self, run):
        return self.fn(tuple(run))

    def __repr__(self):
        return f"FromFunction({self.name})"


@dataclass
class PlayTranscript:
    run: tuple
    log: list = field(default_factory=list)  # (step, player, move)
    verdict: Player | None = None
    status: str = "OK"

    def text(self) -> str:
        return emit_run(self.run)

    def to_doc(self) -> dict:
        return {"run": emit_run(self.run), "verdict": self.verdict.value if self.verdict else None,
                "status": self.status, "steps": [[s, p.value, m] for s, p, m in self.log]}


def judge(c, run, regime: str = "ars", interp=None) -> Player:
    from .ars import wn_ars
    from .col import wn

    if regime == "ars":
        return wn_ars(c, run)
    if regime == "col":
        if interp is None:
            raise CirquentError("USAGE", "the col regime needs an interpretation")
        return wn(c, interp, run)
    raise CirquentError("USAGE", f"unknown regime {regime!r}")


def play(c, machine, environment, regime: str = "ars", interp=None, *, max_steps: int = 200,
         env_burst: int | None = None) -> PlayTranscript:
    """Run the two strategies against each other on ``c``.

    ``env_burst`` caps environment moves per step (None: unbounded).
    Stops when a step passes with no move, or after ``max_steps``
    (status MAX_STEPS_REACHED; the verdict is still given).
    """
    run: list[LabMove] = []
    log = []
    status = "OK"
    for step in range(1, max_steps + 1):
        moved = False
        m = machine(tuple(run))
        if m is not None:
            run.append(LabMove(TOP, str(m)))
            log.append((step, TOP, str(m)))
            moved = True
        burst = 0
        while env_burst is None or burst < env_burst:
            e = environment(tuple(run))
            if e is None:
                break
            run.append(LabMove(BOT, str(e)))
            log.append((step, BOT, str(e)))
            moved = True
            burst += 1
            if burst >= max_steps:
                status = "MAX_STEPS_REACHED"
                break
        if not moved:
            break
    else:
        status = "MAX_STEPS_REACHED"
    out = PlayTranscript(tuple(run), log, None, status)
    out.verdict = judge(c, out.run, regime, interp)
    return out
