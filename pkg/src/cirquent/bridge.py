"""Moving strategies between Ĉ and C*.

``uniformize`` turns a machine for the resource game Ĉ into one for C*
that works under every interpretation: selections are forwarded, and
an allocation (a,b) makes it copy the adversary's moves between ports
a and b.  ``deuniformize`` goes the other way by simulating a C*
strategy against an adversary that plays move ``a`` in every general
port ``a`` and allocating each pair it sees being copied.  ``refute``
builds, for a cirquent that cannot be accomplished, a nice
interpretation under which a given C* strategy loses.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .ars import witness
from .errors import CirquentError
from .games import Interpretation, nice_game
from .model import Cirquent
from .runs import BOT, TOP, Allocation, LabMove, PortMove, Select, classify, legal_position_ars, resolution_state
from .strategies import FromFunction, PlayTranscript, Silent, Strategy, play

SATURATION_CAP = 10_000


def _saturate(strategy, run: list, on_move, what: str) -> None:
    """Let ``strategy`` move until it stays silent, appending to ``run``."""
    for _ in range(SATURATION_CAP):
        m = strategy(tuple(run))
        if m is None:
            return
        run.append(LabMove(TOP, str(m)))
        on_move(str(m))
    raise CirquentError("SIMULATION_DIVERGED", f"{what} keeps moving without end")


@dataclass
class _UState:
    theta: list        # simulated run of M in Ĉ
    partner: dict      # allocated port -> other port
    queue: list        # moves U still owes
    seen: dict         # port -> ⊥ moves received there, in order

    def copy(self):
        return _UState(list(self.theta), dict(self.partner), list(self.queue),
                       {k: list(v) for k, v in self.seen.items()})


class Uniformized(Strategy):
    """C* strategy obtained from a Ĉ strategy ``machine``."""

    def __init__(self, machine: Strategy, c: Cirquent):
        self.machine = machine
        self.c = c
        self._states: dict = {}

    def _react(self, st: _UState, move: str) -> None:
        verdict = legal_position_ars(self.c, tuple(st.theta))
        if not verdict:
            raise CirquentError("SIMULATION_DIVERGED", f"simulated machine moved illegally: {verdict.reason}")
        what = classify(self.c, move)
        if isinstance(what, Select):
            st.queue.append(move)
        else:
            a, b = what.a, what.b
            st.partner[a], st.partner[b] = b, a
            st.queue += [f"{b}.{beta}" for beta in st.seen.get(a, [])]
            st.queue += [f"{a}.{alpha}" for alpha in st.seen.get(b, [])]

    def _saturate(self, st: _UState) -> None:
        _saturate(self.machine, st.theta, lambda m: self._react(st, m), "simulated machine")

    def state(self, run) -> _UState:
        run = tuple(run)
        hit = self._states.get(run)
        if hit is not None:
            return hit
        if not run:
            st = _UState([], {}, [], {})
            self._saturate(st)
        else:
            st = self.state(run[:-1]).copy()
            lm = run[-1]
            if lm.player is TOP:
                if not st.queue or st.queue[0] != lm.move:
                    raise CirquentError("SIMULATION_DIVERGED", f"unexpected own move {lm.move}")
                st.queue.pop(0)
            else:
                what = classify(self.c, lm.move)
                if isinstance(what, Select):
                    st.theta.append(lm)
                elif isinstance(what, PortMove):
                    st.seen.setdefault(what.port, []).append(what.suffix)
                    if what.port in st.partner:
                        st.queue.append(f"{st.partner[what.port]}.{what.suffix}")
            self._saturate(st)
        self._states[run] = st
        return st

    def __call__(self, run):
        st = self.state(run)
        return st.queue[0] if st.queue else None

    def __repr__(self):
        return f"Uniformized({self.machine!r})"


def uniformize(machine: Strategy, c: Cirquent) -> Uniformized:
    return Uniformized(machine, c)


@dataclass
class _MState:
    gamma: list        # simulated run of U in C*
    queue: list        # moves M still owes
    allocated: set

    def copy(self):
        return _MState(list(self.gamma), list(self.queue), set(self.allocated))


class Deuniformized(Strategy):
    """Ĉ strategy obtained from a C* strategy ``uniform``."""

    def __init__(self, uniform: Strategy, c: Cirquent):
        self.uniform = uniform
        self.c = c
        self._states: dict = {}

    def _react(self, st: _MState, move: str) -> None:
        if isinstance(classify(self.c, move), Select):
            st.queue.append(move)
        self._detect(st)

    def _detect(self, st: _MState) -> None:
        c = self.c
        have = set(st.gamma)
        for a in c.general_ports:
            la = c.label(a)
            if la.negated:
                continue
            for b in c.general_ports:
                lb = c.label(b)
                if not lb.negated or lb.atom != la.atom or (a, b) in st.allocated:
                    continue
                need = {LabMove(BOT, f"{a}.{a}"), LabMove(BOT, f"{b}.{b}"),
                        LabMove(TOP, f"{b}.{a}"), LabMove(TOP, f"{a}.{b}")}
                if need <= have:
                    st.allocated.add((a, b))
                    st.queue.append(f"({a},{b})")

    def _saturate(self, st: _MState) -> None:
        _saturate(self.uniform, st.gamma, lambda m: self._react(st, m), "simulated strategy")

    def state(self, run) -> _MState:
        run = tuple(run)
        hit = self._states.get(run)
        if hit is not None:
            return hit
        if not run:
            st = _MState([], [], set())
            self._saturate(st)
            for a in self.c.general_ports:
                st.gamma.append(LabMove(BOT, f"{a}.{a}"))
                self._detect(st)
                self._saturate(st)
        else:
            st = self.state(run[:-1]).copy()
            lm = run[-1]
            if lm.player is TOP:
                if not st.queue or st.queue[0] != lm.move:
                    raise CirquentError("SIMULATION_DIVERGED", f"unexpected own move {lm.move}")
                st.queue.pop(0)
            elif isinstance(classify(self.c, lm.move), Select):
                st.gamma.append(lm)
                self._saturate(st)
        self._states[run] = st
        return st

    def simulated_run(self, run) -> tuple:
        return tuple(self.state(run).gamma)

    def __call__(self, run):
        st = self.state(run)
        return st.queue[0] if st.queue else None

    def __repr__(self):
        return f"Deuniformized({self.uniform!r})"


def deuniformize(uniform: Strategy, c: Cirquent) -> Deuniformized:
    return Deuniformized(uniform, c)


# ---- refutation ---------------------------------------------------------------

def refuting_interpretation(c: Cirquent, situation: dict, arrangement, gamma) -> Interpretation:
    """The nice interpretation built from a falsifying situation.

    Unmatched general ports are first sent to F.  A run ⟨⊥a, ⊤b⟩ of P*
    is won by ⊤ iff a is a P-port that is true and saw exactly ⊥a, ⊤b,
    or b is a ¬P-port that is false and saw exactly ⊤a, ⊥b.
    """
    matched = {p for pair in arrangement for p in pair}
    dd = {a: (v if (a not in c.general_ports or a in matched) else False) for a, v in situation.items()}
    elementary = {}
    for a in c.ports:
        lit = c.label(a)
        if not lit.general and dd[a] != lit.negated:
            elementary[lit.atom] = True
    for atom in c.elementary_atoms:
        elementary.setdefault(atom, False)

    seen: dict[int, set] = {a: set() for a in c.general_ports}
    for lm in gamma:
        what = classify(c, lm.move)
        if isinstance(what, PortMove) and what.port in seen:
            seen[what.port].add(LabMove(lm.player, what.suffix))

    alphabet = [str(a) for a in c.general_ports]
    general = {}
    for atom in c.general_atoms:
        table = {}
        for m, n in itertools.product(alphabet, repeat=2):
            a, b = int(n), int(m)  # ⊥ moved a, ⊤ moved b
            la, lb = c.label(a), c.label(b)
            one = (not la.negated and la.atom == atom and dd[a]
                   and seen[a] == {LabMove(BOT, n), LabMove(TOP, m)})
            two = (lb.negated and lb.atom == atom and not dd[b]
                   and seen[b] == {LabMove(TOP, n), LabMove(BOT, m)})
            table[(m, n)] = TOP if (one or two) else BOT
        general[atom] = nice_game(alphabet, table)
    return Interpretation(elementary, general)


class _Replayer(Strategy):
    """Environment that replays the ⊥ moves of ``gamma`` in order, each
    once the ⊤ moves preceding it in ``gamma`` have been made."""

    def __init__(self, gamma):
        self.script = []
        tops = 0
        for lm in gamma:
            if lm.player is TOP:
                tops += 1
            else:
                self.script.append((tops, lm.move))

    def __call__(self, run):
        done = sum(1 for lm in run if lm.player is BOT)
        if done >= len(self.script):
            return None
        need, move = self.script[done]
        return move if sum(1 for lm in run if lm.player is TOP) >= need else None


@dataclass
class Refutation:
    interpretation: Interpretation
    transcript: PlayTranscript
    resource_play: PlayTranscript
    situation: dict


def refute(c: Cirquent, uniform: Strategy, *, max_steps: int = 500) -> Refutation:
    """Find a nice interpretation under which ``uniform`` loses C*."""
    from .solver import solve_ars

    result = solve_ars(c)
    if result.winner is TOP:
        raise CirquentError("NOT_REFUTABLE", "the cirquent is accomplishable")
    m = deuniformize(uniform, c)
    theta_play = play(c, m, result.environment, "ars", max_steps=max_steps, env_burst=1)
    if theta_play.verdict is TOP:
        raise CirquentError("REFUTATION_FAILED", "the derived resource strategy was not beaten")
    theta = theta_play.run
    verdict = legal_position_ars(c, theta)
    if not verdict:
        raise CirquentError("REFUTATION_FAILED", f"derived strategy played illegally: {verdict.reason}")
    dagger = witness(c, theta)
    gamma = m.simulated_run(theta)
    arrangement = {(int(a), int(b)) for a, b in
                   (lm.move[1:-1].split(",") for lm in theta if isinstance(classify(c, lm.move), Allocation))}
    interp = refuting_interpretation(c, dagger, arrangement, gamma)
    transcript = play(c, uniform, _Replayer(gamma), "col", interp, max_steps=max_steps)
    return Refutation(interp, transcript, theta_play, dagger)


# ---- a small family of machines ------------------------------------------------

def _first_legal(c: Cirquent, run, candidates):
    picked = {cid for lm in run if lm.player is TOP
              for cid in [getattr(classify(c, lm.move), "cluster", None)] if cid is not None}
    for move in candidates:
        what = classify(c, move)
        if isinstance(what, Select) and what.cluster in picked:
            continue
        if legal_position_ars(c, tuple(run) + (LabMove(TOP, move),)):
            return move
    return None


def _selections(c: Cirquent):
    return [f"{cid}.{j}" for cid in c.selectional_clusters if c.cluster_kind(cid).disjunctive
            for j in range(1, c.outdegree(cid) + 1)]


def greedy_selector(c: Cirquent) -> Strategy:
    """Makes the first available selection in every ⊤-cluster, once each."""
    moves = _selections(c)
    return FromFunction(lambda run: _first_legal(c, run, moves), "greedy-first-move")


def greedy_allocator(c: Cirquent) -> Strategy:
    """Resource machine: first selection per cluster, then every allocation it can."""
    ports = c.general_ports
    moves = _selections(c) + [f"({a},{b})" for a in ports for b in ports if a != b]
    return FromFunction(lambda run: _first_legal(c, run, moves), "greedy-allocator")


def smart_environment(c: Cirquent) -> Strategy:
    """Plays move ``a`` in each general port ``a``, lowest port first."""

    def move(run):
        done = {lm.move.split(".", 1)[0] for lm in run if lm.player is BOT}
        for a in c.general_ports:
            if str(a) not in done:
                return f"{a}.{a}"
        return None

    return FromFunction(move, "smart-environment")


def machine_family(c: Cirquent) -> dict[str, Strategy]:
    return {"silent": Silent(), "greedy-first-move": greedy_selector(c),
            "copycat-eager": uniformize(greedy_allocator(c), c)}


# ---- bounded exhaustive check of a C* strategy -----------------------------------

def env_options(c: Cirquent, run, alphabet) -> list[str]:
    """Moves the environment may make next, interpretation-free: selections
    in ⊥-clusters and one move per general port from ``alphabet``."""
    out = []
    state = resolution_state(c, run)
    for cid in c.selectional_clusters:
        kind = c.cluster_kind(cid)
        if kind.disjunctive:
            continue
        cur = state[cid]
        for j in range(1, c.outdegree(cid) + 1):
            if kind.choice and cur is not None:
                break
            if kind.sequential and cur is not None and j <= cur:
                continue
            if kind.toggling and j == cur:
                continue
            out.append(f"{cid}.{j}")
    moved = {classify(c, lm.move).port for lm in run
             if lm.player is BOT and isinstance(classify(c, lm.move), PortMove)}
    for a in c.general_ports:
        if a not in moved:
            out += [f"{a}.{x}" for x in alphabet]
    return out


def exhaustive_runs(c: Cirquent, machine: Strategy, alphabet=("1", "2"), max_env_moves: int = 2,
                    max_steps: int = 60):
    """Every final run of ``machine`` against environments making at most one
    move per step and at most ``max_env_moves`` moves overall."""
    finals = []

    def explore(run, budget, steps):
        if steps > max_steps:
            raise CirquentError("MAX_STEPS_REACHED", "exhaustive check ran too long")
        m = machine(tuple(run))
        after = run + [LabMove(TOP, str(m))] if m is not None else run
        # environment passes this step
        if m is None:
            finals.append(tuple(after))
        else:
            explore(after, budget, steps + 1)
        if budget:
            for e in env_options(c, after, alphabet):
                explore(after + [LabMove(BOT, e)], budget - 1, steps + 1)

    explore([], max_env_moves, 0)
    return finals
