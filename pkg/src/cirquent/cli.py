"""Command-line interface.

Exit codes: 0 ok or true verdict, 1 false verdict, 2 usage error,
3 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import CirquentError

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_INPUT = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise CirquentError("FILE_ERROR", f"{path}: {exc.strerror}") from None


def _cirquent(path):
    from .model import load_json

    return load_json(_read(path))


def _interp(path):
    from .games import load_interpretation

    return load_interpretation(_read(path)) if path else None


def _run_arg(args):
    from .runs import parse_run

    if args.run_file:
        # one labmove per line or ;-separated, # comments
        lines = (line.split("#", 1)[0].strip() for line in _read(args.run_file).splitlines())
        return parse_run("; ".join(line for line in lines if line))
    return parse_run(args.run or "")


def _script(path: str, player):
    """A script file lists moves, one per line or ``;``-separated; ``#`` starts a comment."""
    from .strategies import Scripted

    moves = []
    for line in _read(path).splitlines():
        line = line.split("#", 1)[0]
        for chunk in line.split(";"):
            parts = chunk.split()
            if parts:
                moves.append(parts[-1])
    return Scripted(moves, player)


class _Out:
    def __init__(self, fmt: str):
        self.fmt = fmt
        self.doc: dict = {}
        self.lines: list[str] = []

    def put(self, key, value, text: str | None = None):
        self.doc[key] = value
        if text is not None:
            self.lines.append(text)

    def flush(self):
        if self.fmt == "json":
            print(json.dumps(self.doc, indent=1, ensure_ascii=False))
        elif self.lines:
            print("\n".join(self.lines))


def _situation_doc(s: dict) -> dict:
    return {str(k): v for k, v in sorted(s.items())}


# ---- subcommands --------------------------------------------------------------

def cmd_validate(args, out: _Out) -> int:
    from .model import emit_dot

    c = _cirquent(args.cirquent)
    out.put("valid", True, f"valid: {len(c.nodes)} nodes, {len(c.clusters)} clusters, {len(c.ranks)} ranks")
    if args.dot:
        out.put("dot", emit_dot(c), emit_dot(c).rstrip())
    return EXIT_OK


def cmd_translate(args, out: _Out) -> int:
    from .formula import compile_formula, strong_neg_cirquent, weak_neg_cirquent
    from .model import emit_dot, emit_json

    c = compile_formula(args.formula, args.universe, args.mode)
    if args.negate == "weak":
        c = weak_neg_cirquent(c)
    elif args.negate == "strong":
        c = strong_neg_cirquent(c)
    if args.dot:
        print(emit_dot(c), end="")
    else:
        print(emit_json(c), end="")
    return EXIT_OK


def cmd_eval(args, out: _Out) -> int:
    from . import ars, col
    from .runs import legal_position_ars, legal_position_col

    c = _cirquent(args.cirquent)
    run = _run_arg(args)
    interp = _interp(args.interp)
    if args.legality:
        if args.ars:
            verdict = legal_position_ars(c, run)
        else:
            if interp is None:
                raise UsageError("eval --legality needs --interp, or --ars")
            verdict = legal_position_col(c, interp, run)
        text = "legal" if verdict else f"illegal: labmove {verdict.index} by {verdict.offender.value}: {verdict.reason}"
        out.put("legal", bool(verdict), text)
        if not verdict:
            out.put("offender", verdict.offender.value)
            out.put("index", verdict.index)
            out.put("reason", verdict.reason)
        return EXIT_OK if verdict else EXIT_FALSE
    if args.ars:
        if args.situation:
            s = json.loads(_read(args.situation))
            s = {int(k): bool(v) for k, v in s.items()}
            missing = set(c.ports) - set(s)
            if missing:
                raise CirquentError("BAD_SITUATION", f"no value for ports {sorted(missing)}")
            value = ars.true_ars(c, s, run)
            out.put("true", value, "true" if value else "false")
            return EXIT_OK if value else EXIT_FALSE
        w = ars.witness(c, run)
        out.put("accomplished", w is None, "accomplished" if w is None else "not accomplished")
        if w is not None:
            out.put("witness", _situation_doc(w),
                    "witness: " + " ".join(f"{k}={'T' if v else 'F'}" for k, v in sorted(w.items())))
        return EXIT_OK if w is None else EXIT_FALSE
    if interp is None:
        raise UsageError("eval needs --interp (or --ars)")
    value = col.true_col(c, interp, run)
    out.put("true", value, "true" if value else "false")
    return EXIT_OK if value else EXIT_FALSE


def _show_play(out: _Out, transcript, key="play"):
    out.put(key, transcript.to_doc(), f"run: {transcript.text() or '<empty>'}")
    verdict = transcript.verdict.value if transcript.verdict else None
    out.lines.append(f"verdict: {verdict}" + ("" if transcript.status == "OK" else f" ({transcript.status})"))


def cmd_solve(args, out: _Out) -> int:
    from . import solver
    from .strategies import play

    c = _cirquent(args.cirquent)
    interp = _interp(args.interp)
    if args.oracle:
        regime = "col" if interp is not None else "ars"
        w = solver.brute_force_oracle(c, regime, interp, args.max_len)
        out.put("winner", w.value, f"winner: {w.value} (oracle, max_len {args.max_len})")
        return EXIT_OK if w.value == "T" else EXIT_FALSE
    if interp is None:
        res, regime = solver.solve_ars(c, args.toggle_budget), "ars"
    else:
        res, regime = solver.solve_col(c, interp, args.toggle_budget), "col"
    out.put("winner", res.winner.value, f"winner: {res.winner.value}")
    out.put("explored", res.explored, f"explored states: {res.explored}")
    if res.budget is not None:
        out.put("toggle_budget", res.budget, "; ".join(res.notes))
    t = play(c, res.machine, res.environment, regime, interp, max_steps=args.max_steps, env_burst=1)
    out.put("transcript", t.to_doc(), f"strategy transcript: {t.text() or '<empty>'}")
    return EXIT_OK if res.winner.value == "T" else EXIT_FALSE


def _interactive_env(c):
    from .strategies import FromFunction

    state = {"done": False}

    def ask(run):
        if state["done"]:
            return None
        print(f"run: {'; '.join(str(lm) for lm in run) or '<empty>'}", file=sys.stderr)
        print("env move (empty to pass, 'quit' to stop moving)> ", end="", file=sys.stderr, flush=True)
        line = sys.stdin.readline()
        if not line or line.strip() == "quit":
            state["done"] = True
            return None
        return line.strip() or None

    return FromFunction(ask, "interactive")


def _strategy(spec: str, role: str, c, interp):
    from . import bridge, solver
    from .runs import BOT, TOP
    from .strategies import Silent

    player = TOP if role == "machine" else BOT
    if spec.startswith("script:"):
        return _script(spec[len("script:"):], player)
    if spec == "silent":
        return Silent()
    if spec == "solver":
        res = solver.solve_col(c, interp) if interp is not None else solver.solve_ars(c)
        return res.machine if player is TOP else res.environment
    if role == "env" and spec == "smart":
        return bridge.smart_environment(c)
    if role == "env" and spec == "interactive":
        return _interactive_env(c)
    if role == "machine" and spec in bridge.machine_family(c):
        return bridge.machine_family(c)[spec]
    raise UsageError(f"unknown {role} strategy {spec!r}")


def cmd_play(args, out: _Out) -> int:
    from .strategies import play

    c = _cirquent(args.cirquent)
    interp = _interp(args.interp)
    m = _strategy(args.machine, "machine", c, interp)
    e = _strategy(args.env, "env", c, interp)
    regime = "col" if interp is not None else "ars"
    t = play(c, m, e, regime, interp, max_steps=args.max_steps, env_burst=args.env_burst)
    _show_play(out, t)
    return EXIT_OK if t.verdict and t.verdict.value == "T" else EXIT_FALSE


def cmd_refute(args, out: _Out) -> int:
    from .bridge import refute

    c = _cirquent(args.cirquent)
    u = _strategy(args.machine, "machine", c, None)
    try:
        r = refute(c, u, max_steps=args.max_steps)
    except CirquentError as exc:
        if exc.code != "NOT_REFUTABLE":
            raise
        out.put("refuted", False, f"not refutable: {exc.detail}")
        return EXIT_FALSE
    out.put("refuted", True, "refuted")
    out.put("interpretation", r.interpretation.to_doc(),
            "interpretation: " + json.dumps(r.interpretation.to_doc(), ensure_ascii=False))
    out.put("situation", _situation_doc(r.situation),
            "situation: " + " ".join(f"{k}={'T' if v else 'F'}" for k, v in sorted(r.situation.items())))
    out.put("resource_play", r.resource_play.to_doc(), f"resource run: {r.resource_play.text() or '<empty>'}")
    _show_play(out, r.transcript, "transcript")
    return EXIT_OK


def cmd_corpus(args, out: _Out) -> int:
    from .corpus import run_corpus

    report = run_corpus(args.filter, args.dir, args.jobs)
    out.doc = report.to_doc()
    out.lines.append(report.text())
    return EXIT_OK if report.ok else EXIT_FALSE


# ---- parser -------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="cirquent", description="Cirquent evaluation, solving and strategy tools.")
    top.add_argument("--format", choices=("text", "json"), default="text")
    sub = top.add_subparsers(dest="command", parser_class=_Parser)

    def common(p):
        p.add_argument("--format", choices=("text", "json"), default=argparse.SUPPRESS)

    p = sub.add_parser("validate", help="check a cirquent file")
    p.add_argument("--cirquent", required=True)
    p.add_argument("--dot", action="store_true", help="also print Graphviz text")
    common(p)

    p = sub.add_parser("translate", help="compile a formula to a cirquent")
    p.add_argument("--formula", required=True)
    p.add_argument("--universe", type=int, default=2)
    p.add_argument("--mode", default="col", choices=("col", "if-choice", "if-parallel", "if_choice", "if_parallel"))
    p.add_argument("--negate", choices=("weak", "strong"))
    p.add_argument("--dot", action="store_true")
    common(p)

    p = sub.add_parser("eval", help="truth, accomplishment or legality of a position")
    p.add_argument("--cirquent", required=True)
    p.add_argument("--interp")
    p.add_argument("--run", default="")
    p.add_argument("--run-file")
    p.add_argument("--ars", action="store_true", help="abstract resource semantics")
    p.add_argument("--situation", help="JSON object port id -> bool (with --ars)")
    p.add_argument("--legality", action="store_true")
    common(p)

    p = sub.add_parser("solve", help="decide who wins")
    p.add_argument("--cirquent", required=True)
    p.add_argument("--interp")
    p.add_argument("--toggle-budget", type=int)
    p.add_argument("--oracle", action="store_true", help="use the brute-force history search")
    p.add_argument("--max-len", type=int, default=8)
    p.add_argument("--max-steps", type=int, default=200)
    common(p)

    p = sub.add_parser("play", help="play two strategies against each other")
    p.add_argument("--cirquent", required=True)
    p.add_argument("--machine", default="silent",
                   help="script:FILE | solver | silent | greedy-first-move | copycat-eager")
    p.add_argument("--env", default="silent", help="script:FILE | solver | smart | interactive | silent")
    p.add_argument("--interp")
    p.add_argument("--max-steps", type=int, default=200)
    p.add_argument("--env-burst", type=int)
    common(p)

    p = sub.add_parser("refute", help="find a nice interpretation defeating a strategy")
    p.add_argument("--cirquent", required=True)
    p.add_argument("--machine", default="silent")
    p.add_argument("--max-steps", type=int, default=500)
    common(p)

    p = sub.add_parser("corpus", help="run the figure corpus")
    p.add_argument("filter", nargs="?")
    p.add_argument("--dir", help="corpus directory (default: $CIRQUENT_CORPUS_DIR or the bundled one)")
    p.add_argument("--jobs", type=int)
    common(p)
    return top


COMMANDS = {"validate": cmd_validate, "translate": cmd_translate, "eval": cmd_eval, "solve": cmd_solve,
            "play": cmd_play, "refute": cmd_refute, "corpus": cmd_corpus}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise UsageError("a subcommand is required")
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    out = _Out(args.format)
    try:
        code = COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CirquentError as exc:
        if args.format == "json":
            print(json.dumps({"error": exc.code, "problems": [list(p) for p in exc.problems]}))
        print(f"error: {exc.render()}", file=sys.stderr)
        return EXIT_USAGE if exc.code == "USAGE" else EXIT_INPUT
    out.flush()
    return code


if __name__ == "__main__":
    sys.exit(main())
