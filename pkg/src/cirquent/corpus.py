"""The figure corpus: hand-encoded cirquents with expected verdicts.

``manifest.json`` lists entries; each names a cirquent file and a list of
checks.  A check is ``{"op": ..., <args>, "expect": ..., "source": ...,
"figure": ...}`` where ``source`` is one of published / derived / trivial.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from pathlib import Path

from .errors import CirquentError
from .model import Cirquent, canonical, load_json, validate

SOURCES = ("published", "derived", "trivial")


def corpus_dir() -> Path:
    env = os.environ.get("CIRQUENT_CORPUS_DIR")
    return Path(env) if env else Path(__file__).with_name("corpus")


@dataclass
class CorpusEntry:
    name: str
    group: str
    cirquent: str
    checks: list = field(default_factory=list)

    def matches(self, pattern: str | None) -> bool:
        return not pattern or pattern in (self.name, self.group)


@dataclass
class CheckResult:
    entry: str
    op: str
    source: str
    figure: str
    expect: object
    got: object = None
    passed: bool = False
    error: str | None = None
    seconds: float = 0.0

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        shown = self.error if self.error else f"got {_short(self.got)}"
        where = f", {self.figure}" if self.figure else ""
        return f"{tag} {self.entry} {self.op}: expect {_short(self.expect)}, {shown} [{self.source}{where}]"


def _short(v) -> str:
    text = json.dumps(v, ensure_ascii=False) if not isinstance(v, str) else v
    return text if len(text) <= 60 else text[:57] + "..."


def load_manifest(directory: Path | None = None) -> list[CorpusEntry]:
    directory = Path(directory) if directory else corpus_dir()
    path = directory / "manifest.json"
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError:
        raise CirquentError("CORPUS_MISSING", f"no manifest at {path}") from None
    except json.JSONDecodeError as exc:
        raise CirquentError("CORPUS_INVALID", f"{path}: {exc.msg}") from None
    out = []
    for e in raw.get("entries", []):
        entry = CorpusEntry(e["name"], e.get("group", e["name"]), e["cirquent"], e.get("checks", []))
        for chk in entry.checks:
            if chk.get("source") not in SOURCES:
                raise CirquentError("CORPUS_INVALID", f"{entry.name}/{chk.get('op')}: provenance tag missing")
        out.append(entry)
    return out


@lru_cache(maxsize=None)
def _load_cirquent(directory: str, filename: str) -> Cirquent:
    path = Path(directory) / filename
    try:
        return load_json(path.read_text())
    except FileNotFoundError:
        raise CirquentError("CORPUS_MISSING", f"no cirquent file {path}") from None


def load_cirquent(name: str, directory: Path | None = None) -> Cirquent:
    """Load a corpus cirquent by entry name (``fig20``) or file name."""
    directory = Path(directory) if directory else corpus_dir()
    filename = name if name.endswith(".json") else f"{name}.json"
    return _load_cirquent(str(directory), filename)


@lru_cache(maxsize=None)
def _load_interp(directory: str, name: str):
    from .games import load_interpretation

    path = Path(directory) / "interps" / f"{name}.json"
    try:
        return load_interpretation(path.read_text())
    except FileNotFoundError:
        raise CirquentError("CORPUS_MISSING", f"no interpretation file {path}") from None


def load_interp(name: str, directory: Path | None = None):
    directory = Path(directory) if directory else corpus_dir()
    return _load_interp(str(directory), name)


def rename_atoms(c: Cirquent, mapping: dict[str, str]) -> Cirquent:
    doc = c.to_doc()
    for n in doc["nodes"]:
        label = n["label"]
        neg = label.startswith("~")
        atom = label.lstrip("~")
        if atom in mapping:
            n["label"] = ("~" if neg else "") + mapping[atom]
    return validate(doc)


# ---- check evaluation ----------------------------------------------------------

def _run(chk):
    from .runs import parse_run

    return parse_run(chk.get("run", ""))


def evaluate_check(c: Cirquent, chk: dict, directory: Path):
    """Compute the observed value for one check."""
    from . import ars, col, formula, runs, solver
    from .runs import TOP

    op = chk["op"]
    other = (lambda: load_cirquent(chk["other"], directory))
    interp = (lambda: load_interp(chk["interp"], directory))
    if op == "validate":
        return True
    if op == "identity":
        return solver.extensional_identity(c, other())
    if op == "strongly_valid":
        return solver.solve_ars(c).winner is TOP
    if op == "weakly_valid":
        return solver.weak_validity(c)
    if op == "solve_ars":
        return solver.solve_ars(c, chk.get("toggle_budget")).winner.value
    if op == "solve_col":
        return solver.solve_col(c, interp(), chk.get("toggle_budget")).winner.value
    if op == "oracle":
        regime = chk.get("regime", "ars")
        i = interp() if regime == "col" else None
        return solver.brute_force_oracle(c, regime, i, chk.get("max_len", 8)).value
    if op == "legal":
        if chk.get("regime", "ars") == "ars":
            return bool(runs.legal_position_ars(c, _run(chk)))
        return bool(runs.legal_position_col(c, interp(), _run(chk)))
    if op == "truth":
        return col.true_col(c, interp(), _run(chk))
    if op == "winner":
        return col.wn(c, interp(), _run(chk)).value
    if op == "accomplished":
        return ars.accomplished(c, _run(chk))
    if op == "witness":
        w = ars.witness(c, _run(chk))
        return None if w is None else {str(k): v for k, v in sorted(w.items())}
    if op == "arrangement":
        return sorted([list(p) for p in runs.induced_arrangement(_run(chk))])
    if op == "situations":
        return sum(1 for _ in ars.enumerate_situations(c))
    if op == "same_situations":
        d = other()
        if set(c.ports) != set(d.ports):
            return False
        return all(ars.true_ars(c, s) == ars.true_ars(d, s) for s in ars.enumerate_situations(c))
    if op == "translate":
        got = formula.compile_formula(chk["formula"], chk.get("universe", 2), chk.get("mode", "col"))
        if chk.get("rename"):
            got = rename_atoms(got, chk["rename"])
        return canonical(got) == canonical(c)
    if op == "weak_neg":
        return canonical(formula.weak_neg_cirquent(other())) == canonical(c)
    if op == "strong_neg":
        return canonical(formula.strong_neg_cirquent(other())) == canonical(c)
    raise CirquentError("CORPUS_INVALID", f"unknown check op {op!r}")


def _normal(v):
    if isinstance(v, (list, tuple)):
        return [_normal(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _normal(x) for k, x in v.items()}
    return v


def run_entry(entry: CorpusEntry, directory: Path | None = None) -> list[CheckResult]:
    directory = Path(directory) if directory else corpus_dir()
    out = []
    try:
        c = load_cirquent(entry.cirquent, directory)
    except CirquentError as exc:
        return [CheckResult(entry.name, chk["op"], chk["source"], chk.get("figure", ""), chk.get("expect"),
                            error=exc.render()) for chk in entry.checks]
    for chk in entry.checks:
        res = CheckResult(entry.name, chk["op"], chk["source"], chk.get("figure", ""), chk.get("expect"))
        start = time.perf_counter()
        try:
            res.got = _normal(evaluate_check(c, chk, directory))
            res.passed = res.got == _normal(res.expect)
        except CirquentError as exc:
            res.error = exc.render()
        res.seconds = round(time.perf_counter() - start, 4)
        out.append(res)
    return out


@dataclass
class CorpusReport:
    results: list[CheckResult]
    seconds: float

    @property
    def ok(self) -> bool:
        return bool(self.results) and all(r.passed for r in self.results)

    def text(self) -> str:
        lines = [r.line() for r in self.results]
        npass = sum(r.passed for r in self.results)
        lines.append(f"{npass}/{len(self.results)} checks passed in {self.seconds:.2f}s")
        return "\n".join(lines)

    def to_doc(self) -> dict:
        return {"ok": self.ok, "seconds": self.seconds, "results": [asdict(r) for r in self.results]}


def run_corpus(pattern: str | None = None, directory: Path | None = None, jobs: int | None = None) -> CorpusReport:
    """Run every check of the entries whose name or group equals ``pattern``.

    Entries are independent; with ``jobs`` > 1 they run in worker processes.
    """
    directory = Path(directory) if directory else corpus_dir()
    entries = [e for e in load_manifest(directory) if e.matches(pattern)]
    if pattern and not entries:
        raise CirquentError("USAGE", f"no corpus entry or group named {pattern!r}")
    start = time.perf_counter()
    jobs = jobs if jobs is not None else min(len(entries), os.cpu_count() or 1)
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as pool:
            chunks = list(pool.map(run_entry, entries, [directory] * len(entries)))
    else:
        chunks = [run_entry(e, directory) for e in entries]
    results = [r for chunk in chunks for r in chunk]
    return CorpusReport(results, round(time.perf_counter() - start, 3))
