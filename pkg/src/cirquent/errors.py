"""Error type shared by every module."""

from __future__ import annotations


class CirquentError(Exception):
    """An input or contract error carrying a stable code.

    ``problems`` lists every individual violation as ``(code, detail)``
    pairs; ``code`` is the first of them.
    """

    def __init__(self, code: str, detail: str = "", problems=None):
        self.problems = list(problems) if problems else [(code, detail)]
        self.code = self.problems[0][0]
        self.detail = detail or self.problems[0][1]
        super().__init__(self.render())

    @property
    def codes(self) -> set[str]:
        return {c for c, _ in self.problems}

    def render(self) -> str:
        return "; ".join(f"{c}: {d}" if d else c for c, d in self.problems)
