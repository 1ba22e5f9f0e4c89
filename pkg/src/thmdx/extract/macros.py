"""Preamble macro harvesting and bounded expansion.

Only zero-argument definitions are expanded; anything taking parameters is
skipped and tallied so callers can report it.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional

from ..errors import PassLimitExceeded
from ..records import ParseReport

MACRO_PASS_LIMIT = 10

_NEWCOMMAND_HEAD = re.compile(
    r"\\newcommand\*?\s*\{?\s*(\\[A-Za-z@]+)\s*\}?\s*(\[\s*\d+\s*\])?\s*(?=\{)"
)
_DEF_HEAD = re.compile(r"\\def\s*(\\[A-Za-z@]+)\s*([^{]*)(?=\{)")


@dataclass
class MacroTable:
    entries: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for key, value in self.entries.items():
            if not key.startswith("\\"):
                raise ValueError(f"macro key {key!r} must start with a backslash")
            if value.strip() == key:
                raise ValueError(f"macro {key!r} maps to itself")

    def __len__(self) -> int:
        return len(self.entries)


def _read_brace_group(text: str, start: int) -> Optional[tuple[str, int]]:
    """Read a balanced ``{...}`` group starting at ``start``.

    Returns (content, index just past the closing brace), or None when the
    group never closes. ``\\{`` and ``\\}`` do not affect the depth.
    """
    if start >= len(text) or text[start] != "{":
        return None
    depth = 0
    i = start
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\\" and i + 1 < n:
            i += 2
            continue
        if ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth == 0:
                return text[start + 1 : i], i + 1
        i += 1
    return None


def build_macro_table(preamble: str, report: Optional[ParseReport] = None) -> MacroTable:
    """Collect zero-argument ``\\newcommand`` and ``\\def`` definitions.

    Parameterized definitions are skipped (counted on ``report`` when given);
    unparseable ones are skipped silently. Later definitions win, matching how
    LaTeX treats redefinition.
    """
    entries: dict[str, str] = {}

    for match in _NEWCOMMAND_HEAD.finditer(preamble):
        name, arg_spec = match.group(1), match.group(2)
        group = _read_brace_group(preamble, match.end())
        if group is None:
            continue
        if arg_spec is not None:
            if report is not None:
                report.macros_skipped += 1
            continue
        body = group[0]
        if body.strip() == name:
            continue
        entries[name] = body

    for match in _DEF_HEAD.finditer(preamble):
        name, between = match.group(1), match.group(2)
        group = _read_brace_group(preamble, match.end())
        if group is None:
            continue
        if "#" in between:
            if report is not None:
                report.macros_skipped += 1
            continue
        body = group[0]
        if body.strip() == name:
            continue
        entries[name] = body

    return MacroTable(entries=entries)


def expand_macros(body: str, table: MacroTable) -> str:
    """Replace every table key followed by a non-letter boundary, to fixpoint.

    Raises PassLimitExceeded after MACRO_PASS_LIMIT rewriting passes, which
    signals a macro cycle; callers keep the original body in that case.
    """
    if not table.entries:
        return body

    # Longest key first so \RR is not eaten by \R.
    keys = sorted(table.entries, key=len, reverse=True)
    pattern = re.compile(
        "(" + "|".join(re.escape(k) for k in keys) + r")(?![A-Za-z])"
    )

    current = body
    for _ in range(MACRO_PASS_LIMIT):
        replaced = pattern.sub(lambda m: table.entries[m.group(1)], current)
        if replaced == current:
            return current
        current = replaced
    raise PassLimitExceeded(
        f"macro expansion did not settle after {MACRO_PASS_LIMIT} passes"
    )
