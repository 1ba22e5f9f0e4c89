"""Regex-based statement extraction from LaTeX sources.

Scans the macro-expanded body for theorem-like ``\\begin{env}...\\end{env}``
pairs and ``\\proclaim ... \\endproclaim`` spans, composes display names, and
drops bodies that look truncated.
"""

from __future__ import annotations

import re
from typing import Optional

from ..errors import PassLimitExceeded
from ..records import (
    DocFormat,
    NumberedBy,
    ParseReport,
    RawDocument,
    TheoremRecord,
    TheoremType,
)
from .macros import build_macro_table, expand_macros

# Shorthand environment names seen in the wild, folded to the four types.
_ENV_ALIASES: dict[str, TheoremType] = {
    "theorem": TheoremType.THEOREM,
    "thm": TheoremType.THEOREM,
    "theo": TheoremType.THEOREM,
    "lemma": TheoremType.LEMMA,
    "lem": TheoremType.LEMMA,
    "proposition": TheoremType.PROPOSITION,
    "prop": TheoremType.PROPOSITION,
    "corollary": TheoremType.COROLLARY,
    "cor": TheoremType.COROLLARY,
    "corol": TheoremType.COROLLARY,
}

MIN_BODY_LENGTH = 8
_BANNED_SUFFIXES = (" and", " let")

_BEGIN = re.compile(r"\\begin\s*\{([^{}]+)\}")
_PROCLAIM = re.compile(r"\\proclaim\b")
_ENDPROCLAIM = re.compile(r"\\endproclaim\b")
_LABEL = re.compile(r"\\label\s*\{([^{}]*)\}\s*")
_LEADING_NOTE = re.compile(r"\A\s*\[([^\]]*)\]")
_WHITESPACE = re.compile(r"\s+")
_SECTION = re.compile(r"\\section\*?\s*\{")
# Head of a proclaim line: "Theorem 3.9 (Shokurov reduction)." and friends.
_PROCLAIM_HEAD = re.compile(
    r"\A\s*([A-Za-z]+)\s*"
    r"(?:(\d+(?:\.\d+)*[a-z]?)\s*)?"
    r"(?:[(\[]([^)\]]*)[)\]]\s*)?"
    r"\.?\s*\Z"
)


def normalize_environment_name(raw: str) -> Optional[TheoremType]:
    """Fold an environment identifier to one of the four statement types.

    Case-insensitive, ignores a trailing ``*``; returns None for environments
    outside the four types (definition, remark, proof, ...).
    """
    name = raw.strip().lower()
    if name.endswith("*"):
        name = name[:-1]
    return _ENV_ALIASES.get(name)


def compose_name(
    thm_type: TheoremType,
    ref_number: Optional[str] = None,
    note: Optional[str] = None,
) -> str:
    """Build the display name: capitalized type, optional number, optional note."""
    name = thm_type.value.capitalize()
    if ref_number:
        name += f" {ref_number}"
    if note:
        name += f" ({note})"
    return name


def filter_malformed(body: str) -> bool:
    """Keep a body iff it is at least 8 characters and does not end in a
    truncation tell (" and" / " let", case-sensitive)."""
    text = body.rstrip()
    if len(text) < MIN_BODY_LENGTH:
        return False
    return not text.endswith(_BANNED_SUFFIXES)


def collapse_whitespace(text: str) -> str:
    return _WHITESPACE.sub(" ", text).strip()


def first_section_text(body: str, limit: int = 20000) -> Optional[str]:
    """Content of the first ``\\section{...}`` up to the next section, used as
    the introduction context for slogan generation."""
    match = _SECTION.search(body)
    if match is None:
        return None
    brace_start = match.end() - 1
    depth = 0
    i = brace_start
    while i < len(body):
        if body[i] == "{":
            depth += 1
        elif body[i] == "}":
            depth -= 1
            if depth == 0:
                break
        i += 1
    start = i + 1
    nxt = _SECTION.search(body, start)
    end = nxt.start() if nxt else body.find("\\end{document}", start)
    if end < 0:
        end = len(body)
    return collapse_whitespace(body[start:end])[:limit]


def _find_matching_end(body: str, env: str, search_from: int) -> Optional[tuple[int, int]]:
    """Locate the ``\\end{env}`` that closes the span opened before
    ``search_from``, counting nested same-name begins.

    Returns (inner_end, index past the \\end command) or None when unbalanced.
    """
    begin_tok = re.compile(r"\\begin\s*\{" + re.escape(env) + r"\}")
    end_tok = re.compile(r"\\end\s*\{" + re.escape(env) + r"\}")
    depth = 1
    pos = search_from
    while True:
        next_begin = begin_tok.search(body, pos)
        next_end = end_tok.search(body, pos)
        if next_end is None:
            return None
        if next_begin is not None and next_begin.start() < next_end.start():
            depth += 1
            pos = next_begin.end()
            continue
        depth -= 1
        if depth == 0:
            return next_end.start(), next_end.end()
        pos = next_end.end()


def _clean_span(
    inner: str, capture_note: bool = True
) -> tuple[str, Optional[str], Optional[str]]:
    """Strip a leading [note] and all \\label commands from a span.

    Returns (collapsed body, note, first label). Proclaim bodies keep leading
    brackets because their note lives on the head line.
    """
    note = None
    if capture_note:
        note_match = _LEADING_NOTE.match(inner)
        if note_match is not None:
            note = note_match.group(1).strip() or None
            inner = inner[note_match.end() :]

    label = None
    labels = _LABEL.findall(inner)
    if labels:
        label = labels[0]
    inner = _LABEL.sub("", inner)

    return collapse_whitespace(inner), note, label


def extract_theorems(doc: RawDocument) -> tuple[list[TheoremRecord], ParseReport]:
    """Extract all outermost theorem-like spans from a LaTeX document.

    Nested theorem environments are treated as body text. Records failing
    ``filter_malformed`` are dropped and counted; a ``\\begin`` or
    ``\\proclaim`` that never closes is counted as an unmatched delimiter and
    scanning continues after it.
    """
    if doc.format is not DocFormat.LATEX:
        raise ValueError(f"extract_theorems expects a latex document, got {doc.format}")

    report = ParseReport(doc_id=doc.doc_id)
    table = build_macro_table(doc.preamble, report=report)
    try:
        body = expand_macros(doc.body, table)
    except PassLimitExceeded:
        body = doc.body

    records: list[TheoremRecord] = []
    counter = 0
    pos = 0

    while True:
        begin = _BEGIN.search(body, pos)
        proclaim = _PROCLAIM.search(body, pos)
        # Skip begins of non-theorem environments without losing a proclaim
        # that sits after them.
        while begin is not None and normalize_environment_name(begin.group(1)) is None:
            begin = _BEGIN.search(body, begin.end())
        if begin is None and proclaim is None:
            break

        if begin is not None and (proclaim is None or begin.start() < proclaim.start()):
            env = begin.group(1)
            thm_type = normalize_environment_name(env)
            assert thm_type is not None
            span = _find_matching_end(body, env, begin.end())
            if span is None:
                report.unmatched_delimiters += 1
                pos = begin.end()
                continue
            inner_end, after_end = span
            cleaned, note, label = _clean_span(body[begin.end() : inner_end])
            pos = after_end
            record = _emit(doc, thm_type, cleaned, note, label, None, counter, records, report)
            if record is not None:
                counter += 1
            continue

        # \proclaim span: the rest of the proclaim line names the statement,
        # following lines up to \endproclaim are the body.
        end = _ENDPROCLAIM.search(body, proclaim.end())
        if end is None:
            report.unmatched_delimiters += 1
            pos = proclaim.end()
            continue
        span_text = body[proclaim.end() : end.start()]
        pos = end.end()
        newline = span_text.find("\n")
        if newline < 0:
            head, rest = span_text, ""
        else:
            head, rest = span_text[:newline], span_text[newline + 1 :]
        head_match = _PROCLAIM_HEAD.match(head)
        if head_match is None:
            continue
        thm_type = normalize_environment_name(head_match.group(1))
        if thm_type is None:
            continue
        explicit_number = head_match.group(2)
        note = (head_match.group(3) or "").strip() or None
        cleaned, _, label = _clean_span(rest, capture_note=False)
        record = _emit(
            doc, thm_type, cleaned, note, label, explicit_number,
            counter, records, report,
        )
        if record is not None and explicit_number is None:
            counter += 1

    report.extracted = len(records)
    return records, report


def _emit(
    doc: RawDocument,
    thm_type: TheoremType,
    body: str,
    note: Optional[str],
    label: Optional[str],
    explicit_number: Optional[str],
    counter: int,
    records: list[TheoremRecord],
    report: ParseReport,
) -> Optional[TheoremRecord]:
    """Apply the malformed-body filter and append a numbered record."""
    if not filter_malformed(body):
        if len(body.rstrip()) < MIN_BODY_LENGTH:
            report.filtered_short += 1
        else:
            report.filtered_suffix += 1
        return None

    if explicit_number is not None:
        ref_number, numbered_by = explicit_number, NumberedBy.EXPLICIT
    else:
        ref_number, numbered_by = str(counter + 1), NumberedBy.COUNTER

    record = TheoremRecord(
        record_id=f"{doc.doc_id}#{len(records) + 1}",
        doc_id=doc.doc_id,
        thm_type=thm_type,
        ref_number=ref_number,
        note=note,
        label=label,
        body=body,
        name=compose_name(thm_type, ref_number, note),
        source_url=doc.source_url,
        numbered_by=numbered_by,
    )
    records.append(record)
    return record
