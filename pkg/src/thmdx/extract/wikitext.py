"""Wiki-page statement extraction.

Pages carry one statement each. The statement section runs from its heading
to the next heading (usually the proof); the markup is rewritten to plain
LaTeX-flavoured text.
"""

from __future__ import annotations

import re
from typing import Optional

from ..errors import NoStatementSection
from ..records import (
    DocFormat,
    NumberedBy,
    ParseReport,
    RawDocument,
    TheoremRecord,
    TheoremType,
)
from .latex import (
    MIN_BODY_LENGTH,
    collapse_whitespace,
    compose_name,
    filter_malformed,
    normalize_environment_name,
)

_HEADING = re.compile(r"^==+\s*(.*?)\s*==+\s*$", re.MULTILINE)
_ONLYINCLUDE = re.compile(r"</?onlyinclude>")
_PIPED_LINK = re.compile(r"\[\[[^|\]]*\|([^\]]*)\]\]")
_PLAIN_LINK = re.compile(r"\[\[([^\]]*)\]\]")
_MATH = re.compile(r"<math[^>]*>(.*?)</math>", re.DOTALL)


def _strip_templates(text: str) -> str:
    """Remove balanced ``{{...}}`` template calls, including nested ones.

    An unclosed ``{{`` is left in place rather than eating the page tail.
    """
    out = []
    i = 0
    n = len(text)
    while i < n:
        if text.startswith("{{", i):
            depth = 0
            j = i
            while j < n:
                if text.startswith("{{", j):
                    depth += 1
                    j += 2
                elif text.startswith("}}", j):
                    depth -= 1
                    j += 2
                    if depth == 0:
                        break
                else:
                    j += 1
            if depth == 0:
                i = j
                continue
        out.append(text[i])
        i += 1
    return "".join(out)


def _statement_section(page_text: str) -> tuple[Optional[TheoremType], str]:
    """Locate the statement section.

    Returns (type from the heading, section text). A page without any heading
    is treated as a bare statement fragment (transcluded pages look like
    this). A page whose headings never introduce a statement raises
    NoStatementSection.
    """
    headings = list(_HEADING.finditer(page_text))
    if not headings:
        return None, page_text

    for idx, match in enumerate(headings):
        thm_type = normalize_environment_name(match.group(1))
        if thm_type is None:
            continue
        start = match.end()
        end = headings[idx + 1].start() if idx + 1 < len(headings) else len(page_text)
        return thm_type, page_text[start:end]

    raise NoStatementSection("no statement heading on page")


def clean_wikitext(page_text: str) -> str:
    """Clean a page down to its statement text.

    Captures the statement section, drops onlyinclude tags and template
    calls, resolves wiki links, converts <math> blocks to inline dollars,
    and collapses whitespace.
    """
    _, section = _statement_section(page_text)
    return _rewrite_markup(section)


def _rewrite_markup(text: str) -> str:
    text = _ONLYINCLUDE.sub("", text)
    text = _strip_templates(text)
    text = _PIPED_LINK.sub(lambda m: m.group(1), text)
    text = _PLAIN_LINK.sub(lambda m: m.group(1), text)
    text = _MATH.sub(lambda m: "$" + m.group(1).strip() + "$", text)
    return collapse_whitespace(text)


def extract_wikitext(doc: RawDocument) -> tuple[list[TheoremRecord], ParseReport]:
    """Extract the single statement a wiki page carries.

    Pages without a statement section yield no records; the malformed-body
    filter applies the same as for LaTeX spans.
    """
    if doc.format is not DocFormat.WIKITEXT:
        raise ValueError(f"extract_wikitext expects a wikitext document, got {doc.format}")

    report = ParseReport(doc_id=doc.doc_id)
    try:
        thm_type, section = _statement_section(doc.body)
    except NoStatementSection:
        return [], report

    body = _rewrite_markup(section)
    if not filter_malformed(body):
        if len(body.rstrip()) < MIN_BODY_LENGTH:
            report.filtered_short += 1
        else:
            report.filtered_suffix += 1
        return [], report

    thm_type = thm_type or TheoremType.THEOREM
    record = TheoremRecord(
        record_id=f"{doc.doc_id}#1",
        doc_id=doc.doc_id,
        thm_type=thm_type,
        ref_number=None,
        note=None,
        label=None,
        body=body,
        name=compose_name(thm_type),
        source_url=doc.source_url,
        numbered_by=NumberedBy.NONE,
    )
    report.extracted = 1
    return [record], report


def extract_document(doc: RawDocument) -> tuple[list[TheoremRecord], ParseReport]:
    """Format dispatch used by corpus ingestion."""
    if doc.format is DocFormat.LATEX:
        from .latex import extract_theorems

        return extract_theorems(doc)
    return extract_wikitext(doc)
