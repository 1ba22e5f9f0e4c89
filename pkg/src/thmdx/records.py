"""Core record types: source documents, extracted statements, and paper metadata.

These types define the JSON-lines wire formats used between pipeline stages,
so field names and ordering are part of the contract.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Optional, TextIO


class TheoremType(str, Enum):
    THEOREM = "theorem"
    LEMMA = "lemma"
    PROPOSITION = "proposition"
    COROLLARY = "corollary"


class NumberedBy(str, Enum):
    """How a record's ref_number came to be: a document counter, stated in the
    source, or not numbered at all."""

    COUNTER = "counter"
    EXPLICIT = "explicit"
    NONE = "none"


class DocFormat(str, Enum):
    LATEX = "latex"
    WIKITEXT = "wikitext"


@dataclass
class RawDocument:
    doc_id: str
    format: DocFormat
    preamble: str
    body: str
    source_url: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.doc_id:
            raise ValueError("doc_id must be non-empty")
        if not self.body:
            raise ValueError("document body must be non-empty")
        if isinstance(self.format, str):
            self.format = DocFormat(self.format)


@dataclass
class TheoremRecord:
    record_id: str
    doc_id: str
    thm_type: TheoremType
    ref_number: Optional[str]
    note: Optional[str]
    label: Optional[str]
    body: str
    name: str
    source_url: Optional[str] = None
    numbered_by: NumberedBy = NumberedBy.COUNTER

    def to_json(self) -> str:
        # Field order follows the type definition; consumers byte-compare output.
        return json.dumps(
            {
                "record_id": self.record_id,
                "doc_id": self.doc_id,
                "thm_type": self.thm_type.value,
                "ref_number": self.ref_number,
                "note": self.note,
                "label": self.label,
                "body": self.body,
                "name": self.name,
                "source_url": self.source_url,
                "numbered_by": self.numbered_by.value,
            }
        )

    @classmethod
    def from_dict(cls, row: dict) -> "TheoremRecord":
        return cls(
            record_id=row["record_id"],
            doc_id=row["doc_id"],
            thm_type=TheoremType(row["thm_type"]),
            ref_number=row.get("ref_number"),
            note=row.get("note"),
            label=row.get("label"),
            body=row["body"],
            name=row["name"],
            source_url=row.get("source_url"),
            numbered_by=NumberedBy(row.get("numbered_by", "counter")),
        )


@dataclass
class ParseReport:
    """Per-document extraction tally, merged by summation at corpus level."""

    doc_id: str
    extracted: int = 0
    filtered_short: int = 0
    filtered_suffix: int = 0
    unmatched_delimiters: int = 0
    macros_skipped: int = 0

    def merge(self, other: "ParseReport") -> "ParseReport":
        return ParseReport(
            doc_id="*",
            extracted=self.extracted + other.extracted,
            filtered_short=self.filtered_short + other.filtered_short,
            filtered_suffix=self.filtered_suffix + other.filtered_suffix,
            unmatched_delimiters=self.unmatched_delimiters + other.unmatched_delimiters,
            macros_skipped=self.macros_skipped + other.macros_skipped,
        )

    def to_dict(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "extracted": self.extracted,
            "filtered_short": self.filtered_short,
            "filtered_suffix": self.filtered_suffix,
            "unmatched_delimiters": self.unmatched_delimiters,
            "macros_skipped": self.macros_skipped,
        }


@dataclass
class PaperMeta:
    doc_id: str
    title: str
    authors: list[str]
    abstract: str
    primary_tag: str
    tags: list[str]
    year: int
    journal: Optional[str]
    citations: int
    source: str
    url: str
    extra: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if self.citations < 0:
            raise ValueError("citations must be >= 0")
        if self.primary_tag and self.primary_tag not in self.tags:
            raise ValueError("primary_tag must appear in tags")

    @classmethod
    def from_dict(cls, row: dict) -> "PaperMeta":
        known = {
            "doc_id",
            "title",
            "authors",
            "abstract",
            "primary_tag",
            "tags",
            "year",
            "journal",
            "citations",
            "source",
            "url",
        }
        return cls(
            doc_id=row["doc_id"],
            title=row.get("title", row["doc_id"]),
            authors=list(row.get("authors", [])),
            abstract=row.get("abstract", ""),
            primary_tag=row.get("primary_tag", ""),
            tags=list(row.get("tags", [])),
            year=int(row.get("year", 0)),
            journal=row.get("journal"),
            citations=int(row.get("citations", 0)),
            source=row.get("source", "unknown"),
            url=row.get("url", ""),
            extra={k: v for k, v in row.items() if k not in known},
        )

    @classmethod
    def placeholder(cls, doc_id: str) -> "PaperMeta":
        """Minimal metadata for documents absent from the metadata file."""
        return cls(
            doc_id=doc_id,
            title=doc_id,
            authors=[],
            abstract="",
            primary_tag="",
            tags=[],
            year=0,
            journal=None,
            citations=0,
            source="unknown",
            url="",
        )

    def to_dict(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "title": self.title,
            "authors": self.authors,
            "abstract": self.abstract,
            "primary_tag": self.primary_tag,
            "tags": self.tags,
            "year": self.year,
            "journal": self.journal,
            "citations": self.citations,
            "source": self.source,
            "url": self.url,
        }


def read_jsonl(stream: TextIO) -> Iterator[dict]:
    """Yield one object per well-formed line, skipping a truncated final line.

    A process killed mid-append can leave a partial last line; tolerating it
    lets the idempotent stages resume cleanly.
    """
    for line in stream:
        line = line.strip()
        if not line:
            continue
        try:
            yield json.loads(line)
        except json.JSONDecodeError:
            continue


def write_jsonl(stream: TextIO, rows: Iterable[dict]) -> int:
    n = 0
    for row in rows:
        stream.write(json.dumps(row, sort_keys=True) + "\n")
        n += 1
    return n
