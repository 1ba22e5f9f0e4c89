"""Batch pipeline stages: ingest -> sloganize -> embed -> index.

Every stage is idempotent by skipping work units already present in its
output sidecar, so a killed run resumes to the same completed set as a clean
run. Sidecars are append-only JSON lines.
"""

from __future__ import annotations

import json
import logging
import os
import shutil
from pathlib import Path
from typing import Optional

from ..enrich import (
    InstructionMode,
    TextSide,
    apply_task_instruction,
    build_slogan_prompt,
    chat_provider_from_config,
    embed_batch,
    embed_provider_from_config,
    generate_slogan,
)
from ..enrich.providers import EmbedFailure
from ..errors import MissingContext, ProviderError, VersionMismatch
from ..extract import extract_document, first_section_text
from ..index import HnswParams, VectorIndex
from ..records import (
    DocFormat,
    ParseReport,
    PaperMeta,
    RawDocument,
    TheoremRecord,
    read_jsonl,
)
from .config import ServiceConfig

logger = logging.getLogger(__name__)

_LATEX_SUFFIXES = {".tex"}
_WIKITEXT_SUFFIXES = {".wiki", ".wikitext"}


def _open_append(path: Path):
    """Append handle that first repairs a torn final line (crash mid-write)."""
    needs_newline = False
    if path.exists() and path.stat().st_size > 0:
        with path.open("rb") as probe:
            probe.seek(-1, 2)
            needs_newline = probe.read(1) != b"\n"
    handle = path.open("a", encoding="utf-8")
    if needs_newline:
        handle.write("\n")
    return handle


def _split_preamble(text: str) -> tuple[str, str]:
    marker = "\\begin{document}"
    at = text.find(marker)
    if at < 0:
        return "", text
    return text[:at], text[at + len(marker) :]


def _document_from_file(path: Path) -> Optional[RawDocument]:
    text = path.read_text(encoding="utf-8", errors="replace")
    if not text.strip():
        return None
    if path.suffix in _LATEX_SUFFIXES:
        preamble, body = _split_preamble(text)
        return RawDocument(doc_id=path.stem, format=DocFormat.LATEX, preamble=preamble, body=body)
    if path.suffix in _WIKITEXT_SUFFIXES:
        return RawDocument(doc_id=path.stem, format=DocFormat.WIKITEXT, preamble="", body=text)
    return None


def load_corpus(paths: list[Path]) -> list[RawDocument]:
    """Documents from .tex/.wiki directories and JSONL corpus files, in a
    deterministic order."""
    docs: list[RawDocument] = []
    for root in paths:
        root = Path(root)
        if root.is_dir():
            for path in sorted(root.rglob("*")):
                if path.is_file():
                    doc = _document_from_file(path)
                    if doc is not None:
                        docs.append(doc)
        elif root.suffix == ".jsonl":
            with root.open(encoding="utf-8") as stream:
                for row in read_jsonl(stream):
                    docs.append(
                        RawDocument(
                            doc_id=row["doc_id"],
                            format=DocFormat(row["format"]),
                            preamble=row.get("preamble", ""),
                            body=row["body"],
                            source_url=row.get("source_url"),
                        )
                    )
        elif root.is_file():
            doc = _document_from_file(root)
            if doc is not None:
                docs.append(doc)
        else:
            logger.warning("corpus path %s does not exist; skipping", root)
    return docs


def _load_processed_docs(report_path: Path) -> dict[str, dict]:
    if not report_path.exists():
        return {}
    return json.loads(report_path.read_text(encoding="utf-8")).get("docs", {})


def cmd_ingest(config: ServiceConfig) -> tuple[int, ParseReport]:
    """Extract records from every corpus document; returns (new records,
    corpus-total report). Already-ingested doc_ids are skipped."""
    config.work_dir.mkdir(parents=True, exist_ok=True)
    docs = load_corpus(config.corpus_paths)
    processed = _load_processed_docs(config.report_path)

    written = 0
    with _open_append(config.records_path) as records_out, _open_append(
        config.sections_path
    ) as sections_out:
        for doc in docs:
            if doc.doc_id in processed:
                continue
            try:
                records, report = extract_document(doc)
            except Exception as exc:
                logger.error("failed to parse %s: %s", doc.doc_id, exc)
                continue
            for record in records:
                records_out.write(record.to_json() + "\n")
                written += 1
            if doc.format is DocFormat.LATEX:
                section = first_section_text(doc.body)
                if section:
                    sections_out.write(
                        json.dumps({"doc_id": doc.doc_id, "first_section": section}) + "\n"
                    )
            processed[doc.doc_id] = report.to_dict()

    totals = ParseReport(doc_id="*")
    for row in processed.values():
        totals = totals.merge(
            ParseReport(
                doc_id=row["doc_id"],
                extracted=row["extracted"],
                filtered_short=row["filtered_short"],
                filtered_suffix=row["filtered_suffix"],
                unmatched_delimiters=row["unmatched_delimiters"],
                macros_skipped=row.get("macros_skipped", 0),
            )
        )
    config.report_path.write_text(
        json.dumps({"docs": processed, "totals": totals.to_dict()}, indent=2, sort_keys=True)
        + "\n",
        encoding="utf-8",
    )
    return written, totals


def _load_records(config: ServiceConfig) -> list[TheoremRecord]:
    with config.records_path.open(encoding="utf-8") as stream:
        return [TheoremRecord.from_dict(row) for row in read_jsonl(stream)]


def load_paper_meta(config: ServiceConfig) -> dict[str, PaperMeta]:
    if config.paper_meta_path is None or not config.paper_meta_path.exists():
        return {}
    with config.paper_meta_path.open(encoding="utf-8") as stream:
        return {row["doc_id"]: PaperMeta.from_dict(row) for row in read_jsonl(stream)}


def _load_sections(config: ServiceConfig) -> dict[str, str]:
    if not config.sections_path.exists():
        return {}
    with config.sections_path.open(encoding="utf-8") as stream:
        return {row["doc_id"]: row["first_section"] for row in read_jsonl(stream)}


def _existing_ids(path: Path) -> set[str]:
    if not path.exists():
        return set()
    with path.open(encoding="utf-8") as stream:
        return {row["record_id"] for row in read_jsonl(stream)}


def cmd_sloganize(config: ServiceConfig) -> tuple[int, int, int]:
    """Generate slogans for records missing from the sidecar.

    Returns (generated, skipped, failed); failures are logged and do not
    abort the stage.
    """
    records = _load_records(config)
    done = _existing_ids(config.slogans_path)
    meta = load_paper_meta(config)
    sections = _load_sections(config)
    provider = chat_provider_from_config(config.chat_provider)
    strategy = config.slogan_strategy

    generated = failed = 0
    with _open_append(config.slogans_path) as out:
        for record in records:
            if record.record_id in done:
                continue
            paper = meta.get(record.doc_id)
            try:
                prompt = build_slogan_prompt(
                    strategy,
                    record.body,
                    abstract=paper.abstract if paper else None,
                    first_section=sections.get(record.doc_id),
                )
                slogan = generate_slogan(provider, prompt, record.record_id, strategy.value)
            except (MissingContext, ProviderError) as exc:
                logger.warning("slogan failed for %s: %s", record.record_id, exc)
                failed += 1
                continue
            out.write(
                json.dumps(
                    {
                        "record_id": slogan.record_id,
                        "strategy": slogan.strategy,
                        "text": slogan.text,
                    }
                )
                + "\n"
            )
            generated += 1
    return generated, len(done), failed


def _load_slogans(config: ServiceConfig) -> dict[str, str]:
    if not config.slogans_path.exists():
        return {}
    with config.slogans_path.open(encoding="utf-8") as stream:
        return {row["record_id"]: row["text"] for row in read_jsonl(stream)}


def cmd_embed(config: ServiceConfig) -> tuple[int, int, int]:
    """Embed instruction-prefixed slogans not yet in the embeddings sidecar."""
    provider = embed_provider_from_config(config.embed_provider)
    dimension = config.embed_provider.dimension

    if config.embeddings_path.exists():
        with config.embeddings_path.open(encoding="utf-8") as stream:
            for row in read_jsonl(stream):
                if int(row["dim"]) != dimension:
                    raise VersionMismatch(
                        f"embeddings sidecar has dim {row['dim']}, provider dim {dimension}"
                    )
                break
    manifest_path = config.index_path / "manifest.json"
    if manifest_path.exists():
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        if int(manifest["dimension"]) != dimension:
            raise VersionMismatch(
                f"existing index has dim {manifest['dimension']}, provider dim {dimension}"
            )

    slogans = _load_slogans(config)
    done = _existing_ids(config.embeddings_path)
    todo = [(rid, text) for rid, text in slogans.items() if rid not in done]
    todo.sort()

    texts = [
        apply_task_instruction(text, TextSide.DOCUMENT, config.embed_provider.instruction_mode)
        for _, text in todo
    ]
    results = embed_batch(provider, texts, record_ids=[rid for rid, _ in todo])

    embedded = failed = 0
    with _open_append(config.embeddings_path) as out:
        for result in results:
            if isinstance(result, EmbedFailure):
                logger.warning("embedding failed for %s: %s", result.record_id, result.error)
                failed += 1
                continue
            out.write(
                json.dumps(
                    {
                        "record_id": result.record_id,
                        "dim": len(result.values),
                        "values": result.values,
                    }
                )
                + "\n"
            )
            embedded += 1
    return embedded, len(done), failed


def build_meta_row(record: TheoremRecord, slogan: str, paper: PaperMeta) -> dict:
    row = {
        "record_id": record.record_id,
        "doc_id": record.doc_id,
        "thm_type": record.thm_type.value,
        "ref_number": record.ref_number,
        "note": record.note,
        "label": record.label,
        "name": record.name,
        "slogan": slogan,
        "body": record.body,
        "source_url": record.source_url or paper.url or None,
        "numbered_by": record.numbered_by.value,
        "paper": paper.to_dict(),
    }
    return row


def cmd_index(config: ServiceConfig, params: Optional[HnswParams] = None) -> tuple[int, bool]:
    """Build the on-disk index from records + slogans + embeddings + metadata.

    Returns (count, rebuilt). Skips the rebuild when the existing index
    already covers exactly the embedded record set.
    """
    records = {r.record_id: r for r in _load_records(config)}
    slogans = _load_slogans(config)
    meta = load_paper_meta(config)

    embeddings: list[tuple[str, list[float]]] = []
    with config.embeddings_path.open(encoding="utf-8") as stream:
        for row in read_jsonl(stream):
            embeddings.append((row["record_id"], row["values"]))

    target_ids = [rid for rid, _ in embeddings if rid in records]
    manifest_path = config.index_path / "manifest.json"
    if manifest_path.exists():
        try:
            existing = VectorIndex.load(config.index_path)
            if set(existing.record_ids()) == set(target_ids):
                return existing.count, False
        except Exception as exc:
            logger.warning("existing index unreadable (%s); rebuilding", exc)

    dimension = config.embed_provider.dimension
    index = VectorIndex(dimension, params or HnswParams())
    for record_id, values in embeddings:
        record = records.get(record_id)
        if record is None:
            logger.warning("embedding for unknown record %s; skipping", record_id)
            continue
        paper = meta.get(record.doc_id) or PaperMeta.placeholder(record.doc_id)
        row = build_meta_row(record, slogans.get(record_id, ""), paper)
        index.add(record_id, values, row)

    staging = config.index_path.with_name(config.index_path.name + ".tmp")
    if staging.exists():
        shutil.rmtree(staging)
    index.save(staging)
    if config.index_path.exists():
        shutil.rmtree(config.index_path)
    os.rename(staging, config.index_path)
    return index.count, True
