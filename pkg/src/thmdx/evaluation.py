"""Retrieval metrics over single-gold labeled queries.

Each query targets at most one exact statement. Grading is by identifier
equality at two levels: the statement itself, or merely its source document
(a right-paper/wrong-number result counts only at the paper level).
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional, Sequence, TextIO

from .errors import EmptyQuerySet
from .records import read_jsonl

logger = logging.getLogger(__name__)


class Level(str, Enum):
    THEOREM = "theorem"
    PAPER = "paper"


@dataclass
class EvalQuery:
    query_id: str
    query_text: str
    gold_record_id: Optional[str]
    gold_doc_id: str

    def __post_init__(self) -> None:
        if not self.gold_doc_id:
            raise ValueError("gold_doc_id must be non-empty")


@dataclass
class RunResult:
    query_id: str
    ranked_ids: list[tuple[str, str]]  # (record_id, doc_id), best first

    def __post_init__(self) -> None:
        record_ids = [rid for rid, _ in self.ranked_ids]
        if len(record_ids) != len(set(record_ids)):
            raise ValueError(f"duplicate record_ids in run for {self.query_id!r}")


def grade(item: tuple[str, str], gold: EvalQuery, level: Level | str) -> bool:
    """Is one ranked (record_id, doc_id) item a match for the gold label?"""
    record_id, doc_id = item
    if Level(level) is Level.THEOREM:
        return gold.gold_record_id is not None and record_id == gold.gold_record_id
    return doc_id == gold.gold_doc_id


def _ranked(runs: dict[str, RunResult], query_id: str) -> list[tuple[str, str]]:
    run = runs.get(query_id)
    return run.ranked_ids if run is not None else []


def _require(golds: Sequence[EvalQuery], k: int) -> None:
    if not golds:
        raise EmptyQuerySet("no gold queries to evaluate")
    if k < 1:
        raise ValueError("k must be >= 1")


def precision_at_k(
    runs: dict[str, RunResult], golds: Sequence[EvalQuery], k: int, level: Level | str
) -> float:
    """Mean over queries of (matches in top k) / k; absent positions count 0."""
    _require(golds, k)
    total = 0.0
    for gold in golds:
        items = _ranked(runs, gold.query_id)[:k]
        total += sum(1 for item in items if grade(item, gold, level)) / k
    return total / len(golds)


def hit_at_k(
    runs: dict[str, RunResult], golds: Sequence[EvalQuery], k: int, level: Level | str
) -> float:
    """Fraction of queries with at least one match in the top k."""
    _require(golds, k)
    hits = 0
    for gold in golds:
        items = _ranked(runs, gold.query_id)[:k]
        if any(grade(item, gold, level) for item in items):
            hits += 1
    return hits / len(golds)


def mrr_at_k(
    runs: dict[str, RunResult], golds: Sequence[EvalQuery], k: int, level: Level | str
) -> float:
    """Mean reciprocal rank of the first match within the top k; a query with
    no match in the top k contributes 0."""
    _require(golds, k)
    total = 0.0
    for gold in golds:
        items = _ranked(runs, gold.query_id)[:k]
        for position, item in enumerate(items, start=1):
            if grade(item, gold, level):
                total += 1.0 / position
                break
    return total / len(golds)


_METRICS = {"P": precision_at_k, "Hit": hit_at_k, "MRR": mrr_at_k}


@dataclass
class EvalReport:
    """Full metric x k x level grid per system, plus table rendering."""

    ks: list[int]
    levels: list[Level]
    query_count: int
    # system -> level -> "Metric@k" -> value
    grid: dict[str, dict[str, dict[str, float]]] = field(default_factory=dict)

    def cell(self, system: str, level: Level | str, metric: str, k: int) -> float:
        return self.grid[system][Level(level).value][f"{metric}@{k}"]

    def table_columns(self) -> list[str]:
        """The headline presentation: P@kmin, Hit@ the remaining ks, MRR@kmax."""
        ks = sorted(self.ks)
        columns = [f"P@{ks[0]}"]
        columns += [f"Hit@{k}" for k in ks[1:]]
        columns += [f"MRR@{ks[-1]}"]
        return columns

    def to_dict(self) -> dict:
        return {
            "query_count": self.query_count,
            "ks": sorted(self.ks),
            "levels": [lv.value for lv in self.levels],
            "systems": self.grid,
        }

    def to_text(self) -> str:
        columns = self.table_columns()
        systems = sorted(self.grid)
        width = max([len(s) for s in systems] + [len("system")])
        lines = []
        for level in self.levels:
            lines.append(f"[{level.value}-level]  queries={self.query_count}")
            header = "system".ljust(width) + "".join(c.rjust(10) for c in columns)
            lines.append(header)
            lines.append("-" * len(header))
            for system in systems:
                row = system.ljust(width)
                for column in columns:
                    metric, k = column.split("@")
                    row += f"{self.cell(system, level, metric, int(k)):10.3f}"
                lines.append(row)
            lines.append("")
        return "\n".join(lines)


def evaluate(
    system_runs: dict[str, dict[str, RunResult]],
    golds: Sequence[EvalQuery],
    ks: Iterable[int],
    levels: Iterable[Level | str] = (Level.THEOREM, Level.PAPER),
) -> EvalReport:
    """Fill the report grid for every system, k, level, and metric.

    A system missing results for a labeled query is scored as all-miss for
    that query, with a warning.
    """
    ks = sorted(set(int(k) for k in ks))
    levels = [Level(lv) for lv in levels]
    if not golds:
        raise EmptyQuerySet("no gold queries to evaluate")
    if not ks:
        raise ValueError("at least one k is required")

    report = EvalReport(ks=ks, levels=levels, query_count=len(golds))
    for system, runs in system_runs.items():
        missing = [g.query_id for g in golds if g.query_id not in runs]
        if missing:
            logger.warning(
                "system %s lacks results for %d queries (e.g. %s); scoring as misses",
                system, len(missing), missing[0],
            )
        per_level: dict[str, dict[str, float]] = {}
        for level in levels:
            cells: dict[str, float] = {}
            for k in ks:
                for metric_name, fn in _METRICS.items():
                    cells[f"{metric_name}@{k}"] = fn(runs, golds, k, level)
            per_level[level.value] = cells
        report.grid[system] = per_level
    return report


# -- file formats -----------------------------------------------------------


def load_golds(stream: TextIO) -> list[EvalQuery]:
    """golds JSONL: {query_id, query_text, gold_record_id, gold_doc_id}"""
    return [
        EvalQuery(
            query_id=row["query_id"],
            query_text=row.get("query_text", ""),
            gold_record_id=row.get("gold_record_id"),
            gold_doc_id=row["gold_doc_id"],
        )
        for row in read_jsonl(stream)
    ]


def load_runs(stream: TextIO) -> dict[str, RunResult]:
    """runs JSONL: {query_id, rank, record_id, doc_id, score}"""
    rows_by_query: dict[str, list[dict]] = {}
    for row in read_jsonl(stream):
        rows_by_query.setdefault(row["query_id"], []).append(row)
    runs = {}
    for query_id, rows in rows_by_query.items():
        rows.sort(key=lambda r: int(r["rank"]))
        runs[query_id] = RunResult(
            query_id=query_id,
            ranked_ids=[(r["record_id"], r["doc_id"]) for r in rows],
        )
    return runs


def write_runs(stream: TextIO, runs: dict[str, RunResult], scores: Optional[dict] = None) -> None:
    for query_id in sorted(runs):
        for position, (record_id, doc_id) in enumerate(runs[query_id].ranked_ids, start=1):
            row = {
                "query_id": query_id,
                "rank": position,
                "record_id": record_id,
                "doc_id": doc_id,
                "score": (scores or {}).get((query_id, record_id), 0.0),
            }
            stream.write(json.dumps(row, sort_keys=True) + "\n")


def write_report_files(report: EvalReport, directory: str | Path) -> tuple[Path, Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    text_path = directory / "report.txt"
    json_path = directory / "report.json"
    text_path.write_text(report.to_text(), encoding="utf-8")
    json_path.write_text(json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    return text_path, json_path
