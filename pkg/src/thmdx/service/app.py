"""HTTP API: search, theorem lookup, facets, and feedback.

The index is loaded once at startup and served immutably; reload means
restart (or atomic swap behind a new process). Handlers are synchronous and
run in the framework's worker pool over the read-only snapshot.
"""

from __future__ import annotations

import json
import threading
import time
from contextlib import asynccontextmanager
from collections import Counter
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .. import API_VERSION
from ..index import SearchFilters, VectorIndex
from .config import ServiceConfig
from .engine import SearchEngine, hit_payload

_VERDICTS = {"up", "down"}


class FeedbackLog:
    """Append-only feedback sink with one serialized writer.

    Timestamps are clamped monotone within the file so log order is
    trustworthy even across clock hiccups.
    """

    def __init__(self, path: Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._last_ts = 0.0

    def append(self, query_text: str, record_id: str, verdict: str) -> dict:
        with self._lock:
            timestamp = max(time.time(), self._last_ts)
            self._last_ts = timestamp
            event = {
                "timestamp": timestamp,
                "query_text": query_text,
                "record_id": record_id,
                "verdict": verdict,
            }
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with self.path.open("a", encoding="utf-8") as stream:
                stream.write(json.dumps(event) + "\n")
        return event


class FiltersModel(BaseModel):
    thm_types: Optional[list[str]] = None
    authors: Optional[list[str]] = None
    tags: Optional[list[str]] = None
    doc_id: Optional[str] = None
    year_range: Optional[list[int]] = Field(default=None, min_length=2, max_length=2)
    published_only: Optional[bool] = None


class SearchRequestModel(BaseModel):
    query: str
    k: Optional[int] = None
    filters: Optional[FiltersModel] = None
    citation_weight: float = 0.0
    use_reranker: bool = False


class FeedbackModel(BaseModel):
    query_text: str = ""
    record_id: str
    verdict: str


def compute_facets(index: VectorIndex, top_authors: int = 50) -> dict:
    """Distinct filterable values present in the corpus."""
    type_counts: Counter[str] = Counter()
    tag_set: set[str] = set()
    author_counts: Counter[str] = Counter()
    years: list[int] = []
    statuses: set[str] = set()
    for row in index.meta_rows():
        type_counts[row.get("thm_type", "theorem")] += 1
        paper = row.get("paper", {})
        tag_set.update(paper.get("tags", []))
        author_counts.update(paper.get("authors", []))
        year = paper.get("year")
        if year:
            years.append(int(year))
        statuses.add("published" if paper.get("journal") else "preprint")
    ranked_authors = sorted(author_counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return {
        "count": index.count,
        "thm_types": dict(sorted(type_counts.items())),
        "tags": sorted(tag_set),
        "authors": [
            {"name": name, "count": count} for name, count in ranked_authors[:top_authors]
        ],
        "years": {"min": min(years), "max": max(years)} if years else None,
        "publication_statuses": sorted(statuses),
    }


def create_app(
    config: ServiceConfig,
    index: Optional[VectorIndex] = None,
    defer_index: bool = False,
) -> FastAPI:
    @asynccontextmanager
    async def lifespan(running: FastAPI):
        if running.state.engine is None and not defer_index:
            loaded = VectorIndex.load(config.index_path)
            running.state.engine = SearchEngine.from_config(config, loaded)
            running.state.facets = compute_facets(loaded)
        yield

    app = FastAPI(title="thmdx", version=API_VERSION, lifespan=lifespan)

    if config.allowed_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=config.allowed_origins,
            allow_methods=["*"],
            allow_headers=["*"],
        )

    app.state.engine = None
    app.state.facets = None
    app.state.feedback = FeedbackLog(config.feedback_log_path)

    def attach_index(loaded: VectorIndex) -> None:
        app.state.engine = SearchEngine.from_config(config, loaded)
        app.state.facets = compute_facets(loaded)

    if index is not None:
        attach_index(index)

    @app.exception_handler(RequestValidationError)
    def malformed_body(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"detail": "malformed request body", "api_version": API_VERSION},
        )

    def error(status: int, message: str) -> JSONResponse:
        return JSONResponse(
            status_code=status, content={"detail": message, "api_version": API_VERSION}
        )

    @app.post("/api/search")
    def api_search(body: SearchRequestModel):
        engine: SearchEngine = app.state.engine
        if engine is None:
            return error(503, "index is loading")
        if not body.query.strip():
            return error(400, "query must be non-empty")

        warning = None
        k = body.k if body.k is not None else config.default_k
        if k < 1:
            return error(400, f"k must be >= 1, got {k}")
        if k > config.max_k:
            warning = f"k clamped from {k} to max_k={config.max_k}"
            k = config.max_k

        started = time.perf_counter()
        hits = engine.run(
            body.query,
            k=k,
            filters=SearchFilters.from_dict(
                body.filters.model_dump() if body.filters else None
            ),
            citation_weight=body.citation_weight,
            use_reranker=body.use_reranker,
        )
        took_ms = (time.perf_counter() - started) * 1000.0
        payload = {
            "hits": [hit_payload(engine.index, h) for h in hits],
            "took_ms": took_ms,
            "api_version": API_VERSION,
        }
        if warning:
            payload["warning"] = warning
        return payload

    @app.get("/api/theorem/{record_id}")
    def api_theorem(record_id: str):
        engine: SearchEngine = app.state.engine
        if engine is None:
            return error(503, "index is loading")
        if record_id not in engine.index:
            return error(404, f"unknown record_id {record_id!r}")
        row = engine.index.meta_row(record_id)
        return {**row, "api_version": API_VERSION}

    @app.get("/api/facets")
    def api_facets():
        if app.state.facets is None:
            return error(503, "index is loading")
        return {**app.state.facets, "api_version": API_VERSION}

    @app.post("/api/feedback", status_code=202)
    def api_feedback(body: FeedbackModel):
        if body.verdict not in _VERDICTS:
            return error(400, f"verdict must be one of {sorted(_VERDICTS)}")
        app.state.feedback.append(body.query_text, body.record_id, body.verdict)
        return {"status": "accepted", "api_version": API_VERSION}

    if config.static_dir and Path(config.static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=str(config.static_dir), html=True), name="ui")

    return app
