"""Acceptance gate: every criterion at its stated tolerance.

Each test prints one [ACCEPTANCE] line on success; a failure surfaces as a
normal pytest failure. Run with `pytest tests/test_acceptance.py -v -s`.
"""

import json
import math
import random
import threading
import time
from urllib.parse import quote

import numpy as np
import pytest
from fastapi.testclient import TestClient

from thmdx.enrich import (
    DOCUMENT_INSTRUCTION,
    QUERY_INSTRUCTION,
    SLOGAN_SYSTEM_PROMPTS,
    SloganStrategy,
)
from thmdx.errors import ChecksumMismatch
from thmdx.evaluation import (
    Level,
    RunResult,
    evaluate,
    hit_at_k,
    load_golds,
    mrr_at_k,
    precision_at_k,
)
from thmdx.index import (
    HnswParams,
    SearchFilters,
    VectorIndex,
    candidate_pool_size,
    composite_score,
    quantize,
    search,
)
from thmdx.service.app import create_app
from thmdx.service.config import load_config
from thmdx.service.engine import SearchEngine
from thmdx.service.pipeline import cmd_embed, cmd_index, cmd_ingest, cmd_sloganize

from conftest import FIXTURES, write_config
from test_evaluation import (
    as_plain,
    oracle_hit,
    oracle_mrr,
    oracle_precision,
    synth,
)


def ok(name: str) -> None:
    print(f"\n[ACCEPTANCE] {name}: PASS")


# ---------------------------------------------------------------------------


def test_metric_oracle_suite():
    """P/Hit/MRR on >= 50 random run/gold sets match the brute-force grader to
    1e-12; the hand-computed cases reproduce exactly; < 5 s."""
    started = time.perf_counter()

    for seed in range(50):
        golds, runs = synth(seed, n_queries=10)
        per_items, per_gold = as_plain(golds, runs)
        for level in ("theorem", "paper"):
            for k in (1, 5, 10, 20):
                assert abs(
                    precision_at_k(runs, golds, k, level)
                    - oracle_precision(per_items, per_gold, k, level)
                ) <= 1e-12
                assert abs(
                    hit_at_k(runs, golds, k, level)
                    - oracle_hit(per_items, per_gold, k, level)
                ) <= 1e-12
                assert abs(
                    mrr_at_k(runs, golds, k, level)
                    - oracle_mrr(per_items, per_gold, k, level)
                ) <= 1e-12

    # Hand-computed values, frozen: ranks {2, 5, miss} at k=5 and
    # {1, 4, miss} at k=20 over 3 queries each.
    from test_evaluation import TestHandComputedCases

    helper = TestHandComputedCases()
    golds, runs = helper.golds_and_runs([2, 5, None])
    assert precision_at_k(runs, golds, 5, Level.THEOREM) == pytest.approx(
        2.0 / 15.0, abs=1e-15
    )
    golds, runs = helper.golds_and_runs([1, 4, None])
    assert mrr_at_k(runs, golds, 20, Level.THEOREM) == pytest.approx(
        (1 + 0.25) / 3.0, abs=1e-15
    )

    elapsed = time.perf_counter() - started
    assert elapsed < 5.0, f"metric suite took {elapsed:.2f}s"
    ok(f"metric oracle suite (50 random sets, 1e-12; {elapsed:.2f}s < 5s)")


def test_single_gold_identities():
    """P@k = Hit@k/k, MRR@k <= Hit@k, paper-level Hit >= theorem-level Hit
    hold on all random sets."""
    for seed in range(50):
        golds, runs = synth(seed, n_queries=10, distinct_docs=True)
        for level in ("theorem", "paper"):
            for k in (1, 5, 10, 20):
                assert precision_at_k(runs, golds, k, level) == pytest.approx(
                    hit_at_k(runs, golds, k, level) / k, abs=1e-12
                )
                assert (
                    mrr_at_k(runs, golds, k, level)
                    <= hit_at_k(runs, golds, k, level) + 1e-15
                )
        for k in (1, 5, 10, 20):
            assert hit_at_k(runs, golds, k, Level.PAPER) >= hit_at_k(
                runs, golds, k, Level.THEOREM
            )
    ok("single-gold identities (50 random sets)")


def test_pool_formula_exhaustive():
    """candidate_pool_size(k) = clamp(max(200, 12k), 200, 800) for k = 1..200."""
    for k in range(1, 201):
        expected = min(max(200, 12 * k), 800)
        assert candidate_pool_size(k) == expected, k
    ok("pool formula exhaustive k=1..200")


def test_composite_score_properties():
    """Exact neutral cases; monotonicity over 10^4 random triples; lambda=0
    full-order invariance vs cosine sort on 100 random candidate sets."""
    assert composite_score(0.8, 0, 0.5) == 0.8
    assert composite_score(0.8, 100, 0.0) == 0.8
    assert composite_score(-0.25, 0, 2.0) == -0.25

    rng = np.random.default_rng(101)
    for _ in range(10_000):
        cos = float(rng.uniform(-1, 1))
        lam = float(rng.uniform(0, 2))
        citations = int(rng.integers(0, 100_000))
        assert composite_score(cos, citations + 1, lam) >= composite_score(
            cos, citations, lam
        )
        if lam > 0 and citations >= 1:
            assert composite_score(cos, citations + 1, lam) > composite_score(
                cos, citations, lam
            )

    for trial in range(100):
        trial_rng = np.random.default_rng(500 + trial)
        n = int(trial_rng.integers(5, 60))
        cosines = trial_rng.uniform(-1, 1, size=n)
        citations = trial_rng.integers(0, 10_000, size=n)
        ids = [f"c{i:03d}" for i in range(n)]
        by_cosine = sorted(ids, key=lambda i: (-cosines[int(i[1:])], i))
        by_composite = sorted(
            ids,
            key=lambda i: (-composite_score(cosines[int(i[1:])], int(citations[int(i[1:])]), 0.0), i),
        )
        assert by_cosine == by_composite
    ok("composite score: neutrality, monotonicity (10^4), lambda=0 order invariance (100 sets)")


def test_ann_recall_10k_dim256():
    """HNSW-over-Hamming recall@10 >= 0.95 vs brute force on 10,000 random
    256-dim vectors at default params; build+query < 60 s."""
    dim = 256
    n = 10_000
    n_queries = 100
    rng = np.random.default_rng(7)
    vectors = rng.standard_normal((n, dim))
    queries = rng.standard_normal((n_queries, dim))

    started = time.perf_counter()
    index = VectorIndex(dim, HnswParams(rng_seed=42))
    for i in range(n):
        index.add(f"r{i:05d}", vectors[i], {"record_id": f"r{i:05d}"})

    # Independent oracle: sign rule and popcount recomputed from scratch.
    bits = (vectors >= 0).astype(np.uint8)
    packed = np.packbits(bits, axis=1, bitorder="little")
    words = packed.view(np.uint64)

    overlap = 0
    for qi in range(n_queries):
        q = queries[qi]
        q_bits = (q >= 0).astype(np.uint8)
        q_words = np.packbits(q_bits, bitorder="little").view(np.uint64)
        dists = np.bitwise_count(words ^ q_words).sum(axis=1)
        exact = sorted(zip(dists.tolist(), (f"r{i:05d}" for i in range(n))))[:10]
        exact_ids = {rid for _, rid in exact}
        approx_ids = set(index.ann_candidates(quantize(q), pool=10))
        overlap += len(exact_ids & approx_ids)
    elapsed = time.perf_counter() - started

    recall = overlap / (10 * n_queries)
    assert recall >= 0.95, f"recall@10 = {recall:.4f}"
    assert elapsed < 60.0, f"build+query took {elapsed:.1f}s"
    ok(f"ANN recall@10 = {recall:.3f} >= 0.95 on 10k x 256d ({elapsed:.1f}s < 60s)")


def test_two_stage_fidelity():
    """With lambda=0 the final top-k ordering equals the exact-cosine ordering
    of the filtered candidate pool on 100 random queries (identical id
    sequences)."""
    dim = 32
    rng = np.random.default_rng(21)
    index = VectorIndex(dim, HnswParams(m=8, ef_construction=64, rng_seed=3))
    for i in range(2000):
        rid = f"r{i:04d}"
        index.add(
            rid,
            rng.standard_normal(dim),
            {
                "record_id": rid,
                "doc_id": f"p{i % 40}",
                "thm_type": ["theorem", "lemma", "proposition", "corollary"][i % 4],
                "paper": {
                    "authors": [f"a{i % 11}"],
                    "tags": ["t1"] if i % 2 else ["t2"],
                    "year": 2000 + (i % 25),
                    "journal": "J" if i % 3 == 0 else None,
                    "citations": i % 500,
                },
            },
        )

    filter_cycle = [
        SearchFilters(),
        SearchFilters(thm_types={"lemma", "theorem"}),
        SearchFilters(tags={"t1"}, year_range=(2005, 2020)),
        SearchFilters(published_only=True),
    ]
    k = 15
    for trial in range(100):
        q = np.random.default_rng(900 + trial).standard_normal(dim)
        filters = filter_cycle[trial % len(filter_cycle)]
        hits = search(index, q, k=k, filters=filters, citation_weight=0.0)

        pool_ids = index.ann_candidates(quantize(q, dim), candidate_pool_size(k))
        surviving = [rid for rid in pool_ids if filters.matches(index.meta_row(rid))]

        def naive_cosine(rid):
            v = index.vector(rid)
            dot = nq = nv = 0.0
            for a, b in zip(q, v):
                dot += float(a) * float(b)
                nq += float(a) * float(a)
                nv += float(b) * float(b)
            return dot / math.sqrt(nq * nv)

        expected = sorted(surviving, key=lambda rid: (-naive_cosine(rid), rid))[:k]
        assert [h.record_id for h in hits] == expected, f"trial {trial}"
    ok("two-stage fidelity: lambda=0 ordering equals exact-cosine oracle (100 queries)")


def test_end_to_end_with_mocks(tmp_path):
    """Fixture corpus -> golden counts and tallies; exact-slogan queries give
    theorem-level Hit@1 = 1.0 with the deterministic mock embedder; < 30 s."""
    started = time.perf_counter()
    config = load_config(write_config(tmp_path))

    written, totals = cmd_ingest(config)
    assert written == 45
    assert totals.extracted == 45
    assert totals.filtered_short == 4
    assert totals.filtered_suffix == 2
    assert totals.unmatched_delimiters == 2

    generated, _, failed = cmd_sloganize(config)
    assert (generated, failed) == (45, 0)
    embedded, _, failed = cmd_embed(config)
    assert (embedded, failed) == (45, 0)
    count, rebuilt = cmd_index(config)
    assert (count, rebuilt) == (45, True)

    index = VectorIndex.load(config.index_path)
    engine = SearchEngine.from_config(config, index)
    with (FIXTURES / "golds.jsonl").open() as stream:
        golds = load_golds(stream)
    runs = {}
    for gold in golds:
        hits = engine.run(gold.query_text, k=20)
        runs[gold.query_id] = RunResult(
            query_id=gold.query_id,
            ranked_ids=[(h.record_id, index.meta_row(h.record_id)["doc_id"]) for h in hits],
        )
    report = evaluate({"engine": runs}, golds, ks=[1, 10, 20])
    assert report.cell("engine", Level.THEOREM, "Hit", 1) == 1.0

    elapsed = time.perf_counter() - started
    assert elapsed < 30.0, f"pipeline took {elapsed:.1f}s"
    ok(f"end-to-end with mocks: golden tallies + Hit@1 = 1.0 ({elapsed:.1f}s < 30s)")


def test_parser_goldens(tmp_path):
    """Extraction over the fixture corpus byte-matches the golden JSONL."""
    config = load_config(write_config(tmp_path))
    cmd_ingest(config)
    got = config.records_path.read_bytes()
    want = (FIXTURES / "golden" / "records.jsonl").read_bytes()
    assert got == want

    text = got.decode()
    assert '"name": "Theorem 3.9 (Shokurov reduction)"' in text
    assert "\\\\mathbb{R}^n" in text  # \R expanded inside a JSON string
    rows = [json.loads(line) for line in text.splitlines()]
    assert all(len(r["body"]) >= 8 for r in rows)
    assert not any(r["body"].endswith((" and", " let")) for r in rows)
    ok("parser goldens byte-match (45 records, name format, macro expansion, filters)")


def test_prompt_and_instruction_goldens():
    """The three slogan prompts and two task instructions byte-match the
    golden files."""
    golden_dir = FIXTURES / "golden" / "prompts"
    pairs = [
        (SLOGAN_SYSTEM_PROMPTS[SloganStrategy.BODY_ONLY], "slogan_body_only.txt"),
        (SLOGAN_SYSTEM_PROMPTS[SloganStrategy.BODY_ABSTRACT], "slogan_body_abstract.txt"),
        (
            SLOGAN_SYSTEM_PROMPTS[SloganStrategy.BODY_INTRODUCTION],
            "slogan_body_introduction.txt",
        ),
        (DOCUMENT_INSTRUCTION, "instruction_document.txt"),
        (QUERY_INSTRUCTION, "instruction_query.txt"),
    ]
    for text, filename in pairs:
        assert text.encode("ascii") == (golden_dir / filename).read_bytes(), filename
    ok("prompt/instruction goldens byte-match (3 prompts + 2 instructions)")


def test_persistence_round_trip(tmp_path):
    """save -> load -> search identity on 100 random queries; corrupted file
    rejected via checksum."""
    dim = 48
    rng = np.random.default_rng(33)
    index = VectorIndex(dim, HnswParams(m=8, ef_construction=48, rng_seed=5))
    for i in range(500):
        rid = f"r{i:04d}"
        index.add(rid, rng.standard_normal(dim), {
            "record_id": rid, "doc_id": f"p{i % 10}", "thm_type": "theorem",
            "paper": {"citations": i, "tags": [], "authors": [], "year": 2020, "journal": None},
        })
    index.save(tmp_path / "idx")
    loaded = VectorIndex.load(tmp_path / "idx")
    for trial in range(100):
        q = np.random.default_rng(2000 + trial).standard_normal(dim)
        a = search(index, q, k=10, citation_weight=0.05)
        b = search(loaded, q, k=10, citation_weight=0.05)
        assert [(h.record_id, h.rank, h.cosine, h.composite) for h in a] == [
            (h.record_id, h.rank, h.cosine, h.composite) for h in b
        ]

    codes_file = tmp_path / "idx" / "codes.bin"
    codes_file.write_bytes(codes_file.read_bytes()[:-7])
    with pytest.raises(ChecksumMismatch):
        VectorIndex.load(tmp_path / "idx")
    ok("persistence: save/load/search identity (100 queries) + checksum rejection")


def test_api_contract(built_workspace):
    """Documented request/response shapes; filter soundness on every test
    query; 100 concurrent feedback posts yield 100 intact log lines."""
    app = create_app(built_workspace)
    hit_fields = {"record_id", "name", "slogan", "body", "cosine", "composite", "rank", "paper"}
    paper_fields = {"title", "authors", "url", "tags", "year", "journal", "citations"}

    with TestClient(app) as client:
        queries = [
            {"query": "Every group of prime order is cyclic.", "k": 5},
            {"query": "sequences converge", "k": 10,
             "filters": {"thm_types": ["lemma"]}},
            {"query": "surfaces", "k": 8,
             "filters": {"tags": ["math.AG"], "year_range": [2019, 2022]}},
            {"query": "models", "k": 4,
             "filters": {"published_only": True}, "citation_weight": 0.2},
            {"query": "fields", "k": 6, "use_reranker": True},
        ]
        for payload in queries:
            response = client.post("/api/search", json=payload)
            assert response.status_code == 200
            body = response.json()
            assert body["api_version"] == "1"
            assert body["took_ms"] >= 0
            assert len(body["hits"]) <= payload["k"]
            for hit in body["hits"]:
                assert set(hit) == hit_fields
                assert set(hit["paper"]) == paper_fields
                detail = client.get(
                    f"/api/theorem/{quote(hit['record_id'], safe='')}"
                ).json()
                filters = payload.get("filters") or {}
                if "thm_types" in filters:
                    assert detail["thm_type"] in filters["thm_types"]
                if "tags" in filters:
                    assert set(detail["paper"]["tags"]) & set(filters["tags"])
                if "year_range" in filters:
                    low, high = filters["year_range"]
                    assert low <= detail["paper"]["year"] <= high
                if filters.get("published_only"):
                    assert detail["paper"]["journal"]

        assert client.post("/api/search", json={"query": ""}).status_code == 400
        assert client.post("/api/search", json={"query": "x", "k": 0}).status_code == 400
        assert client.get("/api/theorem/unknown").status_code == 404
        facets = client.get("/api/facets").json()
        assert sum(facets["thm_types"].values()) == facets["count"] == 45

        log_path = built_workspace.feedback_log_path
        before = len(log_path.read_text().splitlines()) if log_path.exists() else 0
        failures = []

        def vote(i):
            try:
                r = client.post(
                    "/api/feedback",
                    json={"query_text": f"acc{i}", "record_id": f"r{i}", "verdict": "up"},
                )
                assert r.status_code == 202
            except Exception as exc:  # pragma: no cover
                failures.append(exc)

        threads = [threading.Thread(target=vote, args=(i,)) for i in range(100)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert not failures
        lines = log_path.read_text().splitlines()[before:]
        assert len(lines) == 100
        assert {json.loads(line)["query_text"] for line in lines} == {
            f"acc{i}" for i in range(100)
        }
    ok("API contract: shapes, filter soundness, 100 concurrent feedback posts")
