"""Pipeline stages over the fixture corpus: goldens, idempotence, determinism."""

import json
from pathlib import Path

import pytest

from thmdx.enrich import EmbedProviderConfig
from thmdx.errors import VersionMismatch
from thmdx.evaluation import Level, RunResult, evaluate, load_golds
from thmdx.index import VectorIndex
from thmdx.service.cli import main as cli_main
from thmdx.service.config import load_config
from thmdx.service.engine import SearchEngine
from thmdx.service.pipeline import (
    cmd_embed,
    cmd_index,
    cmd_ingest,
    cmd_sloganize,
    load_corpus,
)

from conftest import FIXTURES, run_pipeline, write_config

GOLDEN_RECORDS = FIXTURES / "golden" / "records.jsonl"


class TestIngest:
    def test_golden_byte_match(self, workspace):
        written, totals = cmd_ingest(workspace)
        assert written == 45
        got = workspace.records_path.read_text(encoding="utf-8")
        assert got == GOLDEN_RECORDS.read_text(encoding="utf-8")

    def test_golden_tallies(self, workspace):
        _, totals = cmd_ingest(workspace)
        assert totals.extracted == 45
        assert totals.filtered_short == 4
        assert totals.filtered_suffix == 2
        assert totals.unmatched_delimiters == 2
        assert totals.macros_skipped == 1

    def test_rerun_is_noop(self, workspace):
        cmd_ingest(workspace)
        first = workspace.records_path.read_text()
        written, totals = cmd_ingest(workspace)
        assert written == 0
        assert totals.extracted == 45  # totals still reported from the ledger
        assert workspace.records_path.read_text() == first

    def test_mixed_formats_dispatch(self, workspace):
        cmd_ingest(workspace)
        rows = [
            json.loads(line) for line in workspace.records_path.read_text().splitlines()
        ]
        doc_ids = {row["doc_id"] for row in rows}
        assert "2001.00001v1" in doc_ids  # latex
        assert "PW-Euclids-Lemma" in doc_ids  # wikitext

    def test_empty_corpus_extracts_nothing(self, tmp_path):
        config = load_config(write_config(tmp_path))
        object.__setattr__(config, "corpus_paths", [tmp_path / "empty"])
        (tmp_path / "empty").mkdir()
        written, totals = cmd_ingest(config)
        assert written == 0
        assert totals.extracted == 0

    def test_sections_sidecar_written(self, workspace):
        cmd_ingest(workspace)
        rows = [
            json.loads(line)
            for line in workspace.sections_path.read_text().splitlines()
        ]
        by_doc = {row["doc_id"]: row["first_section"] for row in rows}
        assert by_doc["2001.00001v1"].startswith(
            "We study cyclic groups and lattices in real vector spaces."
        )


class TestSloganize:
    def test_mock_slogans_are_first_sentences(self, workspace):
        cmd_ingest(workspace)
        generated, skipped, failed = cmd_sloganize(workspace)
        assert (generated, skipped, failed) == (45, 0, 0)
        rows = {
            json.loads(line)["record_id"]: json.loads(line)
            for line in workspace.slogans_path.read_text().splitlines()
        }
        assert rows["2001.00001v1#1"]["text"] == "Every group of prime order is cyclic."
        assert rows["2001.00001v1#6"]["text"] == (
            "Every lattice in \\mathbb{R}^n is a free abelian group of rank n."
        )
        assert rows["2001.00001v1#1"]["strategy"] == "body_only"

    def test_rerun_skips_existing(self, workspace):
        cmd_ingest(workspace)
        cmd_sloganize(workspace)
        generated, skipped, failed = cmd_sloganize(workspace)
        assert (generated, skipped) == (0, 45)
        lines = workspace.slogans_path.read_text().splitlines()
        assert len(lines) == 45


class TestEmbed:
    def test_embeds_all_slogans(self, workspace):
        cmd_ingest(workspace)
        cmd_sloganize(workspace)
        embedded, skipped, failed = cmd_embed(workspace)
        assert (embedded, skipped, failed) == (45, 0, 0)
        rows = [json.loads(l) for l in workspace.embeddings_path.read_text().splitlines()]
        assert all(row["dim"] == 64 for row in rows)
        assert all(len(row["values"]) == 64 for row in rows)

    def test_rerun_skips_existing(self, workspace):
        cmd_ingest(workspace)
        cmd_sloganize(workspace)
        cmd_embed(workspace)
        embedded, skipped, _ = cmd_embed(workspace)
        assert (embedded, skipped) == (0, 45)

    def test_resume_after_partial_write(self, workspace):
        cmd_ingest(workspace)
        cmd_sloganize(workspace)
        cmd_embed(workspace)
        full = workspace.embeddings_path.read_text()
        # Simulate a crash mid-append: keep 10 whole lines plus a torn line.
        lines = full.splitlines()
        torn = "\n".join(lines[:10]) + "\n" + lines[10][: len(lines[10]) // 2]
        workspace.embeddings_path.write_text(torn)
        embedded, skipped, failed = cmd_embed(workspace)
        assert skipped == 10
        assert embedded == 35
        assert failed == 0
        resumed = set()
        for line in workspace.embeddings_path.read_text().splitlines():
            try:
                resumed.add(json.loads(line)["record_id"])
            except json.JSONDecodeError:
                continue  # the torn line stays in the file; readers skip it
        original = {json.loads(l)["record_id"] for l in full.splitlines()}
        assert resumed == original

    def test_dimension_mismatch_vs_sidecar_refused(self, workspace):
        cmd_ingest(workspace)
        cmd_sloganize(workspace)
        cmd_embed(workspace)
        workspace.embed_provider.dimension = 32
        with pytest.raises(VersionMismatch):
            cmd_embed(workspace)

    def test_dimension_mismatch_vs_index_refused(self, workspace):
        run_pipeline(workspace)
        # New sidecar, same index: provider dimension now disagrees with the
        # index manifest.
        workspace.embeddings_path.unlink()
        object.__setattr__(
            workspace,
            "embed_provider",
            EmbedProviderConfig(
                endpoint_url="mock://embed",
                model_name="mock-embedder",
                dimension=32,
                instruction_mode="unprompted",
            ),
        )
        with pytest.raises(VersionMismatch):
            cmd_embed(workspace)


class TestIndexStage:
    def test_index_built_and_loadable(self, workspace):
        run_pipeline(workspace)
        index = VectorIndex.load(workspace.index_path)
        assert index.count == 45
        assert index.dimension == 64

    def test_rerun_skips_rebuild(self, workspace):
        run_pipeline(workspace)
        manifest_before = (workspace.index_path / "manifest.json").read_bytes()
        count, rebuilt = cmd_index(workspace)
        assert count == 45
        assert rebuilt is False
        assert (workspace.index_path / "manifest.json").read_bytes() == manifest_before

    def test_two_clean_runs_byte_identical(self, tmp_path):
        (tmp_path / "a").mkdir()
        (tmp_path / "b").mkdir()
        config_a = load_config(write_config(tmp_path / "a"))
        config_b = load_config(write_config(tmp_path / "b"))
        run_pipeline(config_a)
        run_pipeline(config_b)
        for name in ("manifest.json", "vectors.bin", "codes.bin", "graph.bin", "meta.jsonl"):
            assert (config_a.index_path / name).read_bytes() == (
                config_b.index_path / name
            ).read_bytes(), name

    def test_meta_rows_carry_paper_fields(self, built_workspace):
        index = VectorIndex.load(built_workspace.index_path)
        row = index.meta_row("2001.00001v1#1")
        assert row["paper"]["title"] == "Cyclic Groups and Lattices"
        assert row["paper"]["citations"] == 42
        assert row["slogan"] == "Every group of prime order is cyclic."
        assert row["name"] == "Theorem 1"

    def test_placeholder_meta_for_unknown_doc(self, built_workspace):
        index = VectorIndex.load(built_workspace.index_path)
        row = index.meta_row("PW-Too-Short#1") if "PW-Too-Short#1" in index else None
        assert row is None  # filtered out: never indexed


class TestEndToEndRetrieval:
    def test_exact_slogan_queries_hit_rank_one(self, built_workspace):
        index = VectorIndex.load(built_workspace.index_path)
        engine = SearchEngine.from_config(built_workspace, index)
        with (FIXTURES / "golds.jsonl").open() as stream:
            golds = load_golds(stream)
        assert len(golds) == 6
        for gold in golds:
            hits = engine.run(gold.query_text, k=1)
            assert hits[0].record_id == gold.gold_record_id, gold.query_id

    def test_eval_hit_at_1_is_one(self, built_workspace):
        index = VectorIndex.load(built_workspace.index_path)
        engine = SearchEngine.from_config(built_workspace, index)
        with (FIXTURES / "golds.jsonl").open() as stream:
            golds = load_golds(stream)
        runs = {}
        for gold in golds:
            hits = engine.run(gold.query_text, k=20)
            runs[gold.query_id] = RunResult(
                query_id=gold.query_id,
                ranked_ids=[
                    (h.record_id, index.meta_row(h.record_id)["doc_id"]) for h in hits
                ],
            )
        report = evaluate({"mock-embedder": runs}, golds, ks=[1, 10, 20])
        assert report.cell("mock-embedder", Level.THEOREM, "Hit", 1) == 1.0
        assert report.cell("mock-embedder", Level.PAPER, "Hit", 1) == 1.0
        assert report.cell("mock-embedder", Level.THEOREM, "MRR", 20) == 1.0


class TestCli:
    def test_full_pipeline_via_cli(self, tmp_path, capsys):
        config_path = write_config(tmp_path)
        for command in ("ingest", "sloganize", "embed", "index"):
            code = cli_main([command, "--config", str(config_path)])
            assert code == 0, capsys.readouterr()
        assert (tmp_path / "index" / "manifest.json").exists()

    def test_eval_cli_live_index(self, tmp_path, capsys):
        config_path = write_config(tmp_path)
        for command in ("ingest", "sloganize", "embed", "index"):
            assert cli_main([command, "--config", str(config_path)]) == 0
        code = cli_main(
            [
                "eval",
                "--config", str(config_path),
                "--golds", str(FIXTURES / "golds.jsonl"),
                "--k", "1,10,20",
            ]
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "theorem-level" in out
        report = json.loads((tmp_path / "artifacts" / "eval" / "report.json").read_text())
        assert report["systems"]["mock-embedder"]["theorem"]["Hit@1"] == 1.0

    def test_eval_cli_runs_files(self, tmp_path, capsys):
        runs_path = tmp_path / "sysA.jsonl"
        with runs_path.open("w") as f:
            f.write(
                json.dumps(
                    {"query_id": "g1", "rank": 1,
                     "record_id": "2001.00001v1#1", "doc_id": "2001.00001v1", "score": 1.0}
                )
                + "\n"
            )
        golds_path = tmp_path / "golds.jsonl"
        golds_path.write_text(
            json.dumps(
                {"query_id": "g1", "query_text": "q",
                 "gold_record_id": "2001.00001v1#1", "gold_doc_id": "2001.00001v1"}
            )
            + "\n"
        )
        code = cli_main(
            ["eval", "--golds", str(golds_path), "--runs", str(runs_path),
             "--out", str(tmp_path / "report")]
        )
        assert code == 0
        report = json.loads((tmp_path / "report" / "report.json").read_text())
        assert report["systems"]["sysA"]["theorem"]["P@1"] == 1.0

    def test_usage_error_exit_code(self):
        with pytest.raises(SystemExit) as exc:
            cli_main(["bogus-command"])
        assert exc.value.code == 2

    def test_missing_config_is_fatal(self, tmp_path):
        assert cli_main(["ingest", "--config", str(tmp_path / "nope.toml")]) == 1


def test_load_corpus_deterministic_order():
    docs_a = [d.doc_id for d in load_corpus([FIXTURES / "corpus"])]
    docs_b = [d.doc_id for d in load_corpus([FIXTURES / "corpus"])]
    assert docs_a == docs_b == sorted(docs_a)
