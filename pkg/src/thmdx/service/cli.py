"""Command-line entry point: corpus pipeline, serving, and evaluation.

Exit codes: 0 success, 1 fatal error, 2 usage error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from ..evaluation import (
    RunResult,
    evaluate,
    load_golds,
    load_runs,
    write_report_files,
    write_runs,
)
from ..index import VectorIndex
from .config import ServiceConfig, load_config
from .engine import SearchEngine
from .pipeline import cmd_embed, cmd_index, cmd_ingest, cmd_sloganize

logger = logging.getLogger(__name__)


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="thmdx", description="theorem statement search engine"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in [
        ("ingest", "extract theorem records from the corpus"),
        ("sloganize", "generate slogans for extracted records"),
        ("embed", "embed slogans with the configured provider"),
        ("index", "build the on-disk vector index"),
        ("serve", "serve the HTTP API"),
    ]:
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, type=Path)

    ev = sub.add_parser("eval", help="score labeled queries")
    ev.add_argument("--config", type=Path, help="needed unless --runs files are given")
    ev.add_argument("--golds", required=True, type=Path)
    ev.add_argument("--runs", nargs="*", type=Path, default=[])
    ev.add_argument("--k", default="1,10,20", help="comma-separated cutoffs")
    ev.add_argument("--levels", default="theorem,paper")
    ev.add_argument("--out", type=Path, help="report directory (default: work_dir/eval)")
    return parser


def _run_eval(args: argparse.Namespace) -> int:
    with args.golds.open(encoding="utf-8") as stream:
        golds = load_golds(stream)
    ks = [int(part) for part in str(args.k).split(",") if part]
    levels = [part.strip() for part in str(args.levels).split(",") if part.strip()]

    system_runs = {}
    out_dir = args.out
    if args.runs:
        for path in args.runs:
            with path.open(encoding="utf-8") as stream:
                system_runs[path.stem] = load_runs(stream)
        out_dir = out_dir or Path.cwd() / "eval"
    else:
        if not args.config:
            print("eval needs --config (live index) or --runs files", file=sys.stderr)
            return 2
        config = load_config(args.config)
        engine = SearchEngine.from_config(config, VectorIndex.load(config.index_path))
        k_max = max(ks)
        runs = {}
        for gold in golds:
            hits = engine.run(gold.query_text, k=k_max)
            runs[gold.query_id] = RunResult(
                query_id=gold.query_id,
                ranked_ids=[
                    (h.record_id, engine.index.meta_row(h.record_id)["doc_id"]) for h in hits
                ],
            )
        system_name = config.embed_provider.model_name
        system_runs[system_name] = runs
        out_dir = out_dir or config.work_dir / "eval"
        out_dir.mkdir(parents=True, exist_ok=True)
        with (out_dir / f"runs_{system_name}.jsonl").open("w", encoding="utf-8") as stream:
            write_runs(stream, runs)

    report = evaluate(system_runs, golds, ks=ks, levels=levels)
    text_path, json_path = write_report_files(report, out_dir)
    print(report.to_text())
    print(f"wrote {text_path} and {json_path}")
    return 0


def _run_serve(config: ServiceConfig) -> int:
    import uvicorn

    from .app import create_app

    host, _, port = config.listen_address.partition(":")
    app = create_app(config)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8787))
    return 0


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = _parser().parse_args(argv)

    try:
        if args.command == "eval":
            return _run_eval(args)

        config = load_config(args.config)
        if args.command == "ingest":
            written, totals = cmd_ingest(config)
            print(
                f"extracted={totals.extracted} filtered_short={totals.filtered_short} "
                f"filtered_suffix={totals.filtered_suffix} "
                f"unmatched={totals.unmatched_delimiters} new_records={written}"
            )
            if totals.extracted == 0:
                print("no records extracted", file=sys.stderr)
                return 1
            return 0
        if args.command == "sloganize":
            generated, skipped, failed = cmd_sloganize(config)
            print(f"generated={generated} skipped={skipped} failed={failed}")
            return 0
        if args.command == "embed":
            embedded, skipped, failed = cmd_embed(config)
            print(f"embedded={embedded} skipped={skipped} failed={failed}")
            return 0
        if args.command == "index":
            count, rebuilt = cmd_index(config)
            print(f"indexed={count} rebuilt={rebuilt}")
            return 0
        if args.command == "serve":
            return _run_serve(config)
    except Exception as exc:
        logger.error("%s", exc)
        return 1
    return 2


if __name__ == "__main__":
    sys.exit(main())
