"""Shared fixtures: a configured pipeline workspace over the fixture corpus."""

from pathlib import Path

import pytest

from thmdx.service.config import load_config

FIXTURES = Path(__file__).parent / "fixtures"

CONFIG_TEMPLATE = """\
[service]
listen_address = "127.0.0.1:8787"
default_k = 10
max_k = 66
feedback_log_path = "feedback.jsonl"
index_path = "index"

[pipeline]
corpus_paths = ["{corpus}"]
work_dir = "artifacts"
paper_meta_path = "{meta}"
slogan_strategy = "body_only"

[embed_provider]
endpoint_url = "mock://embed"
model_name = "mock-embedder"
dimension = 64
instruction_mode = "unprompted"

[chat_provider]
endpoint_url = "mock://chat"
model_name = "mock-chat"

[rerank_provider]
endpoint_url = "mock://rerank"
model_name = "mock-rerank"
"""


def write_config(directory: Path) -> Path:
    path = directory / "config.toml"
    path.write_text(
        CONFIG_TEMPLATE.format(
            corpus=(FIXTURES / "corpus").as_posix(),
            meta=(FIXTURES / "meta.jsonl").as_posix(),
        )
    )
    return path


def run_pipeline(config):
    from thmdx.service.pipeline import cmd_embed, cmd_index, cmd_ingest, cmd_sloganize

    ingest = cmd_ingest(config)
    sloganize = cmd_sloganize(config)
    embed = cmd_embed(config)
    index = cmd_index(config)
    return ingest, sloganize, embed, index


@pytest.fixture
def workspace(tmp_path):
    return load_config(write_config(tmp_path))


@pytest.fixture(scope="session")
def built_workspace(tmp_path_factory):
    """Full pipeline over the fixture corpus, built once per session."""
    root = tmp_path_factory.mktemp("built")
    config = load_config(write_config(root))
    run_pipeline(config)
    return config
