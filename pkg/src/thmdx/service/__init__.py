"""Pipeline orchestration, HTTP serving, and the thmdx CLI."""

from .app import FeedbackLog, compute_facets, create_app
from .config import ServiceConfig, load_config
from .engine import SearchEngine, hit_payload
from .pipeline import cmd_embed, cmd_index, cmd_ingest, cmd_sloganize, load_corpus

__all__ = [
    "FeedbackLog",
    "SearchEngine",
    "ServiceConfig",
    "cmd_embed",
    "cmd_index",
    "cmd_ingest",
    "cmd_sloganize",
    "compute_facets",
    "create_app",
    "hit_payload",
    "load_config",
    "load_corpus",
]
