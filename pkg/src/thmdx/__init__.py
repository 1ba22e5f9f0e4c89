"""thmdx: a self-contained semantic search engine for mathematical theorem
statements — extraction, slogan enrichment, binary-quantized ANN retrieval,
HTTP serving, and retrieval evaluation."""

__version__ = "0.1.0"

API_VERSION = "1"
