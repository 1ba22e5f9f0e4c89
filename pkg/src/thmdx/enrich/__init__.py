"""Slogan generation and embedding via pluggable model providers."""

from .prompts import (
    DOCUMENT_INSTRUCTION,
    QUERY_INSTRUCTION,
    SLOGAN_SYSTEM_PROMPTS,
    InstructionMode,
    SloganStrategy,
    TextSide,
    apply_task_instruction,
    build_slogan_prompt,
)
from .providers import (
    ChatProviderConfig,
    EmbedFailure,
    EmbedProviderConfig,
    EmbeddingVector,
    MockChatProvider,
    MockEmbedProvider,
    MockRerankProvider,
    RerankProviderConfig,
    Slogan,
    chat_provider_from_config,
    cross_encoder_score,
    embed_batch,
    embed_provider_from_config,
    embed_text,
    generate_slogan,
    rerank_provider_from_config,
)

__all__ = [
    "DOCUMENT_INSTRUCTION",
    "QUERY_INSTRUCTION",
    "SLOGAN_SYSTEM_PROMPTS",
    "ChatProviderConfig",
    "EmbedFailure",
    "EmbedProviderConfig",
    "EmbeddingVector",
    "InstructionMode",
    "MockChatProvider",
    "MockEmbedProvider",
    "MockRerankProvider",
    "RerankProviderConfig",
    "Slogan",
    "SloganStrategy",
    "TextSide",
    "apply_task_instruction",
    "build_slogan_prompt",
    "chat_provider_from_config",
    "cross_encoder_score",
    "embed_batch",
    "embed_provider_from_config",
    "embed_text",
    "generate_slogan",
    "rerank_provider_from_config",
]
