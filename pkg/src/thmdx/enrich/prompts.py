"""Slogan-generation prompts and embedding task instructions.

The strings below are load-bearing: retrieval quality was tuned against them
and tests byte-compare them, so edit with care.
"""

from __future__ import annotations

from enum import Enum
from typing import Optional

from ..errors import MissingContext


class SloganStrategy(str, Enum):
    BODY_ONLY = "body_only"
    BODY_ABSTRACT = "body_abstract"
    BODY_INTRODUCTION = "body_introduction"


_COMMON_RULES = (
    "Summaries are accurate and at most four sentences. "
    "Summaries are plain ASCII sentences with no Unicode. "
    "Describe the result without referencing it as 'this theorem' or similar. "
    "Avoid LaTeX and mathematical symbols; use words instead. "
    "Output only the final summary sentences, with no reasoning, explanations, "
    "or commentary. "
    "Do not restate the prompt, input fields, or instructions. "
    "Do not include proof steps, motivation, or background discussion."
)

SLOGAN_SYSTEM_PROMPTS: dict[SloganStrategy, str] = {
    SloganStrategy.BODY_ONLY: (
        "You generate summaries of math theorems based on theorem_body. " + _COMMON_RULES
    ),
    SloganStrategy.BODY_ABSTRACT: (
        "You generate summaries of math theorems based on theorem_body. "
        "You also consider paper_summary in your summaries. " + _COMMON_RULES
    ),
    SloganStrategy.BODY_INTRODUCTION: (
        "You generate summaries of math theorems based on theorem_body. "
        "You also consider paper_summary and the first section of the paper "
        "in your summaries. " + _COMMON_RULES
    ),
}

DOCUMENT_INSTRUCTION = (
    "Instruct: Represent the given math statement for retrieving related "
    "statement by natural language query.\nQuery:"
)

QUERY_INSTRUCTION = (
    "Instruct: Given a math search query, retrieve theorems mathematically "
    "equivalent to the query.\nQuery:"
)


class InstructionMode(str, Enum):
    PROMPTED = "prompted"
    UNPROMPTED = "unprompted"


class TextSide(str, Enum):
    DOCUMENT = "document"
    QUERY = "query"


def build_slogan_prompt(
    strategy: SloganStrategy,
    theorem_body: str,
    abstract: Optional[str] = None,
    first_section: Optional[str] = None,
) -> tuple[str, str]:
    """Assemble (system_text, user_text) for a slogan request.

    The user text lists labeled context fields; which fields are required
    depends on the strategy.
    """
    if strategy is not SloganStrategy.BODY_ONLY and abstract is None:
        raise MissingContext(f"strategy {strategy.value} requires an abstract")
    if strategy is SloganStrategy.BODY_INTRODUCTION and first_section is None:
        raise MissingContext("strategy body_introduction requires the first section")

    lines = [f"theorem_body: {theorem_body}"]
    if strategy is not SloganStrategy.BODY_ONLY:
        lines.append(f"paper_summary: {abstract}")
    if strategy is SloganStrategy.BODY_INTRODUCTION:
        lines.append(f"first_section: {first_section}")
    return SLOGAN_SYSTEM_PROMPTS[strategy], "\n".join(lines)


def apply_task_instruction(
    text: str,
    side: TextSide | str,
    mode: InstructionMode | str,
) -> str:
    """Prefix the side-specific retrieval instruction, or pass through."""
    if InstructionMode(mode) is InstructionMode.UNPROMPTED:
        return text
    if TextSide(side) is TextSide.DOCUMENT:
        return DOCUMENT_INSTRUCTION + text
    return QUERY_INSTRUCTION + text
