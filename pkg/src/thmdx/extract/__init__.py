"""Statement extraction from LaTeX and wikitext sources."""

from .latex import (
    compose_name,
    extract_theorems,
    filter_malformed,
    first_section_text,
    normalize_environment_name,
)
from .macros import MACRO_PASS_LIMIT, MacroTable, build_macro_table, expand_macros
from .wikitext import clean_wikitext, extract_document, extract_wikitext

__all__ = [
    "MACRO_PASS_LIMIT",
    "MacroTable",
    "build_macro_table",
    "clean_wikitext",
    "compose_name",
    "expand_macros",
    "extract_document",
    "extract_theorems",
    "extract_wikitext",
    "filter_malformed",
    "first_section_text",
    "normalize_environment_name",
]
