"""Exception types shared across the extraction, enrichment, index, and service layers."""


class ThmdxError(Exception):
    """Base class for all library errors."""


class PassLimitExceeded(ThmdxError):
    """Macro expansion did not reach a fixpoint; the table likely contains a cycle."""


class NoStatementSection(ThmdxError):
    """A wikitext page has section headings but none of them introduces a statement."""


class MissingContext(ThmdxError):
    """A slogan strategy requires a context field that was not supplied."""


class ProviderError(ThmdxError):
    """A remote model provider failed (transport, HTTP status, or malformed payload)."""


class NonAsciiOutput(ProviderError):
    """A chat provider returned non-ASCII text even after the retry."""


class DimensionMismatch(ThmdxError):
    """Vector or code length does not match the index dimension."""


class ZeroVector(ThmdxError):
    """Cosine similarity is undefined for a zero-length vector."""


class DuplicateId(ThmdxError):
    """An entry with this record_id is already present in the index."""


class InvalidK(ThmdxError):
    """Requested result count k is out of range (k must be >= 1)."""


class ChecksumMismatch(ThmdxError):
    """An on-disk index file does not match the checksum recorded in the manifest."""


class VersionMismatch(ThmdxError):
    """On-disk artifact was produced by an incompatible format or dimension."""


class EmptyQuerySet(ThmdxError):
    """Evaluation was requested over an empty set of gold queries."""
