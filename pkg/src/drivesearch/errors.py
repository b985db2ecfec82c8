"""Exception hierarchy shared across the package.

Every error carries a stable ``code`` string that the HTTP layer maps into
its JSON error body, so callers can branch on codes instead of messages.
"""

from __future__ import annotations


class DriveSearchError(Exception):
    """Base class for all domain errors."""

    code = "internal_error"


# --- corpus / catalog ---

class DuplicateRecord(DriveSearchError):
    code = "duplicate_record"


class InvalidFrame(DriveSearchError):
    code = "invalid_frame"


class NotFound(DriveSearchError):
    code = "not_found"


# --- ingest ---

class EmptyTable(DriveSearchError):
    code = "empty_table"


class EmptySpan(DriveSearchError):
    code = "empty_span"


class EmptyVideo(DriveSearchError):
    code = "empty_video"


class UnsupportedFormat(DriveSearchError):
    code = "unsupported_format"


# --- describer ---

class NoRulesApplied(DriveSearchError):
    code = "no_rules_applied"


class UnknownPrompt(DriveSearchError):
    code = "unknown_prompt"


class MissingFixture(DriveSearchError):
    code = "missing_fixture"


class BackendUnavailable(DriveSearchError):
    code = "backend_unavailable"

    def __init__(self, message: str, status: int | None = None):
        super().__init__(message)
        self.status = status


class EmptyDescription(DriveSearchError):
    code = "empty_description"


# --- similarity index ---

class EmptyText(DriveSearchError):
    code = "empty_text"


class ProviderUnavailable(DriveSearchError):
    code = "provider_unavailable"

    def __init__(self, message: str, status: int | None = None):
        super().__init__(message)
        self.status = status


class DimMismatch(DriveSearchError):
    code = "dim_mismatch"


class DuplicateEntry(DriveSearchError):
    code = "duplicate_entry"


class MixedSource(DriveSearchError):
    code = "mixed_source"


class CorruptIndex(DriveSearchError):
    code = "corrupt_index"


class FingerprintMismatch(DriveSearchError):
    code = "fingerprint_mismatch"


# --- metrics ---

class EmptySeries(DriveSearchError):
    code = "empty_series"


# --- query engine ---

class EmptyCorpus(DriveSearchError):
    code = "empty_corpus"
