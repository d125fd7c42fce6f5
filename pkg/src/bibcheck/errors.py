"""Exception hierarchy shared across the package."""

from __future__ import annotations


class BibcheckError(Exception):
    """Base class for all errors raised by this package."""


class PathSyntaxError(BibcheckError):
    """Malformed selector expression.

    Carries the zero-based character position where parsing failed.
    """

    def __init__(self, text: str, position: int, reason: str):
        super().__init__(f"bad selector {text!r} at position {position}: {reason}")
        self.text = text
        self.position = position
        self.reason = reason


class SchemaError(BibcheckError):
    """Structurally invalid schema document (unknown key, wrong value type)."""


class SchemaSyntaxError(SchemaError):
    """Unparseable schema document (bad YAML-like or JSON syntax)."""


class CompileError(BibcheckError):
    """Semantic schema violations, collected exhaustively before raising."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = list(violations)


class RegexError(BibcheckError):
    """Pattern rejected by the linear-time regex dialect."""


class InvalidUrl(BibcheckError):
    """Value could not be interpreted as an HTTP(S) URL."""


class NetworkError(BibcheckError):
    """Fetch failed: timeout, DNS, connection or protocol error."""


class UnsupportedFormat(BibcheckError):
    """Image bytes do not start with a recognizable PNG/GIF/JPEG signature."""


class TruncatedHeader(BibcheckError):
    """Image header ended before the dimensions could be decoded."""


class MissingIndex(BibcheckError):
    """A unique constraint was evaluated without a uniqueness index."""
