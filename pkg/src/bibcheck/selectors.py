"""Addressing languages: MARCspec and PICA Path subsets, CSV columns, JSON pointers.

Grammars accepted here (anything else is a :class:`PathSyntaxError`):

    MARCspec subset:   spec := tag (charrange | subfield | indicator)?
                       tag := [0-9]{3} | "LDR"
                       charrange := "/" INT ("-" INT)?
                       subfield := "$" [a-z0-9]
                       indicator := "^" ("1"|"2")
    PICA Path subset:  spec := tag ("/" [0-9]{2,3})? (("$"|".") [A-Za-z0-9])?
                       tag := [0-9]{3} [A-Z@]
    Column:            any non-empty string, matched verbatim against the header
    JSON pointer:      RFC 6901, plus a "*" segment that fans out over arrays
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import PathSyntaxError
from .values import AtomicValue, DataRecord, FieldOccurrence, SourceFormat


class SelectorLanguage(enum.Enum):
    MARCSPEC = "MARCSPEC"
    PICAPATH = "PICAPATH"
    COLUMN = "COLUMN"
    JSONPOINTER = "JSONPOINTER"


@dataclass(frozen=True, slots=True)
class CompiledSelector:
    """Parsed form of one selector expression.

    Only the slots relevant to ``language`` are populated; ``source_text``
    always re-parses to an equal selector.
    """

    language: SelectorLanguage
    source_text: str
    tag: str | None = None
    subfield: str | None = None
    char_start: int | None = None
    char_end: int | None = None
    indicator: int | None = None
    occurrence: str | None = None
    column: str | None = None
    segments: tuple[str, ...] | None = None


_DIGITS = frozenset("0123456789")
_MARC_CODES = frozenset("abcdefghijklmnopqrstuvwxyz0123456789")
_PICA_TAG4 = frozenset("ABCDEFGHIJKLMNOPQRSTUVWXYZ@")
_PICA_CODES = frozenset("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789")


def _ascii_digits(s: str) -> bool:
    return bool(s) and all(c in _DIGITS for c in s)


def parse_marcspec(text: str) -> CompiledSelector:
    """Parse a MARCspec subset expression such as ``040$a`` or ``008/7-10``."""
    if text.startswith("LDR"):
        tag, rest, pos = "LDR", text[3:], 3
    else:
        if len(text) < 3 or not _ascii_digits(text[:3]):
            raise PathSyntaxError(text, min(len(text), 3), "expected a 3-digit tag or LDR")
        tag, rest, pos = text[:3], text[3:], 3

    if not rest:
        return CompiledSelector(SelectorLanguage.MARCSPEC, text, tag=tag)
    head = rest[0]
    if head == "$":
        code = rest[1:]
        if len(code) != 1 or code not in _MARC_CODES:
            raise PathSyntaxError(text, pos + 1, "expected a single subfield code [a-z0-9]")
        return CompiledSelector(SelectorLanguage.MARCSPEC, text, tag=tag, subfield=code)
    if head == "/":
        lo, sep, hi = rest[1:].partition("-")
        if not _ascii_digits(lo):
            raise PathSyntaxError(text, pos + 1, "expected a character position")
        if sep and not _ascii_digits(hi):
            raise PathSyntaxError(text, pos + 1 + len(lo) + 1, "expected a range end position")
        start = int(lo)
        end = int(hi) if sep else start
        return CompiledSelector(SelectorLanguage.MARCSPEC, text, tag=tag, char_start=start, char_end=end)
    if head == "^":
        ind = rest[1:]
        if ind not in ("1", "2"):
            raise PathSyntaxError(text, pos + 1, "indicator accessor must be ^1 or ^2")
        return CompiledSelector(SelectorLanguage.MARCSPEC, text, tag=tag, indicator=int(ind))
    raise PathSyntaxError(text, pos, "expected end of spec, '$', '/' or '^' after the tag")


def parse_picapath(text: str) -> CompiledSelector:
    """Parse a PICA Path subset expression such as ``021A$a`` or ``003@.0``."""
    if len(text) < 4 or not _ascii_digits(text[:3]) or text[3] not in _PICA_TAG4:
        raise PathSyntaxError(text, min(len(text), 4), "expected a tag of 3 digits plus [A-Z@]")
    tag, rest, pos = text[:4], text[4:], 4

    occurrence = None
    if rest.startswith("/"):
        occ_len = 0
        while 1 + occ_len < len(rest) and rest[1 + occ_len] in _DIGITS:
            occ_len += 1
        if occ_len not in (2, 3):
            raise PathSyntaxError(text, pos + 1, "occurrence must be 2 or 3 digits")
        occurrence = rest[1 : 1 + occ_len]
        rest = rest[1 + occ_len :]
        pos += 1 + occ_len

    if not rest:
        return CompiledSelector(SelectorLanguage.PICAPATH, text, tag=tag, occurrence=occurrence)
    if rest[0] in ("$", "."):
        code = rest[1:]
        if len(code) != 1 or code not in _PICA_CODES:
            raise PathSyntaxError(text, pos + 1, "expected a single alphanumeric subfield code")
        return CompiledSelector(
            SelectorLanguage.PICAPATH, text, tag=tag, occurrence=occurrence, subfield=code
        )
    raise PathSyntaxError(text, pos, "expected end of spec, '$' or '.' after the tag")


def parse_column(text: str) -> CompiledSelector:
    """Any non-empty string names a CSV column; no trimming is applied."""
    if text == "":
        raise PathSyntaxError(text, 0, "column name must be non-empty")
    return CompiledSelector(SelectorLanguage.COLUMN, text, column=text)


def parse_jsonpointer(text: str) -> CompiledSelector:
    """Parse an RFC 6901 pointer; a ``*`` segment addresses all array elements."""
    if not text.startswith("/"):
        raise PathSyntaxError(text, 0, "pointer must start with '/'")
    segments: list[str] = []
    current: list[str] = []
    i = 1
    while i <= len(text):
        if i == len(text) or text[i] == "/":
            segments.append("".join(current))
            current = []
            i += 1
            continue
        ch = text[i]
        if ch == "~":
            if i + 1 >= len(text) or text[i + 1] not in ("0", "1"):
                raise PathSyntaxError(text, i, "bad escape, expected ~0 or ~1")
            current.append("~" if text[i + 1] == "0" else "/")
            i += 2
        else:
            current.append(ch)
            i += 1
    return CompiledSelector(SelectorLanguage.JSONPOINTER, text, segments=tuple(segments))


_PARSERS = {
    SourceFormat.MARC: parse_marcspec,
    SourceFormat.PICA: parse_picapath,
    SourceFormat.CSV: parse_column,
    SourceFormat.JSON: parse_jsonpointer,
}

LANGUAGE_FOR_FORMAT = {
    SourceFormat.MARC: SelectorLanguage.MARCSPEC,
    SourceFormat.PICA: SelectorLanguage.PICAPATH,
    SourceFormat.CSV: SelectorLanguage.COLUMN,
    SourceFormat.JSON: SelectorLanguage.JSONPOINTER,
}


def parse_for_format(fmt: SourceFormat, text: str) -> CompiledSelector:
    """Parse ``text`` with the addressing language implied by ``fmt``."""
    return _PARSERS[fmt](text)


def evaluate(selector: CompiledSelector, record: DataRecord) -> list[AtomicValue]:
    """Return every occurrence the selector addresses, in source order.

    Never mutates the record; absence (including fully out-of-range
    character slices) is an empty list.
    """
    lang = selector.language
    if lang is SelectorLanguage.MARCSPEC:
        return _eval_marc(selector, record.fields)
    if lang is SelectorLanguage.PICAPATH:
        return _eval_pica(selector, record.fields)
    if lang is SelectorLanguage.COLUMN:
        return [
            AtomicValue(raw=f.value)
            for f in record.fields
            if f.tag == selector.column and f.value is not None
        ]
    return _eval_pointer(selector, record.document)


def _eval_marc(sel: CompiledSelector, fields: tuple[FieldOccurrence, ...]) -> list[AtomicValue]:
    out: list[AtomicValue] = []
    for f in fields:
        if f.tag != sel.tag:
            continue
        if sel.subfield is not None:
            out.extend(AtomicValue(raw=v) for code, v in f.subfields if code == sel.subfield)
        elif sel.char_start is not None:
            # Slices address control-field values only; clamp to the
            # available text, a fully out-of-range slice is absence.
            if f.value is not None:
                piece = f.value[sel.char_start : sel.char_end + 1]
                if piece:
                    out.append(AtomicValue(raw=piece))
        elif sel.indicator is not None:
            if f.value is None:
                out.append(AtomicValue(raw=f.indicator1 if sel.indicator == 1 else f.indicator2))
        else:
            if f.value is not None:
                out.append(AtomicValue(raw=f.value))
            else:
                out.extend(AtomicValue(raw=v) for _, v in f.subfields)
    return out


def _eval_pica(sel: CompiledSelector, fields: tuple[FieldOccurrence, ...]) -> list[AtomicValue]:
    out: list[AtomicValue] = []
    for f in fields:
        if f.tag != sel.tag:
            continue
        if sel.occurrence is not None:
            # "/00" also matches fields written without an occurrence.
            if f.occurrence != sel.occurrence and not (sel.occurrence == "00" and f.occurrence is None):
                continue
        if sel.subfield is not None:
            out.extend(AtomicValue(raw=v) for code, v in f.subfields if code == sel.subfield)
        else:
            out.extend(AtomicValue(raw=v) for _, v in f.subfields)
    return out


def _eval_pointer(sel: CompiledSelector, document: AtomicValue | None) -> list[AtomicValue]:
    if document is None:
        return []
    nodes = [document]
    for segment in sel.segments:
        nxt: list[AtomicValue] = []
        for node in nodes:
            if not node.children:
                continue
            if node.children[0].key is not None:  # object: children are keyed members
                nxt.extend(c for c in node.children if c.key == segment)
            elif segment == "*":
                nxt.extend(node.children)
            elif _ascii_digits(segment):
                idx = int(segment)
                if idx < len(node.children):
                    nxt.append(node.children[idx])
        nodes = nxt
    return [n for n in nodes if not n.is_null]
