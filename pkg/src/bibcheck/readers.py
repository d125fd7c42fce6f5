"""Streaming record readers for the supported serialization formats.

Every reader is single-pass: memory use is bounded by one record, a corrupt
record is skipped with a warning and the stream resumes at the next record
boundary.  Inputs are UTF-8; undecodable bytes become U+FFFD and are counted
in the diagnostics.
"""

from __future__ import annotations

import csv as _csv
import json
import re
from dataclasses import dataclass, field
from typing import BinaryIO, Iterable, Iterator

from .selectors import evaluate, parse_jsonpointer
from .values import AtomicValue, DataRecord, FieldOccurrence, SourceFormat

_FIELD_SEP = 0x1E
_SUBFIELD_SEP = 0x1F
_RECORD_TERMINATOR = 0x1D

_PICA_TAG_RE = re.compile(r"^([0-9]{3}[A-Z@])(?:/([0-9]{2,3}))?$")


@dataclass
class ReaderDiagnostics:
    """Counters and warnings accumulated while a stream is consumed."""

    records_read: int = 0
    records_skipped: int = 0
    warnings: list[tuple[int, str]] = field(default_factory=list)

    def warn(self, ordinal: int, message: str) -> None:
        self.warnings.append((ordinal, message))


def _decode(data: bytes, diag: ReaderDiagnostics, ordinal: int, context: str) -> str:
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError:
        text = data.decode("utf-8", errors="replace")
        diag.warn(ordinal, f"{context}: invalid UTF-8 replaced with U+FFFD")
        return text


def _text_lines(stream, diag: ReaderDiagnostics) -> Iterator[str]:
    """Yield text lines (terminators kept) from a text or byte source."""
    it = iter(stream)
    try:
        first = next(it)
    except StopIteration:
        return
    if isinstance(first, bytes):
        for lineno, raw in enumerate(_chain(first, it), start=1):
            yield _decode(raw, diag, lineno, f"line {lineno}")
    else:
        yield first
        yield from it


def _chain(first, rest):
    yield first
    yield from rest


# ---------------------------------------------------------------------------
# ISO 2709 binary MARC
# ---------------------------------------------------------------------------


def read_iso2709(stream: BinaryIO, diagnostics: ReaderDiagnostics | None = None) -> Iterator[DataRecord]:
    """Parse ISO 2709 framed records: 24-byte leader, directory, data fields.

    Framing errors (non-numeric lengths, missing terminator, directory
    pointing outside the data area) skip the record; parsing resumes after
    the next 0x1D record terminator.
    """
    diag = diagnostics if diagnostics is not None else ReaderDiagnostics()
    buf = bytearray()
    ordinal = 0

    def fill(n: int) -> bool:
        while len(buf) < n:
            chunk = stream.read(65536)
            if not chunk:
                return False
            buf.extend(chunk)
        return True

    def resync() -> None:
        # Drop bytes up to and including the next record terminator.
        while True:
            pos = buf.find(_RECORD_TERMINATOR)
            if pos >= 0:
                del buf[: pos + 1]
                return
            buf.clear()
            chunk = stream.read(65536)
            if not chunk:
                return
            buf.extend(chunk)

    while True:
        while buf and buf[0] in b"\r\n ":
            del buf[0]
        if not fill(24):
            if buf:
                ordinal += 1
                diag.warn(ordinal, "truncated leader at end of input")
                diag.records_skipped += 1
            return
        ordinal += 1
        leader = bytes(buf[:24])
        if not leader[0:5].isdigit() or not leader[12:17].isdigit():
            diag.warn(ordinal, "corrupt leader: record length or base address not numeric")
            diag.records_skipped += 1
            resync()
            continue
        length = int(leader[0:5])
        base = int(leader[12:17])
        if length < 25 or base < 25 or base > length:
            diag.warn(ordinal, "corrupt leader: implausible record length or base address")
            diag.records_skipped += 1
            resync()
            continue
        if not fill(length):
            diag.warn(ordinal, "record shorter than its declared length")
            diag.records_skipped += 1
            resync()
            continue
        record_bytes = bytes(buf[:length])
        del buf[:length]
        if record_bytes[-1] != _RECORD_TERMINATOR:
            diag.warn(ordinal, "missing record terminator")
            diag.records_skipped += 1
            buf[:0] = record_bytes  # rescan this extent for the true boundary
            resync()
            continue
        record = _parse_iso2709_record(record_bytes, base, ordinal, diag)
        if record is None:
            diag.records_skipped += 1
            continue
        diag.records_read += 1
        yield record


def _parse_iso2709_record(
    record_bytes: bytes, base: int, ordinal: int, diag: ReaderDiagnostics
) -> DataRecord | None:
    leader = record_bytes[:24]
    if leader[9:10] != b"a":
        diag.warn(ordinal, "leader/09 is not 'a'; MARC-8 input is not transcoded")
    directory = record_bytes[24 : base - 1]
    if record_bytes[base - 1] != _FIELD_SEP or len(directory) % 12 != 0:
        diag.warn(ordinal, "corrupt directory: bad terminator or entry size")
        return None
    data = record_bytes[base:-1]
    fields: list[FieldOccurrence] = [
        FieldOccurrence(tag="LDR", value=_decode(leader, diag, ordinal, "leader"))
    ]
    for i in range(0, len(directory), 12):
        entry = directory[i : i + 12]
        tag = _decode(entry[0:3], diag, ordinal, "directory tag")
        if not entry[3:7].isdigit() or not entry[7:12].isdigit():
            diag.warn(ordinal, f"corrupt directory entry for tag {tag}")
            return None
        field_len = int(entry[3:7])
        field_start = int(entry[7:12])
        if field_start + field_len > len(data):
            diag.warn(ordinal, f"directory length of field {tag} does not match data")
            return None
        chunk = data[field_start : field_start + field_len]
        if chunk.endswith(b"\x1e"):
            chunk = chunk[:-1]
        if tag < "010":
            fields.append(FieldOccurrence(tag=tag, value=_decode(chunk, diag, ordinal, f"field {tag}")))
            continue
        if len(chunk) < 2:
            diag.warn(ordinal, f"data field {tag} shorter than its indicators")
            continue
        ind1 = _decode(chunk[0:1], diag, ordinal, f"field {tag}")
        ind2 = _decode(chunk[1:2], diag, ordinal, f"field {tag}")
        subfields: list[tuple[str, str]] = []
        pieces = chunk[2:].split(b"\x1f")
        if pieces[0]:
            diag.warn(ordinal, f"stray bytes before first subfield of field {tag}")
        for piece in pieces[1:]:
            if not piece:
                continue
            code = _decode(piece[0:1], diag, ordinal, f"field {tag}")
            subfields.append((code, _decode(piece[1:], diag, ordinal, f"field {tag}")))
        fields.append(
            FieldOccurrence(tag=tag, indicator1=ind1, indicator2=ind2, subfields=tuple(subfields))
        )
    record_id = next((f.value for f in fields if f.tag == "001" and f.value), None)
    if not record_id:
        record_id = f"rec-{ordinal}"
        diag.warn(ordinal, "no 001 control field; record id synthesized")
    return DataRecord(record_id=record_id, source_format=SourceFormat.MARC, fields=tuple(fields))


# ---------------------------------------------------------------------------
# Alephseq line-oriented MARC
# ---------------------------------------------------------------------------

# Fixed-width prefix: 9-char record id, space, 3-char tag, 2 indicator
# characters, space, "L", space, then the field content.
_ALEPH_CONTENT_START = 18


def read_alephseq(stream: Iterable, diagnostics: ReaderDiagnostics | None = None) -> Iterator[DataRecord]:
    """Group Alephseq lines by their 9-character record identifier prefix."""
    diag = diagnostics if diagnostics is not None else ReaderDiagnostics()
    ordinal = 0
    current_id: str | None = None
    fields: list[FieldOccurrence] = []

    def flush() -> DataRecord | None:
        nonlocal fields
        if current_id is None:
            return None
        if not fields:
            diag.records_skipped += 1
            fields = []
            return None
        record = DataRecord(
            record_id=current_id, source_format=SourceFormat.MARC, fields=tuple(fields)
        )
        fields = []
        diag.records_read += 1
        return record

    for line in _text_lines(stream, diag):
        line = line.rstrip("\r\n")
        if not line:
            continue
        if len(line) < _ALEPH_CONTENT_START or line[9] != " " or line[15:18] != " L ":
            if current_id is None:
                ordinal += 1
            diag.warn(ordinal, f"malformed alephseq line: {line[:30]!r}")
            continue
        rec_id = line[0:9]
        if rec_id != current_id:
            record = flush()
            if record is not None:
                yield record
            current_id = rec_id
            ordinal += 1
        tag = line[10:13]
        ind = line[13:15]
        content = line[_ALEPH_CONTENT_START:]
        if tag == "LDR" or (tag.isdigit() and tag < "010"):
            fields.append(FieldOccurrence(tag=tag, value=content))
            continue
        if "$$" not in content:
            diag.warn(ordinal, f"data field {tag} without subfield markers")
            continue
        subfields = []
        for piece in content.split("$$"):
            if not piece:
                continue
            subfields.append((piece[0], piece[1:]))
        fields.append(
            FieldOccurrence(tag=tag, indicator1=ind[0], indicator2=ind[1], subfields=tuple(subfields))
        )
    record = flush()
    if record is not None:
        yield record


# ---------------------------------------------------------------------------
# PICA plain and normalized PICA
# ---------------------------------------------------------------------------


def _pica_record(
    fields: list[FieldOccurrence], ordinal: int, diag: ReaderDiagnostics
) -> DataRecord:
    record_id = None
    for f in fields:
        if f.tag == "003@":
            record_id = next((v for code, v in f.subfields if code == "0" and v), None)
            if record_id:
                break
    if not record_id:
        record_id = f"rec-{ordinal}"
        diag.warn(ordinal, "no 003@ $0 subfield; record id synthesized")
    return DataRecord(record_id=record_id, source_format=SourceFormat.PICA, fields=tuple(fields))


def _parse_pica_plain_line(line: str) -> FieldOccurrence | None:
    head, sep, body = line.partition(" ")
    m = _PICA_TAG_RE.match(head)
    if not m or not sep or not body.startswith("$"):
        return None
    subfields: list[tuple[str, str]] = []
    i = 0
    while i < len(body):
        if body[i] != "$" or i + 1 >= len(body):
            return None
        code = body[i + 1]
        if not code.isalnum():
            return None
        i += 2
        value: list[str] = []
        while i < len(body):
            if body[i] == "$":
                if i + 1 < len(body) and body[i + 1] == "$":
                    value.append("$")  # "$$" escapes a literal dollar sign
                    i += 2
                    continue
                break
            value.append(body[i])
            i += 1
        subfields.append((code, "".join(value)))
    return FieldOccurrence(tag=m.group(1), occurrence=m.group(2), subfields=tuple(subfields))


def read_pica_plain(stream: Iterable, diagnostics: ReaderDiagnostics | None = None) -> Iterator[DataRecord]:
    """Parse PICA plain: one field per line, blank line between records."""
    diag = diagnostics if diagnostics is not None else ReaderDiagnostics()
    ordinal = 0
    fields: list[FieldOccurrence] = []
    in_record = False
    for line in _text_lines(stream, diag):
        line = line.rstrip("\r\n")
        if not line:
            if in_record:
                if fields:
                    yield _pica_record(fields, ordinal, diag)
                    diag.records_read += 1
                else:
                    diag.records_skipped += 1
                fields = []
                in_record = False
            continue
        if not in_record:
            in_record = True
            ordinal += 1
        parsed = _parse_pica_plain_line(line)
        if parsed is None:
            diag.warn(ordinal, f"malformed pica plain line: {line[:30]!r}")
            continue
        fields.append(parsed)
    if in_record:
        if fields:
            yield _pica_record(fields, ordinal, diag)
            diag.records_read += 1
        else:
            diag.records_skipped += 1


def read_pica_normalized(
    stream: BinaryIO, diagnostics: ReaderDiagnostics | None = None
) -> Iterator[DataRecord]:
    """Parse normalised PICA: one record per line, 0x1E/0x1F field framing."""
    diag = diagnostics if diagnostics is not None else ReaderDiagnostics()
    ordinal = 0
    for raw_line in stream:
        line = raw_line.rstrip(b"\r\n")
        if not line:
            continue
        ordinal += 1
        fields: list[FieldOccurrence] = []
        for field_bytes in line.split(b"\x1e"):
            if not field_bytes:
                continue
            pieces = field_bytes.split(b"\x1f")
            if len(pieces) < 2:
                diag.warn(ordinal, "field without any subfield delimiter skipped")
                continue
            head = _decode(pieces[0], diag, ordinal, "field tag").rstrip(" ")
            m = _PICA_TAG_RE.match(head)
            if not m:
                diag.warn(ordinal, f"malformed pica tag {head!r}; field skipped")
                continue
            subfields = []
            for piece in pieces[1:]:
                if not piece:
                    continue
                code = _decode(piece[0:1], diag, ordinal, "subfield code")
                subfields.append((code, _decode(piece[1:], diag, ordinal, "subfield value")))
            fields.append(
                FieldOccurrence(tag=m.group(1), occurrence=m.group(2), subfields=tuple(subfields))
            )
        if not fields:
            diag.records_skipped += 1
            continue
        diag.records_read += 1
        yield _pica_record(fields, ordinal, diag)


# ---------------------------------------------------------------------------
# CSV and JSON lines
# ---------------------------------------------------------------------------


def read_csv(
    stream,
    id_column: str | None = None,
    diagnostics: ReaderDiagnostics | None = None,
) -> Iterator[DataRecord]:
    """Parse RFC 4180 CSV; the first row is the header, each later row a record.

    Empty cells are absent values.  A row whose cell count differs from the
    header is skipped with a warning.
    """
    diag = diagnostics if diagnostics is not None else ReaderDiagnostics()
    reader = _csv.reader(_text_lines(stream, diag))
    try:
        header = next(reader)
    except StopIteration:
        return
    id_index = None
    if id_column is not None:
        if id_column in header:
            id_index = header.index(id_column)
        else:
            diag.warn(0, f"id column {id_column!r} not in header; record ids synthesized")
    for ordinal, row in enumerate(reader, start=1):
        if len(row) != len(header):
            diag.warn(ordinal, f"row has {len(row)} cells, header has {len(header)}; skipped")
            diag.records_skipped += 1
            continue
        record_id = row[id_index] if id_index is not None else ""
        if not record_id:
            if id_index is not None:
                diag.warn(ordinal, "empty id cell; record id synthesized")
            record_id = f"row-{ordinal}"
        fields = tuple(
            FieldOccurrence(tag=col, value=cell) for col, cell in zip(header, row) if cell != ""
        )
        diag.records_read += 1
        yield DataRecord(record_id=record_id, source_format=SourceFormat.CSV, fields=fields)


def json_to_value_tree(value, key: str | None = None) -> AtomicValue:
    """Convert parsed JSON into the nested value structure pointers navigate.

    Scalars keep their canonical JSON spelling (strings unquoted); nulls
    become placeholder nodes so array indices stay stable.
    """
    if value is None:
        return AtomicValue(raw="", key=key, is_null=True)
    if isinstance(value, bool):
        return AtomicValue(raw="true" if value else "false", key=key)
    if isinstance(value, (int, float)):
        return AtomicValue(raw=json.dumps(value), key=key)
    if isinstance(value, str):
        return AtomicValue(raw=value, key=key)
    if isinstance(value, list):
        return AtomicValue(raw="", key=key, children=tuple(json_to_value_tree(v) for v in value))
    return AtomicValue(
        raw="", key=key, children=tuple(json_to_value_tree(v, key=k) for k, v in value.items())
    )


def read_json_lines(
    stream,
    id_pointer: str | None = None,
    diagnostics: ReaderDiagnostics | None = None,
) -> Iterator[DataRecord]:
    """Parse one JSON object per non-empty line; blank lines are ignored."""
    diag = diagnostics if diagnostics is not None else ReaderDiagnostics()
    pointer = parse_jsonpointer(id_pointer) if id_pointer is not None else None
    for ordinal, line in enumerate(_text_lines(stream, diag), start=1):
        if not line.strip():
            continue
        try:
            parsed = json.loads(line)
        except json.JSONDecodeError as exc:
            diag.warn(ordinal, f"unparseable JSON line: {exc.msg}")
            diag.records_skipped += 1
            continue
        if not isinstance(parsed, dict):
            diag.warn(ordinal, "line is valid JSON but not an object; skipped")
            diag.records_skipped += 1
            continue
        document = json_to_value_tree(parsed)
        record_id = ""
        if pointer is not None:
            probe = DataRecord(record_id="", source_format=SourceFormat.JSON, document=document)
            matches = evaluate(pointer, probe)
            if matches and matches[0].raw:
                record_id = matches[0].raw
            else:
                diag.warn(ordinal, f"id pointer {id_pointer!r} matched nothing; id synthesized")
        if not record_id:
            record_id = f"line-{ordinal}"
        diag.records_read += 1
        yield DataRecord(record_id=record_id, source_format=SourceFormat.JSON, document=document)


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------

FORMAT_NAMES = {
    "iso2709": SourceFormat.MARC,
    "alephseq": SourceFormat.MARC,
    "picaplain": SourceFormat.PICA,
    "picanorm": SourceFormat.PICA,
    "csv": SourceFormat.CSV,
    "jsonl": SourceFormat.JSON,
}


def read_records(
    stream,
    format_name: str,
    id_column: str | None = None,
    id_pointer: str | None = None,
    diagnostics: ReaderDiagnostics | None = None,
) -> Iterator[DataRecord]:
    """Dispatch to the reader named by ``format_name`` (a FORMAT_NAMES key)."""
    if format_name == "iso2709":
        return read_iso2709(stream, diagnostics)
    if format_name == "alephseq":
        return read_alephseq(stream, diagnostics)
    if format_name == "picaplain":
        return read_pica_plain(stream, diagnostics)
    if format_name == "picanorm":
        return read_pica_normalized(stream, diagnostics)
    if format_name == "csv":
        return read_csv(stream, id_column=id_column, diagnostics=diagnostics)
    if format_name == "jsonl":
        return read_json_lines(stream, id_pointer=id_pointer, diagnostics=diagnostics)
    raise ValueError(f"unknown input format {format_name!r}")
