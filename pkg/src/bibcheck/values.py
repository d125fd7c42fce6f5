"""Atomic value structure and the format-independent record abstraction.

Every reader produces :class:`DataRecord` instances and every constraint
consumes lists of :class:`AtomicValue`, so the validation engine never sees
a serialization format directly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field


class SourceFormat(enum.Enum):
    MARC = "MARC"
    PICA = "PICA"
    CSV = "CSV"
    JSON = "JSON"


@dataclass(frozen=True, slots=True)
class AtomicValue:
    """One extracted datum: a raw string plus optional language tag and URI.

    ``children`` holds nested values (populated by the JSON reader for
    objects and arrays).  ``key`` and ``is_null`` are JSON-tree plumbing:
    ``key`` is the member name a node had inside its parent object, and
    ``is_null`` marks a JSON ``null`` placeholder that keeps array indices
    stable but is dropped from extraction results.
    """

    raw: str
    lang: str | None = None
    uri: str | None = None
    children: tuple[AtomicValue, ...] = ()
    key: str | None = None
    is_null: bool = False


def make_value(raw: str, lang: str | None = None, uri: str | None = None) -> AtomicValue:
    """Build a leaf value; all fields are stored verbatim, never trimmed."""
    return AtomicValue(raw=raw, lang=lang, uri=uri)


@dataclass(frozen=True, slots=True)
class FieldOccurrence:
    """One field of a MARC/PICA record, or one CSV cell (tag = column name).

    ``value`` is set for control fields, the leader ("LDR") and CSV cells;
    data fields carry their content in ``subfields`` instead.
    """

    tag: str
    value: str | None = None
    indicator1: str = " "
    indicator2: str = " "
    occurrence: str | None = None
    subfields: tuple[tuple[str, str], ...] = ()


@dataclass(frozen=True, slots=True)
class DataRecord:
    """A single record, with field occurrence order preserved as read.

    JSON records store their document under ``document``; all other formats
    use the flat ``fields`` tuple.
    """

    record_id: str
    source_format: SourceFormat
    fields: tuple[FieldOccurrence, ...] = ()
    document: AtomicValue | None = None


def extract(record: DataRecord, selector) -> list[AtomicValue]:
    """Return all occurrences addressed by ``selector``, in document order.

    Absence is an empty list, never an error.  The selector must have been
    compiled for the record's format (enforced when the schema compiles).
    """
    from . import selectors

    return selectors.evaluate(selector, record)
