"""Parser for the YAML-like configuration dialect.

Deliberately small and deterministic: nested maps, "-" block sequences,
scalar strings/numbers/booleans/null and "#" comments.  Anchors, flow
style, multi-document streams and the rest of YAML are not part of the
dialect; use the JSON syntax for anything beyond it.

Unquoted scalars resolve like YAML's core schema: ``true``/``false``,
``null``/``~``, integers and floats; everything else is a string.  Quote a
scalar to force a string.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import SchemaSyntaxError

_INT_RE = re.compile(r"^-?[0-9]+$")
_FLOAT_RE = re.compile(r"^-?([0-9]+\.[0-9]*|\.[0-9]+|[0-9]+)([eE][+-]?[0-9]+)?$")


@dataclass
class _Line:
    indent: int
    text: str
    lineno: int


def _strip_comment(raw: str) -> str:
    quote = None
    for i, ch in enumerate(raw):
        if quote:
            if ch == quote:
                quote = None
        elif ch in ("'", '"'):
            quote = ch
        elif ch == "#" and (i == 0 or raw[i - 1] in " \t"):
            return raw[:i]
    return raw


def _tokenize(text: str) -> list[_Line]:
    lines: list[_Line] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        content = _strip_comment(raw).rstrip()
        if not content.strip():
            continue
        stripped = content.lstrip(" ")
        indent = len(content) - len(stripped)
        if stripped.startswith("\t") or "\t" in content[:indent]:
            raise SchemaSyntaxError(f"line {lineno}: tabs are not allowed in indentation")
        lines.append(_Line(indent, stripped, lineno))
    return lines


def _parse_scalar(text: str, lineno: int):
    if text in ("null", "~"):
        return None
    if text == "true":
        return True
    if text == "false":
        return False
    if len(text) >= 2 and text[0] == text[-1] and text[0] in ("'", '"'):
        body = text[1:-1]
        if text[0] == '"':
            body = (
                body.replace("\\\\", "\0")
                .replace('\\"', '"')
                .replace("\\n", "\n")
                .replace("\\t", "\t")
                .replace("\0", "\\")
            )
        return body
    if _INT_RE.match(text):
        return int(text)
    if _FLOAT_RE.match(text) and any(c in text for c in ".eE"):
        return float(text)
    return text


def _is_dash(line: _Line) -> bool:
    return line.text == "-" or line.text.startswith("- ")


class _Parser:
    def __init__(self, lines: list[_Line]):
        self.lines = lines
        self.i = 0

    def peek(self) -> _Line | None:
        return self.lines[self.i] if self.i < len(self.lines) else None

    def parse_value(self, indent: int):
        line = self.peek()
        if _is_dash(line):
            return self.parse_sequence(indent)
        return self.parse_mapping(indent)

    def split_entry(self, line: _Line) -> tuple[str, str] | None:
        idx = line.text.find(": ")
        if idx < 0 and line.text.endswith(":"):
            idx = len(line.text) - 1
        if idx <= 0:
            return None
        key = line.text[:idx].strip()
        if not key:
            return None
        if len(key) >= 2 and key[0] == key[-1] and key[0] in ("'", '"'):
            key = key[1:-1]
        return key, line.text[idx + 1 :].strip()

    def parse_mapping(self, indent: int) -> dict:
        out: dict = {}
        while True:
            line = self.peek()
            if line is None or line.indent < indent or _is_dash(line):
                break
            if line.indent > indent:
                raise SchemaSyntaxError(f"line {line.lineno}: unexpected indentation")
            entry = self.split_entry(line)
            if entry is None:
                raise SchemaSyntaxError(f"line {line.lineno}: expected 'key: value'")
            key, rest = entry
            if key in out:
                raise SchemaSyntaxError(f"line {line.lineno}: duplicate key {key!r}")
            self.i += 1
            if rest:
                out[key] = _parse_scalar(rest, line.lineno)
                continue
            nxt = self.peek()
            if nxt is not None and nxt.indent >= indent and _is_dash(nxt):
                # a block sequence may sit at the same indent as its key
                out[key] = self.parse_sequence(nxt.indent)
            elif nxt is not None and nxt.indent > indent:
                out[key] = self.parse_value(nxt.indent)
            else:
                out[key] = None
        return out

    def parse_sequence(self, indent: int) -> list:
        items: list = []
        while True:
            line = self.peek()
            if line is None or line.indent != indent or not _is_dash(line):
                break
            rest = line.text[1:]
            inner = rest.strip()
            if not inner:
                self.i += 1
                nxt = self.peek()
                if nxt is not None and nxt.indent > indent:
                    items.append(self.parse_value(nxt.indent))
                else:
                    items.append(None)
                continue
            virtual_indent = indent + 1 + (len(rest) - len(rest.lstrip(" ")))
            self.lines[self.i] = _Line(virtual_indent, inner, line.lineno)
            if self.split_entry(self.lines[self.i]) is not None:
                items.append(self.parse_mapping(virtual_indent))
            else:
                self.i += 1
                items.append(_parse_scalar(inner, line.lineno))
        return items


def parse(text: str):
    """Parse a document in the dialect; raises :class:`SchemaSyntaxError`."""
    lines = _tokenize(text)
    if not lines:
        return None
    if lines[0].indent != 0:
        raise SchemaSyntaxError(f"line {lines[0].lineno}: top-level content must not be indented")
    parser = _Parser(lines)
    value = parser.parse_value(0)
    leftover = parser.peek()
    if leftover is not None:
        raise SchemaSyntaxError(f"line {leftover.lineno}: content outside the document structure")
    return value
