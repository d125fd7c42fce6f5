"""A small regular-expression engine with guaranteed linear-time matching.

Patterns are compiled to a Thompson NFA and simulated with bitmasks, so
matching cost is O(len(text) * states) regardless of the pattern -- there
is no backtracking and therefore no catastrophic blowup on inputs like
``(a+)+`` fed a long run of ``a``.  Only boolean "does the text contain a
match" semantics are provided; that is all rule patterns need.

Supported dialect (a `re`-compatible subset):

    literals, ``.`` (any char except newline), ``[...]`` classes with
    ranges/negation, ``\\d \\D \\w \\W \\s \\S``, escapes, anchors ``^``
    and ``$`` (with ``$`` also matching before a final newline, as `re`
    does), alternation ``|``, groups ``( )`` and ``(?: )``, quantifiers
    ``* + ? {m} {m,} {m,n}`` with an ignored lazy ``?`` suffix.

Rejected, by design: backreferences, lookaround, named groups and inline
flags -- the constructs that force a backtracking implementation.
"""

from __future__ import annotations

from .errors import RegexError

_MAX_STATES = 20_000
_SPECIAL = frozenset(".^$*+?{}[]()|\\")
_CLASS_SHORTHAND = {
    "d": lambda ch: ch.isdecimal(),
    "D": lambda ch: not ch.isdecimal(),
    "w": lambda ch: ch.isalnum() or ch == "_",
    "W": lambda ch: not (ch.isalnum() or ch == "_"),
    "s": lambda ch: ch.isspace(),
    "S": lambda ch: not ch.isspace(),
}
_ESCAPE_CHARS = {"n": "\n", "t": "\t", "r": "\r", "f": "\f", "v": "\v", "a": "\a", "0": "\0"}


class _CharSet:
    """Predicate over single characters (character class or shorthand)."""

    __slots__ = ("negated", "singles", "ranges", "preds")

    def __init__(self, negated=False, singles=frozenset(), ranges=(), preds=()):
        self.negated = negated
        self.singles = singles
        self.ranges = ranges
        self.preds = preds

    def matches(self, ch: str) -> bool:
        hit = ch in self.singles
        if not hit:
            for lo, hi in self.ranges:
                if lo <= ch <= hi:
                    hit = True
                    break
        if not hit:
            for pred in self.preds:
                if pred(ch):
                    hit = True
                    break
        return hit != self.negated


_DOT = _CharSet(negated=True, singles=frozenset("\n"))


# ---------------------------------------------------------------------------
# Parsing: pattern text -> AST tuples
#   ("lit", ch) ("class", _CharSet) ("anchor", "start"|"end")
#   ("seq", [nodes]) ("alt", [nodes]) ("repeat", node, min, max|None)
# ---------------------------------------------------------------------------


class _Parser:
    def __init__(self, pattern: str):
        self.pattern = pattern
        self.pos = 0

    def error(self, reason: str):
        raise RegexError(f"bad pattern {self.pattern!r} at position {self.pos}: {reason}")

    def peek(self) -> str | None:
        return self.pattern[self.pos] if self.pos < len(self.pattern) else None

    def take(self) -> str:
        ch = self.pattern[self.pos]
        self.pos += 1
        return ch

    def parse(self):
        node = self.alternation()
        if self.pos != len(self.pattern):
            self.error("unbalanced ')'")
        return node

    def alternation(self):
        branches = [self.sequence()]
        while self.peek() == "|":
            self.take()
            branches.append(self.sequence())
        return branches[0] if len(branches) == 1 else ("alt", branches)

    def sequence(self):
        items = []
        while self.peek() is not None and self.peek() not in "|)":
            items.append(self.repeatable())
        return ("seq", items)

    def repeatable(self):
        node = self.atom()
        quant = self.quantifier()
        if quant is None:
            return node
        lo, hi = quant
        if self.peek() == "?":  # lazy marker: irrelevant for boolean matching
            self.take()
        nxt = self.peek()
        if nxt in ("*", "+", "?") or (nxt == "{" and self.try_braces(peek_only=True)):
            self.error("multiple repeat")
        return ("repeat", node, lo, hi)

    def quantifier(self):
        ch = self.peek()
        if ch == "*":
            self.take()
            return 0, None
        if ch == "+":
            self.take()
            return 1, None
        if ch == "?":
            self.take()
            return 0, 1
        if ch == "{":
            return self.try_braces()
        return None

    def try_braces(self, peek_only: bool = False):
        # `{` that does not form a valid counted repetition is a literal,
        # matching `re`'s behaviour.
        start = self.pos
        self.take()
        body = []
        while self.peek() is not None and self.peek() != "}":
            body.append(self.take())
        if self.peek() != "}":
            self.pos = start
            return None
        spec = "".join(body)
        lo_s, sep, hi_s = spec.partition(",")
        if not lo_s.isascii() or not (lo_s.isdigit() or (lo_s == "" and sep)):
            self.pos = start
            return None
        if sep and hi_s and not (hi_s.isascii() and hi_s.isdigit()):
            self.pos = start
            return None
        self.take()  # '}'
        if peek_only:
            self.pos = start
            return True
        lo = int(lo_s) if lo_s else 0
        hi = (int(hi_s) if hi_s else None) if sep else lo
        if hi is not None and hi < lo:
            self.error("min repeat greater than max repeat")
        if lo > 1000 or (hi is not None and hi > 1000):
            self.error("counted repetition larger than 1000")
        return lo, hi

    def atom(self):
        ch = self.take()
        if ch == "(":
            if self.peek() == "?":
                self.take()
                if self.peek() != ":":
                    self.error("only (?: ) groups are supported (no lookaround, flags or named groups)")
                self.take()
            node = self.alternation()
            if self.peek() != ")":
                self.error("missing ')'")
            self.take()
            return node
        if ch == "[":
            return ("class", self.char_class())
        if ch == ".":
            return ("class", _DOT)
        if ch == "^":
            return ("anchor", "start")
        if ch == "$":
            return ("anchor", "end")
        if ch == "\\":
            return self.escape()
        if ch in ("*", "+", "?"):
            self.pos -= 1
            self.error("nothing to repeat")
        if ch == ")":
            self.pos -= 1
            self.error("unbalanced ')'")
        return ("lit", ch)

    def escape(self):
        if self.peek() is None:
            self.error("pattern ends with a bare backslash")
        ch = self.take()
        if ch in _CLASS_SHORTHAND:
            return ("class", _CharSet(preds=(_CLASS_SHORTHAND[ch],)))
        if ch in _ESCAPE_CHARS:
            return ("lit", _ESCAPE_CHARS[ch])
        if ch == "x":
            digits = self.pattern[self.pos : self.pos + 2]
            if len(digits) != 2 or any(c not in "0123456789abcdefABCDEF" for c in digits):
                self.error("\\x needs two hex digits")
            self.pos += 2
            return ("lit", chr(int(digits, 16)))
        if ch.isdigit():
            self.error("backreferences are not supported")
        if ch.isalpha():
            self.error(f"unknown escape \\{ch}")
        return ("lit", ch)

    def char_class(self) -> _CharSet:
        negated = False
        if self.peek() == "^":
            self.take()
            negated = True
        singles: set[str] = set()
        ranges: list[tuple[str, str]] = []
        preds: list = []
        first = True
        while True:
            ch = self.peek()
            if ch is None:
                self.error("missing ']'")
            if ch == "]" and not first:
                self.take()
                break
            first = False
            item = self.class_item()
            if not isinstance(item, str):  # shorthand class, cannot be a range endpoint
                preds.append(item[1])
                continue
            if self.peek() == "-" and self.pos + 1 < len(self.pattern) and self.pattern[self.pos + 1] != "]":
                self.take()
                hi = self.class_item()
                if not isinstance(hi, str):
                    self.error("shorthand class cannot end a range")
                if hi < item:
                    self.error("reversed character range")
                ranges.append((item, hi))
            else:
                singles.add(item)
        return _CharSet(negated=negated, singles=frozenset(singles), ranges=tuple(ranges), preds=tuple(preds))

    def class_item(self):
        ch = self.take()
        if ch != "\\":
            return ch
        if self.peek() is None:
            self.error("pattern ends with a bare backslash")
        esc = self.take()
        if esc in _CLASS_SHORTHAND:
            return ("pred", _CLASS_SHORTHAND[esc])
        if esc in _ESCAPE_CHARS:
            return _ESCAPE_CHARS[esc]
        if esc == "x":
            digits = self.pattern[self.pos : self.pos + 2]
            if len(digits) != 2 or any(c not in "0123456789abcdefABCDEF" for c in digits):
                self.error("\\x needs two hex digits")
            self.pos += 2
            return chr(int(digits, 16))
        if esc.isdigit():
            self.error("backreferences are not supported")
        if esc.isalpha():
            self.error(f"unknown escape \\{esc}")
        return esc


# ---------------------------------------------------------------------------
# Compilation: AST -> Thompson NFA with bitmask simulation
# ---------------------------------------------------------------------------


class _Nfa:
    def __init__(self, pattern: str):
        self.pattern = pattern
        self.eps: list[list[int]] = []
        self.anchors: list[list[tuple[str, int]]] = []
        self.lits: list[dict[str, int]] = []
        self.complex: list[list[tuple[_CharSet, int]]] = []

    def new_state(self) -> int:
        if len(self.eps) >= _MAX_STATES:
            raise RegexError(f"bad pattern {self.pattern!r}: compiled automaton too large")
        self.eps.append([])
        self.anchors.append([])
        self.lits.append({})
        self.complex.append([])
        return len(self.eps) - 1

    def add(self, node) -> tuple[int, int]:
        """Compile one AST node, returning its (entry, exit) state pair."""
        kind = node[0]
        if kind == "lit":
            s, t = self.new_state(), self.new_state()
            self.lits[s][node[1]] = self.lits[s].get(node[1], 0) | (1 << t)
            return s, t
        if kind == "class":
            s, t = self.new_state(), self.new_state()
            self.complex[s].append((node[1], 1 << t))
            return s, t
        if kind == "anchor":
            s, t = self.new_state(), self.new_state()
            self.anchors[s].append((node[1], t))
            return s, t
        if kind == "seq":
            s = t = self.new_state()
            for item in node[1]:
                i_s, i_t = self.add(item)
                self.eps[t].append(i_s)
                t = i_t
            return s, t
        if kind == "alt":
            s, t = self.new_state(), self.new_state()
            for branch in node[1]:
                b_s, b_t = self.add(branch)
                self.eps[s].append(b_s)
                self.eps[b_t].append(t)
            return s, t
        # counted repetition: expand during compilation so the state cap
        # bounds the work even for nested {m,n}
        _, child, lo, hi = node
        s = t = self.new_state()
        for _ in range(lo):
            c_s, c_t = self.add(child)
            self.eps[t].append(c_s)
            t = c_t
        if hi is None:
            c_s, c_t = self.add(child)
            loop_in, loop_out = self.new_state(), self.new_state()
            self.eps[t].append(loop_in)
            self.eps[loop_in].append(c_s)
            self.eps[loop_in].append(loop_out)
            self.eps[c_t].append(loop_in)
            return s, loop_out
        tail_entries: list[int] = []
        for _ in range(hi - lo):
            c_s, c_t = self.add(child)
            gate = self.new_state()
            self.eps[t].append(gate)
            self.eps[gate].append(c_s)
            tail_entries.append(gate)
            t = c_t
        end = self.new_state()
        self.eps[t].append(end)
        for gate in tail_entries:
            self.eps[gate].append(end)
        return s, end


class CompiledPattern:
    """A compiled pattern; ``search`` reports whether the text contains a match."""

    def __init__(self, pattern: str):
        ast = _Parser(pattern).parse()
        self.pattern = pattern
        self._literal = _literal_plan(ast)
        nfa = _Nfa(pattern)
        start, accept = nfa.add(ast)
        self._start_bit = 1 << start
        self._accept_bit = 1 << accept
        # Per state, per (at_start, at_end) combination: epsilon+anchor closure.
        n = len(nfa.eps)
        self._closures = [
            [_closure_of(nfa, s, at_start, at_end) for s in range(n)]
            for at_start, at_end in ((False, False), (False, True), (True, False), (True, True))
        ]
        self._lits = nfa.lits
        self._complex = nfa.complex

    def search(self, text: str) -> bool:
        literal = self._literal
        if literal is not None:
            mode, needle = literal
            if mode == "contains":
                return needle in text
            if mode == "prefix":
                return text.startswith(needle)
            stripped = text[:-1] if text.endswith("\n") else text
            if mode == "suffix":
                return stripped.endswith(needle)
            return stripped == needle
        n = len(text)
        closures = self._closures
        lits = self._lits
        complex_edges = self._complex
        flags = 2 | (1 if n == 0 or (n == 1 and text[0] == "\n") else 0)
        cur = _mask_closure(closures[flags], self._start_bit)
        if cur & self._accept_bit:
            return True
        start_bit = self._start_bit
        accept_bit = self._accept_bit
        for i in range(n):
            ch = text[i]
            raw = start_bit  # a fresh match may begin at the next position
            m = cur
            while m:
                low = m & -m
                state = low.bit_length() - 1
                m ^= low
                raw |= lits[state].get(ch, 0)
                for charset, target_mask in complex_edges[state]:
                    if charset.matches(ch):
                        raw |= target_mask
            p = i + 1
            flags = 1 if (p == n or (p == n - 1 and text[p] == "\n")) else 0
            cur = _mask_closure(closures[flags], raw)
            if cur & accept_bit:
                return True
        return False


def _closure_of(nfa: _Nfa, state: int, at_start: bool, at_end: bool) -> int:
    mask = 0
    stack = [state]
    while stack:
        s = stack.pop()
        bit = 1 << s
        if mask & bit:
            continue
        mask |= bit
        stack.extend(nfa.eps[s])
        for kind, target in nfa.anchors[s]:
            if (kind == "start" and at_start) or (kind == "end" and at_end):
                stack.append(target)
    return mask


def _mask_closure(closure_table: list[int], mask: int) -> int:
    out = 0
    while mask:
        low = mask & -mask
        out |= closure_table[low.bit_length() - 1]
        mask ^= low
    return out


def _literal_plan(ast) -> tuple[str, str] | None:
    """Plan a plain substring check for anchor/literal-only patterns."""
    if ast[0] != "seq":
        return None
    items = ast[1]
    anchored_start = bool(items) and items[0] == ("anchor", "start")
    anchored_end = bool(items) and items[-1] == ("anchor", "end")
    body = items[1 if anchored_start else 0 : len(items) - 1 if anchored_end else len(items)]
    if not all(item[0] == "lit" for item in body):
        return None
    needle = "".join(item[1] for item in body)
    if anchored_start and anchored_end:
        return "exact", needle
    if anchored_start:
        return "prefix", needle
    if anchored_end:
        return "suffix", needle
    return "contains", needle


def compile(pattern: str) -> CompiledPattern:
    """Compile ``pattern``, raising :class:`RegexError` outside the dialect."""
    return CompiledPattern(pattern)
