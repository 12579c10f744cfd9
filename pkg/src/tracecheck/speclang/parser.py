"""Tokenizer and recursive-descent parser for ``.lsc`` pattern files.

Grammar::

    spec       := { pattern }
    pattern    := "pattern" IDENT ":" constraint "=>" node
    node       := leaf | "{" node { "," node } "}" | "[" node { "," node } "]"
    leaf       := [ "not" ] constraint
    constraint := KIND "{" [ field { "," field } ] "}"
    field      := IDENT ":" matcher
    matcher    := literal | IDENT | cmp_op literal | "matches" STRING
                | IDENT "(" [ arg { "," arg } ] ")"

``#`` starts a comment running to end of line.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from ..errors import DuplicateField, DuplicatePattern, SpecSyntaxError
from ..events import RAW_KINDS, EventKind
from .ast import (
    COMPARE_OPS,
    Bind,
    Compare,
    EventConstraint,
    FieldConstraint,
    Forbid,
    Literal,
    Ordered,
    Pattern,
    PredicateCall,
    Regex,
    Require,
    Spec,
    Unordered,
    VarRef,
)
from .binding import check_bindings

KEYWORDS = frozenset({"pattern", "not", "matches", "true", "false"})
KIND_NAMES = frozenset(k.value for k in RAW_KINDS)
VAR_RE = re.compile(r"[a-z_][a-z0-9_]*\Z")
MAX_NESTING = 100

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\f\v]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<number>-?\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_.]*)
  | (?P<string>")
  | (?P<sym>=>|<=|>=|!=|[<>:,{}\[\]()])
    """,
    re.VERBOSE,
)

_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t", "r": "\r"}


@dataclass(frozen=True)
class Token:
    type: str  # ident, number, string, sym, eof
    text: str
    line: int
    col: int
    value: object = None

    def describe(self) -> str:
        if self.type == "eof":
            return "end of input"
        if self.type == "string":
            return "string literal"
        return repr(self.text)


def is_variable_name(name: str) -> bool:
    return bool(VAR_RE.match(name)) and name not in KEYWORDS


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    n = len(text)
    while pos < n:
        col = pos - line_start + 1
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise SpecSyntaxError(line, col, "a token", repr(text[pos]))
        kind = m.lastgroup
        if kind == "string":
            start_line = line
            value, end, line, line_start = _scan_string(text, pos, line, line_start, col)
            tokens.append(Token("string", text[pos:end], start_line, col, value))
            pos = end
            continue
        end = m.end()
        tok = m.group()
        if kind == "nl":
            line += 1
            line_start = end
        elif kind == "number":
            value = float(tok) if any(c in tok for c in ".eE") else int(tok)
            if isinstance(value, float) and not math.isfinite(value):
                raise SpecSyntaxError(line, col, "a finite number", tok)
            tokens.append(Token("number", tok, line, col, value))
        elif kind in ("ident", "sym"):
            tokens.append(Token(kind, tok, line, col))
        pos = end
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


def _scan_string(text: str, start: int, line: int, line_start: int, col: int):
    out = []
    i = start + 1
    n = len(text)
    while i < n:
        c = text[i]
        if c == '"':
            return "".join(out), i + 1, line, line_start
        if c == "\\" and i + 1 < n:
            nxt = text[i + 1]
            if nxt in _ESCAPES:
                out.append(_ESCAPES[nxt])
            else:
                out.append(c + nxt)  # unknown escapes stay verbatim (regex friendly)
            if nxt == "\n":
                line += 1
                line_start = i + 2
            i += 2
            continue
        if c == "\n":
            line += 1
            line_start = i + 1
        out.append(c)
        i += 1
    raise SpecSyntaxError(_start_line(text, start), col, "closing '\"'", "end of input")


def _start_line(text: str, pos: int) -> int:
    return text.count("\n", 0, pos) + 1


class Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0
        self.nesting = 0

    # -- token helpers ------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def _advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.type != "eof":
            self.pos += 1
        return tok

    def _fail(self, expected: str):
        tok = self.tok
        raise SpecSyntaxError(tok.line, tok.col, expected, tok.describe())

    def _expect_sym(self, sym: str) -> Token:
        if self.tok.type == "sym" and self.tok.text == sym:
            return self._advance()
        self._fail(repr(sym))

    def _at_sym(self, sym: str) -> bool:
        return self.tok.type == "sym" and self.tok.text == sym

    def _at_word(self, word: str) -> bool:
        return self.tok.type == "ident" and self.tok.text == word

    # -- grammar ------------------------------------------------------------

    def parse_spec(self) -> Spec:
        patterns = []
        seen = set()
        while self.tok.type != "eof":
            start = self.tok
            p = self.parse_pattern()
            if p.name in seen:
                raise DuplicatePattern(p.name, start.line, start.col)
            seen.add(p.name)
            check_bindings(p)
            patterns.append(p)
        return Spec(tuple(patterns))

    def parse_pattern(self) -> Pattern:
        if not self._at_word("pattern"):
            self._fail("'pattern'")
        self._advance()
        if self.tok.type != "ident":
            self._fail("pattern name")
        name = self._advance().text
        self._expect_sym(":")
        trigger = self.parse_constraint()
        self._expect_sym("=>")
        return Pattern(name, trigger, self.parse_node())

    def parse_node(self):
        if self._at_sym("{") or self._at_sym("["):
            close = "}" if self.tok.text == "{" else "]"
            if self.nesting >= MAX_NESTING:
                self._fail(f"at most {MAX_NESTING} nested scopes")
            self.nesting += 1
            self._advance()
            children = [self.parse_node()]
            while self._at_sym(","):
                self._advance()
                children.append(self.parse_node())
            self._expect_sym(close)
            self.nesting -= 1
            return (Unordered if close == "}" else Ordered)(tuple(children))
        if self._at_word("not"):
            self._advance()
            if self._at_sym("{") or self._at_sym("["):
                self._fail("an event constraint (negation applies to single events only)")
            return Forbid(self.parse_constraint())
        if self.tok.type == "ident" and self.tok.text in KIND_NAMES:
            return Require(self.parse_constraint())
        self._fail("'{', '[', 'not' or an event kind")

    def parse_constraint(self) -> EventConstraint:
        if not (self.tok.type == "ident" and self.tok.text in KIND_NAMES):
            self._fail("event kind (" + "|".join(sorted(KIND_NAMES)) + ")")
        kind = EventKind(self._advance().text)
        self._expect_sym("{")
        fields = []
        names = set()
        if not self._at_sym("}"):
            while True:
                if self.tok.type != "ident":
                    self._fail("field name")
                ftok = self._advance()
                if ftok.text in names:
                    raise DuplicateField(ftok.text, ftok.line, ftok.col)
                names.add(ftok.text)
                self._expect_sym(":")
                fields.append(FieldConstraint(ftok.text, self.parse_matcher()))
                if not self._at_sym(","):
                    break
                self._advance()
        self._expect_sym("}")
        return EventConstraint(kind, tuple(fields))

    def _literal(self):
        tok = self.tok
        if tok.type in ("string", "number"):
            self._advance()
            return Literal(tok.value)
        if tok.type == "ident" and tok.text in ("true", "false"):
            self._advance()
            return Literal(tok.text == "true")
        return None

    def parse_matcher(self):
        lit = self._literal()
        if lit is not None:
            return lit
        tok = self.tok
        if tok.type == "sym" and tok.text in COMPARE_OPS:
            self._advance()
            lit = self._literal()
            if lit is None:
                self._fail("a literal after " + repr(tok.text))
            return Compare(tok.text, lit.value)
        if self._at_word("matches"):
            self._advance()
            stok = self.tok
            if stok.type != "string":
                self._fail("a regular expression string")
            self._advance()
            try:
                re.compile(stok.value)
            except re.error as exc:
                raise SpecSyntaxError(stok.line, stok.col, f"a valid regular expression ({exc})") from None
            return Regex(stok.value)
        if tok.type == "ident" and tok.text not in KEYWORDS and tok.text not in KIND_NAMES:
            self._advance()
            if self._at_sym("("):
                self._advance()
                args = []
                if not self._at_sym(")"):
                    while True:
                        args.append(self._parse_arg())
                        if not self._at_sym(","):
                            break
                        self._advance()
                self._expect_sym(")")
                return PredicateCall(tok.text, tuple(args))
            if not is_variable_name(tok.text):
                raise SpecSyntaxError(tok.line, tok.col, "a lowercase variable name", repr(tok.text))
            return Bind(tok.text)
        self._fail("a literal, variable, comparison, 'matches' or predicate call")

    def _parse_arg(self):
        lit = self._literal()
        if lit is not None:
            return lit
        tok = self.tok
        if tok.type == "ident" and is_variable_name(tok.text):
            self._advance()
            return VarRef(tok.text)
        self._fail("a literal or variable argument")


def parse_spec(text: str | bytes) -> Spec:
    """Parse pattern-language source into a ``Spec``.

    Raises ``SpecSyntaxError`` with a line/column position, or one of
    ``UnboundVariable``, ``DuplicateField``, ``DuplicatePattern``.
    """
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise SpecSyntaxError(1, 1, "UTF-8 text", f"byte offset {exc.start}") from None
    return Parser(text).parse_spec()
