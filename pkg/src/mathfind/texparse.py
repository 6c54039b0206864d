"""Parser for a LaTeX math subset, producing content expression trees.

Grammar summary, loosest binding first:

    annotate   expr \\text{...} [expr]      trailing text annotations
    sequence   a, b, c
    eq         a = b
    mod        a \\bmod p   (binds looser than +)
    additive   a + b,  a - b                n-ary plus, binary minus
    times      ab,  a\\cdot b,  a*b,  a/b   juxtaposition is multiplication
    unary      -a
    scripts    x_1^2  == power(subscript(x, 1), 2)
    atoms      letters, numbers, Greek commands, \\frac, \\sqrt, \\sin ...,
               \\dots, (...), {...}, and ?name wildcards in query mode

Multi-letter runs split into single-letter identifiers (``ax`` multiplies),
and a script without braces takes exactly one following token, as in TeX
(``x_12`` is x_1 times 2).  Unknown commands are reported, not dropped.
All failures raise ParseError with the byte offset of the offending token.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .expr import (
    ANNOTATE,
    DIVIDE,
    ELLIPSIS,
    EQ,
    MINUS,
    MOD,
    NEGATE,
    PLUS,
    POWER,
    SEQUENCE,
    SUBSCRIPT,
    TIMES,
    Apply,
    Identifier,
    MathExpr,
    Number,
    QueryExpr,
    TextAnnotation,
    Wildcard,
    function_head,
    is_function_head,
)

GREEK_LOWER = (
    "alpha beta gamma delta epsilon zeta eta theta iota kappa lambda mu nu xi "
    "omicron pi rho sigma tau upsilon phi chi psi omega"
).split()
GREEK_VARIANTS = "varepsilon vartheta varpi varrho varsigma varphi".split()
GREEK_UPPER = "Gamma Delta Theta Lambda Xi Pi Sigma Upsilon Phi Psi Omega".split()
GREEK_NAMES = frozenset(GREEK_LOWER + GREEK_VARIANTS + GREEK_UPPER)

FUNCTION_NAMES = frozenset("sin cos tan log ln exp".split())
ELLIPSIS_COMMANDS = frozenset(("dots", "ldots", "cdots"))
SPACE_COMMANDS = frozenset((" ", ",", ";", "!"))


class ParseError(Exception):
    """Positioned parse failure.

    kind is one of: unexpected-token, unbalanced-brace, unknown-command,
    empty-input.  position is a byte offset into the UTF-8 input.
    """

    def __init__(self, position: int, kind: str, message: str):
        super().__init__(f"{position}: {kind}: {message}")
        self.position = position
        self.kind = kind
        self.message = message


@dataclass(frozen=True, slots=True)
class _Token:
    kind: str  # DIGIT LETTER GREEK FN FRAC SQRT MOD TEXT DOTS WILD op-chars EOF
    value: str
    pos: int  # byte offset
    glued: bool  # True when directly adjacent to the previous token


def _lex(src: str, query: bool) -> list[_Token]:
    tokens: list[_Token] = []
    i = 0
    byte_pos = 0
    n = len(src)
    glued = False

    def push(kind: str, value: str, pos: int) -> None:
        nonlocal glued
        tokens.append(_Token(kind, value, pos, glued))
        glued = True

    while i < n:
        ch = src[i]
        start = byte_pos
        if ch.isspace():
            i += 1
            byte_pos += len(ch.encode("utf-8"))
            glued = False
            continue
        if ch == "~":
            i += 1
            byte_pos += 1
            glued = False
            continue
        if ch.isdigit():
            push("DIGIT", ch, start)
            i += 1
            byte_pos += 1
            continue
        if ch.isalpha() and ch.isascii():
            push("LETTER", ch, start)
            i += 1
            byte_pos += 1
            continue
        if ch in "+-*/=^_{}(),.":
            push(ch, ch, start)
            i += 1
            byte_pos += 1
            continue
        if ch == "?":
            j = i + 1
            name = ""
            while j < n and src[j].isascii() and src[j].isalnum():
                name += src[j]
                j += 1
            if not query:
                raise ParseError(
                    start, "unexpected-token", "wildcards are only allowed in queries"
                )
            if not name or not name[0].isalpha():
                raise ParseError(
                    start, "unexpected-token", "expected a wildcard name after '?'"
                )
            push("WILD", name, start)
            byte_pos += 1 + len(name)
            i = j
            continue
        if ch == "\\":
            if i + 1 >= n:
                raise ParseError(start, "unexpected-token", "dangling backslash")
            nxt = src[i + 1]
            if not nxt.isalpha():
                # control symbols: \  \, \; \! are spacing, anything else unknown
                if nxt in SPACE_COMMANDS:
                    i += 2
                    byte_pos += 1 + len(nxt.encode("utf-8"))
                    glued = False
                    continue
                raise ParseError(start, "unknown-command", f"unknown command '\\{nxt}'")
            j = i + 1
            name = ""
            while j < n and src[j].isalpha() and src[j].isascii():
                name += src[j]
                j += 1
            i = j
            byte_pos += 1 + len(name)
            if name in GREEK_NAMES:
                push("GREEK", name, start)
            elif name in FUNCTION_NAMES:
                push("FN", name, start)
            elif name == "frac":
                push("FRAC", name, start)
            elif name == "sqrt":
                push("SQRT", name, start)
            elif name in ("bmod", "pmod"):
                push("MOD", name, start)
            elif name in ELLIPSIS_COMMANDS:
                push("DOTS", name, start)
            elif name == "cdot":
                push("*", name, start)
            elif name == "text":
                content, i, byte_pos = _lex_text_body(src, i, byte_pos, start)
                push("TEXT", content, start)
            else:
                raise ParseError(start, "unknown-command", f"unknown command '\\{name}'")
            continue
        raise ParseError(start, "unexpected-token", f"unexpected character {ch!r}")

    tokens.append(_Token("EOF", "", byte_pos, False))
    return tokens


def _lex_text_body(src: str, i: int, byte_pos: int, start: int) -> tuple[str, int, int]:
    """Read the brace-balanced body of \\text{...}; i sits just past 'text'."""
    n = len(src)
    if i >= n or src[i] != "{":
        raise ParseError(byte_pos, "unbalanced-brace", "\\text requires a braced body")
    depth = 0
    body = []
    while i < n:
        ch = src[i]
        byte_pos += len(ch.encode("utf-8"))
        i += 1
        if ch == "{":
            depth += 1
            if depth == 1:
                continue
        elif ch == "}":
            depth -= 1
            if depth == 0:
                return "".join(body), i, byte_pos
        body.append(ch)
    raise ParseError(start, "unbalanced-brace", "unterminated \\text body")


_ATOM_START = frozenset(
    ("DIGIT", "LETTER", "GREEK", "FN", "FRAC", "SQRT", "DOTS", "WILD", "(", "{")
)


_MAX_DEPTH = 500


class _Parser:
    def __init__(self, tokens: list[_Token], query: bool):
        self.tokens = tokens
        self.pos = 0
        self.query = query
        self.depth = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def take(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, tok: _Token, kind: str, message: str) -> ParseError:
        return ParseError(tok.pos, kind, message)

    # --- precedence levels, loosest first ---

    def parse_expression(self) -> QueryExpr:
        self.depth += 1
        try:
            if self.depth > _MAX_DEPTH:
                raise self.fail(
                    self.peek(), "unexpected-token", "expression nested too deeply"
                )
            return self._parse_expression_inner()
        finally:
            self.depth -= 1

    def _parse_expression_inner(self) -> QueryExpr:
        left: QueryExpr
        if self.peek().kind == "TEXT":
            tok = self.take()
            if self.peek().kind in _ATOM_START:
                rest = self.parse_expression()
                return Apply(ANNOTATE, (rest, TextAnnotation(tok.value)))
            left = TextAnnotation(tok.value)
        else:
            left = self.parse_sequence()
        while self.peek().kind == "TEXT":
            tok = self.take()
            note = TextAnnotation(tok.value)
            if self.peek().kind in _ATOM_START or self.peek().kind == "TEXT":
                rest = self.parse_expression()
                left = Apply(ANNOTATE, (left, Apply(ANNOTATE, (rest, note))))
            else:
                left = Apply(ANNOTATE, (left, note))
        return left

    def parse_sequence(self) -> QueryExpr:
        items = [self.parse_eq()]
        while self.peek().kind == ",":
            self.take()
            items.append(self.parse_eq())
        if len(items) == 1:
            return items[0]
        return Apply(SEQUENCE, tuple(items))

    def parse_eq(self) -> QueryExpr:
        left = self.parse_mod()
        while self.peek().kind == "=":
            self.take()
            left = Apply(EQ, (left, self.parse_mod()))
        return left

    def parse_mod(self) -> QueryExpr:
        left = self.parse_additive()
        while self.peek().kind == "MOD":
            self.take()
            left = Apply(MOD, (left, self.parse_additive()))
        return left

    def parse_additive(self) -> QueryExpr:
        left = self.parse_multiplicative()
        summands: list[QueryExpr] | None = None
        while True:
            kind = self.peek().kind
            if kind == "+":
                self.take()
                right = self.parse_multiplicative()
                if summands is None:
                    summands = [left]
                summands.append(right)
            elif kind == "-":
                self.take()
                right = self.parse_multiplicative()
                if summands is not None:
                    left = Apply(PLUS, tuple(summands))
                    summands = None
                left = Apply(MINUS, (left, right))
            else:
                break
        if summands is not None:
            return Apply(PLUS, tuple(summands))
        return left

    def parse_multiplicative(self) -> QueryExpr:
        factors = [self.parse_unary()]

        def collapse() -> QueryExpr:
            return factors[0] if len(factors) == 1 else Apply(TIMES, tuple(factors))

        while True:
            kind = self.peek().kind
            if kind == "*":
                self.take()
                factors.append(self.parse_unary())
            elif kind == "/":
                self.take()
                right = self.parse_unary()
                factors = [Apply(DIVIDE, (collapse(), right))]
            elif kind in _ATOM_START:
                factors.append(self.parse_scripted())
            else:
                break
        return collapse()

    def parse_unary(self) -> QueryExpr:
        if self.peek().kind == "-":
            tok = self.take()
            self.depth += 1
            try:
                if self.depth > _MAX_DEPTH:
                    raise self.fail(
                        tok, "unexpected-token", "expression nested too deeply"
                    )
                return Apply(NEGATE, (self.parse_unary(),))
            finally:
                self.depth -= 1
        return self.parse_scripted()

    def parse_scripted(self) -> QueryExpr:
        base = self.parse_atom()
        sub: QueryExpr | None = None
        sup: QueryExpr | None = None
        while self.peek().kind in ("_", "^"):
            tok = self.take()
            if tok.kind == "_":
                if sub is not None:
                    raise self.fail(tok, "unexpected-token", "double subscript")
                sub = self.parse_script_arg()
            else:
                if sup is not None:
                    raise self.fail(tok, "unexpected-token", "double superscript")
                sup = self.parse_script_arg()
        if sub is not None:
            base = Apply(SUBSCRIPT, (base, sub))
        if sup is not None:
            base = Apply(POWER, (base, sup))
        return base

    def parse_script_arg(self) -> QueryExpr:
        tok = self.peek()
        if tok.kind == "{":
            return self.parse_group("{", "}")
        if tok.kind == "DIGIT":
            self.take()
            return Number(tok.value)
        if tok.kind == "LETTER":
            self.take()
            return Identifier(tok.value)
        if tok.kind == "GREEK":
            self.take()
            return Identifier(tok.value)
        if tok.kind == "WILD":
            self.take()
            return Wildcard(tok.value)
        raise self.fail(
            tok, "unexpected-token", "a script takes one token or a braced group"
        )

    def parse_group(self, open_kind: str, close_kind: str) -> QueryExpr:
        opener = self.take()
        assert opener.kind == open_kind
        inner = self.parse_expression()
        closer = self.peek()
        if closer.kind != close_kind:
            raise self.fail(
                opener, "unbalanced-brace", f"missing closing '{close_kind}'"
            )
        self.take()
        return inner

    def parse_atom(self) -> QueryExpr:
        tok = self.peek()
        kind = tok.kind
        if kind == "DIGIT":
            return self.parse_number()
        if kind == "LETTER":
            self.take()
            return Identifier(tok.value)
        if kind == "GREEK":
            self.take()
            return Identifier(tok.value)
        if kind == "WILD":
            self.take()
            return Wildcard(tok.value)
        if kind == "DOTS":
            self.take()
            return Apply(ELLIPSIS, ())
        if kind == "FN":
            self.take()
            return Apply(function_head(tok.value), (self.parse_unary(),))
        if kind == "SQRT":
            self.take()
            if self.peek().kind == "{":
                return Apply(function_head("sqrt"), (self.parse_group("{", "}"),))
            return Apply(function_head("sqrt"), (self.parse_unary(),))
        if kind == "FRAC":
            self.take()
            num = self.parse_frac_arg()
            den = self.parse_frac_arg()
            return Apply(DIVIDE, (num, den))
        if kind == "(":
            return self.parse_group("(", ")")
        if kind == "{":
            return self.parse_group("{", "}")
        if kind in (")", "}"):
            raise self.fail(tok, "unbalanced-brace", f"unmatched '{tok.value}'")
        if kind == "EOF":
            raise self.fail(tok, "unexpected-token", "unexpected end of input")
        raise self.fail(tok, "unexpected-token", f"unexpected {tok.value!r}")

    def parse_frac_arg(self) -> QueryExpr:
        tok = self.peek()
        if tok.kind == "{":
            return self.parse_group("{", "}")
        if tok.kind in ("DIGIT", "LETTER", "GREEK", "WILD"):
            return self.parse_script_arg()
        raise self.fail(
            tok, "unexpected-token", "\\frac takes braced or single-token arguments"
        )

    def parse_number(self) -> Number:
        first = self.take()
        digits = [first.value]
        while self.peek().kind == "DIGIT" and self.peek().glued:
            digits.append(self.take().value)
        dot = self.peek()
        if dot.kind == "." and dot.glued:
            after = self.tokens[self.pos + 1]
            if after.kind == "DIGIT" and after.glued:
                self.take()
                digits.append(".")
                while self.peek().kind == "DIGIT" and self.peek().glued:
                    digits.append(self.take().value)
            else:
                raise self.fail(dot, "unexpected-token", "expected digits after '.'")
        return Number("".join(digits))


def _parse(src: str, query: bool) -> QueryExpr:
    tokens = _lex(src, query)
    if tokens[0].kind == "EOF":
        raise ParseError(0, "empty-input", "no expression found")
    parser = _Parser(tokens, query)
    result = parser.parse_expression()
    trailing = parser.peek()
    if trailing.kind != "EOF":
        if trailing.kind in (")", "}"):
            raise ParseError(
                trailing.pos, "unbalanced-brace", f"unmatched '{trailing.value}'"
            )
        raise ParseError(
            trailing.pos, "unexpected-token", f"unexpected {trailing.value!r}"
        )
    return result


def parse_formula(src: str) -> MathExpr:
    """Parse corpus LaTeX into a content tree; wildcards are rejected."""
    return _parse(src, query=False)  # type: ignore[return-value]


def parse_query(src: str) -> QueryExpr:
    """Parse query LaTeX; ?name atoms become Wildcard nodes."""
    return _parse(src, query=True)


# --- unparsing (for round-trips and result display) ---

# Precedence ranks mirroring the parser levels.
_PREC_ANNOTATE = 0
_PREC_SEQUENCE = 1
_PREC_EQ = 2
_PREC_MOD = 3
_PREC_ADD = 4
_PREC_MUL = 5
_PREC_UNARY = 6
_PREC_SCRIPT = 7
_PREC_ATOM = 8


def _atom_text(e: QueryExpr) -> str | None:
    match e:
        case Number(value=v):
            return v
        case Identifier(name=n):
            return n if len(n) == 1 else f"\\{n}"
        case Wildcard(name=n):
            return f"?{n}"
    return None


_WILDCARD_TAIL = re.compile(r"\?[A-Za-z][A-Za-z0-9]*$")


def _needs_space(left: str, right: str) -> bool:
    if not left or not right:
        return False
    # a command name would otherwise swallow the next letter
    tail = left.rsplit("\\", 1)
    if len(tail) == 2 and tail[1].isalpha() and right[0].isalpha():
        return True
    if left[-1].isdigit() and (right[0].isdigit() or right[0] == "."):
        return True
    # a wildcard name would swallow following letters and digits
    if right[0].isalnum() and _WILDCARD_TAIL.search(left):
        return True
    return False


def _join(parts: list[str]) -> str:
    out = parts[0]
    for p in parts[1:]:
        if _needs_space(out, p):
            out += " " + p
        else:
            out += p
    return out


def unparse(e: QueryExpr) -> str:
    """Render a tree back to LaTeX.

    For parser-produced trees the output reparses to a structurally equal
    tree.  Canonical trees (which may hold nodes like a -1 coefficient) are
    rendered readably but are not guaranteed to reparse identically.
    """
    return _unparse(e, _PREC_ANNOTATE)


def _wrap(s: str, prec: int, minimum: int) -> str:
    if prec < minimum:
        return f"({s})"
    return s


def _unparse(e: QueryExpr, minimum: int) -> str:
    text = _atom_text(e)
    if text is not None:
        return text
    if isinstance(e, TextAnnotation):
        # standalone \text only parses where a whole expression may start
        return _wrap(f"\\text{{{e.content}}}", _PREC_ANNOTATE, minimum)
    assert isinstance(e, Apply)
    head, args = e.head, e.args

    if head == ELLIPSIS:
        return "\\dots"
    if is_function_head(head):
        name = head.split(":", 1)[1]
        if name == "sqrt":
            return f"\\sqrt{{{_unparse(args[0], _PREC_ANNOTATE)}}}"
        # a trailing script would be absorbed into the argument on reparse
        s = f"\\{name}({_unparse(args[0], _PREC_ANNOTATE)})"
        return _wrap(s, _PREC_UNARY, minimum)
    if head == PLUS:
        first = _unparse(args[0], _PREC_ADD)
        if isinstance(args[0], Apply) and args[0].head == PLUS:
            first = f"({first})"  # would merge into this n-ary node on reparse
        parts = [first]
        parts += [_unparse(a, _PREC_MUL) for a in args[1:]]
        return _wrap(" + ".join(parts), _PREC_ADD, minimum)
    if head == MINUS:
        s = f"{_unparse(args[0], _PREC_ADD)} - {_unparse(args[1], _PREC_MUL)}"
        return _wrap(s, _PREC_ADD, minimum)
    if head == TIMES:
        # juxtaposition cannot express negate or divide, so later factors
        # must bind at least as tightly as a scripted atom
        first = _unparse(args[0], _PREC_MUL)
        if isinstance(args[0], Apply) and args[0].head == TIMES:
            first = f"({first})"  # would merge into this n-ary node on reparse
        parts = [first]
        parts += [_unparse(a, _PREC_SCRIPT) for a in args[1:]]
        return _wrap(_join(parts), _PREC_MUL, minimum)
    if head == DIVIDE:
        s = f"{_unparse(args[0], _PREC_MUL)} / {_unparse(args[1], _PREC_UNARY)}"
        return _wrap(s, _PREC_MUL, minimum)
    if head == NEGATE:
        return _wrap("-" + _unparse(args[0], _PREC_UNARY), _PREC_UNARY, minimum)
    if head == POWER:
        base = args[0]
        base_prec = _PREC_ATOM
        if isinstance(base, Apply) and base.head == SUBSCRIPT:
            base_prec = _PREC_SCRIPT  # x_1^2 round-trips without parens
        s = f"{_unparse(base, base_prec)}^{{{_unparse(args[1], _PREC_ANNOTATE)}}}"
        return _wrap(s, _PREC_SCRIPT, minimum)
    if head == SUBSCRIPT:
        s = f"{_unparse(args[0], _PREC_ATOM)}_{{{_unparse(args[1], _PREC_ANNOTATE)}}}"
        return _wrap(s, _PREC_SCRIPT, minimum)
    if head == EQ:
        s = f"{_unparse(args[0], _PREC_EQ)} = {_unparse(args[1], _PREC_MOD)}"
        return _wrap(s, _PREC_EQ, minimum)
    if head == MOD:
        s = f"{_unparse(args[0], _PREC_MOD)} \\bmod {_unparse(args[1], _PREC_ADD)}"
        return _wrap(s, _PREC_MOD, minimum)
    if head == SEQUENCE:
        s = ", ".join(_unparse(a, _PREC_EQ) for a in args)
        return _wrap(s, _PREC_SEQUENCE, minimum)
    if head == ANNOTATE:
        left, tail = args
        left_s = _unparse(left, _PREC_SEQUENCE)
        if isinstance(tail, TextAnnotation):
            s = f"{left_s} \\text{{{tail.content}}}"
        elif (
            isinstance(tail, Apply)
            and tail.head == ANNOTATE
            and isinstance(tail.args[1], TextAnnotation)
        ):
            inner = _unparse(tail.args[0], _PREC_SEQUENCE)
            s = f"{left_s} \\text{{{tail.args[1].content}}} {inner}"
        else:
            s = f"{left_s} \\text{{}} {_unparse(tail, _PREC_SEQUENCE)}"
        return _wrap(s, _PREC_ANNOTATE, minimum)
    raise AssertionError(f"unhandled head {head!r}")
