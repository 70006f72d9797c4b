"""Parser for algebra-element expressions; inverse of the canonical printer.

Grammar (whitespace insignificant, ^ binds tighter than *, * tighter than +/-):

    expr     := ['-'] term (('+' | '-') term)*
    term     := factor ('*' factor)*
    factor   := atom ['^' exponent]
    atom     := INT | 'A' | 'v' INT | generator | '(' expr ')'
    exponent := ['-'] INT | '(' ['-'] INT '/' '2' ')'

Half exponents are accepted for A only.  '*' between generator factors is
noncommutative concatenation.  The generator alphabet is supplied by the
caller (for example a, a1..a3, g1..g3 depending on the surface); with an
empty alphabet the grammar parses ring scalars.

Errors carry the byte offset of the offending token.
"""

from __future__ import annotations

from typing import Mapping

from . import ring
from .freealg import AlgElement, Generator
from .ring import LaurentPoly

__all__ = ["ParseError", "parse_element", "parse_scalar"]


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at offset {position})")
        self.position = position


_SYMBOLS = "+-*^()/"


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    """Tokens as (kind, text, position); kinds: int, name, symbol."""
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in _SYMBOLS:
            tokens.append(("symbol", ch, i))
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(("int", text[i:j], i))
            i = j
            continue
        if ch.isalpha():
            j = i + 1
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(("name", text[i:j], i))
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", i)
    return tokens


class _Parser:
    def __init__(self, text: str, arity: int, alphabet: Mapping[str, Generator]):
        self.text = text
        self.arity = arity
        self.alphabet = alphabet
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> tuple[str, str, int] | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> tuple[str, str, int]:
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of input", len(self.text))
        self.pos += 1
        return tok

    def expect(self, text: str) -> None:
        tok = self.next()
        if tok[1] != text:
            raise ParseError(f"expected {text!r}, found {tok[1]!r}", tok[2])

    # -- grammar -------------------------------------------------------------

    def parse(self) -> AlgElement:
        if not self.tokens:
            raise ParseError("empty expression", 0)
        value = self.expr()
        tok = self.peek()
        if tok is not None:
            raise ParseError(f"trailing input {tok[1]!r}", tok[2])
        return value

    def expr(self) -> AlgElement:
        tok = self.peek()
        negate = tok is not None and tok[1] == "-"
        if negate:
            self.next()
        value = self.term()
        if negate:
            value = -value
        while (tok := self.peek()) is not None and tok[1] in "+-":
            self.next()
            rhs = self.term()
            value = value + rhs if tok[1] == "+" else value - rhs
        return value

    def term(self) -> AlgElement:
        value = self.factor()
        while (tok := self.peek()) is not None and tok[1] == "*":
            self.next()
            value = value * self.factor()
        return value

    def factor(self) -> AlgElement:
        kind, text, pos = self.next()
        is_a = False
        if kind == "int":
            base = AlgElement.from_scalar(ring.const(int(text), self.arity))
        elif kind == "name":
            if text == "A":
                base = AlgElement.from_scalar(ring.a_power(1, self.arity))
                is_a = True
            elif text[0] == "v" and len(text) > 1:
                idx = int(text[1:])
                if not 1 <= idx <= self.arity:
                    raise ParseError(f"v{idx} does not exist in R_{self.arity}", pos)
                base = AlgElement.from_scalar(ring.v_power(idx, self.arity))
            elif text in self.alphabet:
                base = AlgElement.from_generator(self.alphabet[text], self.arity)
            else:
                raise ParseError(f"unknown name {text!r}", pos)
        elif text == "(":
            base = self.expr()
            self.expect(")")
        else:
            raise ParseError(f"unexpected token {text!r}", pos)

        tok = self.peek()
        if tok is None or tok[1] != "^":
            return base
        self.next()
        whole, half = self.exponent(allow_half=is_a)
        if half:
            return AlgElement.from_scalar(ring.a_half_power(whole, self.arity))
        try:
            return base**whole
        except ValueError as exc:
            raise ParseError(str(exc), tok[2]) from None

    def exponent(self, allow_half: bool) -> tuple[int, bool]:
        """Parse an exponent; returns (value, is_half_exponent)."""
        tok = self.next()
        if tok[1] == "(":
            sign = 1
            tok = self.next()
            if tok[1] == "-":
                sign = -1
                tok = self.next()
            if tok[0] != "int":
                raise ParseError(f"expected integer exponent, found {tok[1]!r}", tok[2])
            k = sign * int(tok[1])
            nxt = self.next()
            if nxt[1] == "/":
                denom = self.next()
                if denom[1] != "2":
                    raise ParseError("only halves are allowed in exponents", denom[2])
                self.expect(")")
                if not allow_half:
                    raise ParseError("half exponents are allowed on A only", tok[2])
                return k, True
            if nxt[1] != ")":
                raise ParseError(f"expected ')' or '/', found {nxt[1]!r}", nxt[2])
            return (2 * k, True) if allow_half else (k, False)
        sign = 1
        if tok[1] == "-":
            sign = -1
            tok = self.next()
        if tok[0] != "int":
            raise ParseError(f"expected integer exponent, found {tok[1]!r}", tok[2])
        k = sign * int(tok[1])
        return (2 * k, True) if allow_half else (k, False)


def parse_element(text: str, arity: int, alphabet: Mapping[str, Generator]) -> AlgElement:
    """Parse an expression over the given generator alphabet."""
    return _Parser(text, arity, alphabet).parse()


def parse_scalar(text: str, arity: int) -> LaurentPoly:
    """Parse a ring scalar (no generators allowed)."""
    element = parse_element(text, arity, {})
    return element.coeff(())
