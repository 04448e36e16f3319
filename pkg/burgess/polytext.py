"""A parser and printer for polynomials written as text.

The grammar::

    poly    := [sign] term (sign term)*
    term    := coeff ['*' factors] | factors
    factors := factor ('*' factor)*
    factor  := 'x' index ['^' exponent]
    coeff   := digits ['.' digits | '/' digits]
    sign    := '+' | '-'

Whitespace is ignored. Variables are ``x1`` to ``xn``. The canonical form
printed by :func:`dumps` lists terms in descending lexicographic order of
their exponent vectors, always writes the coefficient, and parses back to
the same polynomial.

>>> f = loads("x1^2*x2 + 3*x2^3", 2)
>>> sorted(f.terms.items())
[((0, 3), 3), ((2, 1), 1)]
>>> dumps(f)
'1*x1^2*x2 + 3*x2^3'
>>> dumps(loads("0.25*x1 - 1/3", 1))
'0.25*x1 - 1/3'
"""

import io
import re
import typing as t

from fractions import Fraction

from burgess.polyalg import Domain, MultiPoly, RR, ZZ

__all__ = (
    "dump",
    "load",
    "dumps",
    "loads",
    "parse_poly",
    "PolyTextError",
    "ParseError",
    "VariableOutOfRange",
)


class PolyTextError(ValueError):
    pass


class ParseError(PolyTextError):
    """Malformed text. ``offset`` is the byte offset of the problem."""

    def __init__(self, message: str, offset: int) -> None:
        super().__init__("{} (at byte {})".format(message, offset))
        self.offset = offset


class VariableOutOfRange(PolyTextError):
    pass


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d+|/\d+)?)|x(?P<var>\d+)|(?P<op>[-+*^]))"
)


class _Token(t.NamedTuple):
    kind: str
    text: str
    offset: int


def _tokenize(text: str) -> t.List[_Token]:
    tokens = []
    pos = 0
    while True:
        match = _TOKEN.match(text, pos)
        if match is None:
            rest = len(text[pos:]) - len(text[pos:].lstrip())
            if text[pos:].strip() == "":
                break
            raise ParseError(
                "Unexpected character {!r}".format(text[pos + rest]),
                _byte_offset(text, pos + rest),
            )
        kind = match.lastgroup
        assert kind is not None
        tokens.append(_Token(kind, match.group(kind),
                             _byte_offset(text, match.start(kind))))
        pos = match.end()
    tokens.append(_Token('end', '', _byte_offset(text, len(text))))
    return tokens


def _byte_offset(text: str, index: int) -> int:
    return len(text[:index].encode('utf-8'))


class _Parser:
    def __init__(self, text: str, n: int) -> None:
        self.tokens = _tokenize(text)
        self.pos = 0
        self.n = n
        self.real = False

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def take(self, kind: str, text: t.Optional[str] = None) -> _Token:
        token = self.peek()
        if token.kind != kind or (text is not None and token.text != text):
            expected = text if text is not None else kind
            found = token.text or "end of input"
            raise ParseError(
                "Expected {}, found {!r}".format(expected, found), token.offset
            )
        self.pos += 1
        return token

    def poly(self) -> t.List[t.Tuple[t.Tuple[int, ...], Fraction]]:
        terms = []
        sign = 1
        token = self.peek()
        if token.kind == 'op' and token.text in '+-':
            sign = -1 if token.text == '-' else 1
            self.pos += 1
        while True:
            exps, coeff = self.term()
            terms.append((exps, sign * coeff))
            token = self.peek()
            if token.kind == 'end':
                return terms
            if token.kind == 'op' and token.text in '+-':
                sign = -1 if token.text == '-' else 1
                self.pos += 1
            else:
                raise ParseError(
                    "Expected '+' or '-', found {!r}".format(token.text),
                    token.offset,
                )

    def term(self) -> t.Tuple[t.Tuple[int, ...], Fraction]:
        coeff = Fraction(1)
        exps = [0] * self.n
        token = self.peek()
        if token.kind == 'num':
            self.pos += 1
            try:
                coeff = Fraction(token.text)
            except ZeroDivisionError:
                raise ParseError("Zero denominator in {!r}".format(token.text),
                                 token.offset) from None
            if coeff.denominator != 1 or '.' in token.text:
                self.real = True
            nxt = self.peek()
            if not (nxt.kind == 'op' and nxt.text == '*'):
                return tuple(exps), coeff
            self.pos += 1
        self.factor(exps)
        while self.peek().kind == 'op' and self.peek().text == '*':
            self.pos += 1
            self.factor(exps)
        return tuple(exps), coeff

    def factor(self, exps: t.List[int]) -> None:
        token = self.take('var')
        index = int(token.text)
        if not 1 <= index <= self.n:
            raise VariableOutOfRange(
                "x{} is out of range for n = {}".format(index, self.n)
            )
        power = 1
        if self.peek().kind == 'op' and self.peek().text == '^':
            self.pos += 1
            exponent = self.take('num')
            if not exponent.text.isdigit():
                raise ParseError("Exponents must be integers",
                                 exponent.offset)
            power = int(exponent.text)
        exps[index - 1] += power


def loads(
    text: str, n: int, domain: t.Optional[Domain] = None
) -> MultiPoly:
    """Parse a polynomial in ``n`` variables.

    Without an explicit ``domain`` the result has integer coefficients,
    unless a decimal or fractional coefficient appears, in which case it
    has real ones.
    """
    parser = _Parser(text, n)
    terms = parser.poly()
    if domain is None:
        domain = RR if parser.real else ZZ
    return MultiPoly(n, terms, domain)


def load(
    fp: t.TextIO, n: int, domain: t.Optional[Domain] = None
) -> MultiPoly:
    """Like :func:`loads`, but from an open file."""
    return loads(fp.read(), n, domain)


parse_poly = loads


def _coefficient_text(value: t.Any) -> str:
    frac = Fraction(value)
    if frac.denominator == 1:
        return str(frac.numerator)
    den = frac.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return "{}/{}".format(frac.numerator, frac.denominator)
    places = max(twos, fives)
    digits = str(frac.numerator * 10 ** places // frac.denominator)
    digits = digits.rjust(places + 1, '0')
    return "{}.{}".format(digits[:-places], digits[-places:]).rstrip('0')


def _term_text(exps: t.Sequence[int], coeff: t.Any) -> str:
    factors = [
        "x{}".format(i) if b == 1 else "x{}^{}".format(i, b)
        for i, b in enumerate(exps, start=1) if b
    ]
    return "*".join([_coefficient_text(coeff)] + factors)


def dumps(poly: MultiPoly) -> str:
    """The canonical text of ``poly``."""
    if poly.is_zero():
        return "0"
    parts = []
    for exps in sorted(poly.terms, reverse=True):
        coeff = poly.terms[exps]
        text = _term_text(exps, abs(coeff))
        if not parts:
            parts.append("-" + text if coeff < 0 else text)
        else:
            parts.append(("- " if coeff < 0 else "+ ") + text)
    return " ".join(parts)


def dump(poly: MultiPoly, fp: t.TextIO) -> None:
    """Write the canonical text of ``poly`` to an open file."""
    fp.write(dumps(poly))


def round_trip(poly: MultiPoly) -> MultiPoly:
    """Print and parse ``poly`` again, keeping its domain."""
    buffer = io.StringIO()
    dump(poly, buffer)
    return loads(buffer.getvalue(), poly.n, poly.domain)
