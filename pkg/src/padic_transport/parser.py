"""Parser for connection descriptions.

Grammar of a matrix entry (whitespace is insignificant)::

    FORM  := TERM (('+'|'-') TERM)* | '0'
    TERM  := [COEF ['*']] ATOM
    ATOM  := 'dz' | 'dlog(' RAT ')'
    COEF  := RAT
    RAT   := rational expression in z and integers with + - * / ^ ( )

A coefficient that is a sum must be parenthesized, e.g. ``(1/(z-1)) dz``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import ParseError
from .ratfunc import Poly, RationalFunction

_TOKEN_RE = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))")


@dataclass
class Token:
    kind: str
    text: str
    pos: int


def tokenize(text: str, line: int = 1):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            col = pos + 1 + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[pos:].lstrip()[:1]!r}", line, col)
        kind = "num" if m.group("num") else "name" if m.group("name") else "op"
        tokens.append(Token(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(Token("end", "", len(text)))
    return tokens


@dataclass
class FormTerm:
    coef: RationalFunction
    atom: str  # 'dz' or 'dlog'
    arg: RationalFunction = None


@dataclass
class FormExpr:
    """Sum of terms coef * dz and coef * dlog(arg)."""

    terms: list = field(default_factory=list)
    variable: str = "z"

    def is_zero(self) -> bool:
        return self.rational_form().is_zero()

    def rational_form(self) -> RationalFunction:
        """The rational function r with form = r(z) dz."""
        total = RationalFunction(0)
        for t in self.terms:
            if t.atom == "dz":
                total = total + t.coef
            else:
                total = total + t.coef * t.arg.dlog()
        return total

    def render(self) -> str:
        if not self.terms:
            return "0"
        out = ""
        for i, t in enumerate(self.terms):
            coef = t.coef
            sign = "+"
            if coef.num.lead() < 0 and coef.is_polynomial() and coef.num.degree == 0:
                sign, coef = "-", -coef
            atom = "d" + self.variable if t.atom == "dz" else f"dlog({t.arg.render(self.variable)})"
            if coef == RationalFunction(1):
                body = atom
            else:
                body = f"({coef.render(self.variable)})*{atom}"
            if i == 0:
                out = ("-" if sign == "-" else "") + body
            else:
                out += f" {sign} {body}"
        return out

    def __eq__(self, other):
        if not isinstance(other, FormExpr):
            return NotImplemented
        return self.rational_form() == other.rational_form()

    def same_syntax(self, other) -> bool:
        if len(self.terms) != len(other.terms):
            return False
        return all(
            a.atom == b.atom and a.coef == b.coef and (a.arg == b.arg if a.atom == "dlog" else True)
            for a, b in zip(self.terms, other.terms)
        )

    __hash__ = None

    def __repr__(self):
        return f"FormExpr({self.render()!r})"


class _Parser:
    def __init__(self, text, variable="z", line=1):
        self.text = text
        self.variable = variable
        self.line = line
        self.toks = tokenize(text, line)
        self.i = 0

    # helpers ------------------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        raise ParseError(msg, self.line, tok.pos + 1)

    def eat(self, text=None, kind=None):
        t = self.tok
        if text is not None and t.text != text:
            self.error(f"expected {text!r}, found {t.text or 'end of input'!r}")
        if kind is not None and t.kind != kind:
            self.error(f"expected {kind}, found {t.text or 'end of input'!r}")
        self.i += 1
        return t

    def at_atom(self, offset=0) -> bool:
        t = self.toks[self.i + offset]
        return t.kind == "name" and t.text in ("d" + self.variable, "dlog")

    # RAT ----------------------------------------------------------------
    def rat_expr(self):
        val = self.rat_term()
        while self.tok.text in ("+", "-") and self.tok.kind == "op":
            op = self.eat().text
            rhs = self.rat_term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def rat_term(self, stop_at_atom=False):
        val = self.rat_unary()
        while self.tok.kind == "op" and self.tok.text in ("*", "/"):
            if stop_at_atom and self.tok.text == "*" and self.at_atom(1):
                break
            op = self.eat().text
            rhs = self.rat_unary()
            if op == "*":
                val = val * rhs
            else:
                if rhs.is_zero():
                    self.error("division by zero", self.toks[self.i - 1])
                val = val / rhs
        return val

    def rat_unary(self):
        if self.tok.kind == "op" and self.tok.text in ("-", "+"):
            op = self.eat().text
            v = self.rat_unary()
            return -v if op == "-" else v
        return self.rat_power()

    def rat_power(self):
        base = self.rat_atom()
        if self.tok.kind == "op" and self.tok.text == "^":
            self.eat()
            neg = False
            if self.tok.text == "-":
                self.eat()
                neg = True
            e = int(self.eat(kind="num").text)
            if neg and base.is_zero():
                self.error("zero to a negative power")
            base = base ** (-e if neg else e)
        return base

    def rat_atom(self):
        t = self.tok
        if t.kind == "num":
            self.eat()
            return RationalFunction(Fraction(int(t.text)))
        if t.kind == "name":
            if t.text == self.variable:
                self.eat()
                return RationalFunction(Poly.x())
            if self.at_atom():
                self.error(f"differential {t.text!r} where a rational expression was expected")
            self.error(f"unknown variable {t.text!r}")
        if t.text == "(":
            self.eat()
            v = self.rat_expr()
            self.eat(")")
            return v
        self.error(f"unexpected {t.text or 'end of input'!r}")

    # FORM ---------------------------------------------------------------
    def form(self) -> FormExpr:
        terms = []
        sign = 1
        if self.tok.kind == "op" and self.tok.text in ("+", "-") and self.at_atom(1):
            sign = -1 if self.eat().text == "-" else 1
        terms.append(self.term(sign))
        while self.tok.kind == "op" and self.tok.text in ("+", "-"):
            sign = -1 if self.eat().text == "-" else 1
            terms.append(self.term(sign))
        if self.tok.kind != "end":
            self.error(f"unexpected {self.tok.text!r} after form")
        return FormExpr(terms, self.variable)

    def term(self, sign) -> FormTerm:
        coef = RationalFunction(1)
        if not self.at_atom():
            coef = self.rat_term(stop_at_atom=True)
            if self.tok.text == "*" and self.at_atom(1):
                self.eat("*")
            if not self.at_atom():
                self.error("expected 'dz' or 'dlog(' after coefficient")
        atom = self.eat(kind="name").text
        if sign < 0:
            coef = -coef
        if atom == "dlog":
            self.eat("(")
            arg = self.rat_expr()
            self.eat(")")
            if arg.is_zero():
                self.error("dlog of the zero function")
            return FormTerm(coef, "dlog", arg)
        if self.tok.kind == "name" and self.at_atom():
            self.error("two differentials in one term")
        return FormTerm(coef, "dz")


def parse_rational(text: str, variable: str = "z") -> RationalFunction:
    p = _Parser(text, variable)
    v = p.rat_expr()
    if p.tok.kind != "end":
        p.error(f"unexpected {p.tok.text!r}")
    return v


def parse_form(text: str, variable: str = "z", line: int = 1) -> FormExpr:
    if text.strip() == "0":
        return FormExpr([], variable)
    return _Parser(text, variable, line).form()


@dataclass
class ConnectionSpec:
    """A validated connection document."""

    prime: int
    precision: int
    rank: int
    variable: str
    matrix: list
    frobenius_lift: RationalFunction = None
    singularities: list = None

    def rational_matrix(self):
        return [[entry.rational_form() for entry in row] for row in self.matrix]


def parse_connection(document) -> ConnectionSpec:
    """Parse a connection description (JSON text, dict, or matrix list)."""
    if isinstance(document, str):
        try:
            data = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    else:
        data = document
    if isinstance(data, list):
        data = {"matrix": data}
    if not isinstance(data, dict):
        raise ParseError("connection document must be a JSON object")
    matrix = data.get("matrix")
    if not isinstance(matrix, list) or not matrix:
        raise ParseError("field 'matrix' must be a non-empty array")
    rank = data.get("rank", len(matrix))
    if not isinstance(rank, int) or rank != len(matrix):
        raise ParseError(f"rank {rank!r} does not match the number of rows {len(matrix)}")
    variable = data.get("variable", "z")
    if not isinstance(variable, str) or not re.fullmatch(r"[A-Za-z]", variable):
        raise ParseError("field 'variable' must be a single letter")
    rows = []
    for i, row in enumerate(matrix):
        if not isinstance(row, list) or len(row) != rank:
            raise ParseError(f"matrix is not square: row {i} has the wrong length")
        parsed = []
        for j, entry in enumerate(row):
            if not isinstance(entry, str):
                raise ParseError(f"matrix entry ({i},{j}) must be a string")
            try:
                parsed.append(parse_form(entry, variable))
            except ParseError as exc:
                raise ParseError(f"entry ({i},{j}): {exc.args[0]}") from None
        rows.append(parsed)
    lift = data.get("frobenius_lift")
    lift_rf = None
    if lift is not None:
        text = str(lift)
        if re.search(r"\bp\b", text):
            if not isinstance(data.get("prime"), int):
                raise ParseError("frobenius_lift mentions p but no prime is given")
            text = re.sub(r"\bp\b", str(data["prime"]), text)
        lift_rf = parse_rational(text, variable)
        if not lift_rf.is_polynomial():
            raise ParseError("frobenius_lift must be a polynomial")
    sing = data.get("singularities")
    if sing is not None:
        try:
            sing = [Fraction(str(s)) if str(s) != "inf" else "inf" for s in sing]
        except (ValueError, ZeroDivisionError):
            raise ParseError("singularities must be rational strings") from None
    prime = data.get("prime")
    precision = data.get("precision")
    if prime is not None and not isinstance(prime, int):
        raise ParseError("field 'prime' must be an integer")
    if precision is not None and not isinstance(precision, int):
        raise ParseError("field 'precision' must be an integer")
    return ConnectionSpec(prime, precision, rank, variable, rows, lift_rf, sing)
