"""Expression parser.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := ('+' | '-') unary | power
    power  := atom ('^' exponent)?
    exponent := sign? INT | '(' sign? INT ')'
    atom   := INT | IDENT | '(' expr ')'

Implicit multiplication (``2x``, ``x y``, ``)(``) is a syntax error.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import List, Tuple

from .poly import LaurentPoly, VarTable
from .ratfunc import RationalFunction

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


class ParseError(ValueError):
    def __init__(self, msg, pos):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


def _tokenize(text: str) -> List[Tuple[str, str, int]]:
    toks = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None:
            break
        if m.group(1) is not None:
            toks.append(("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            toks.append(("id", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", m.start(3))
            toks.append(("op", ch, m.start(3)))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text, table, poly):
        self.toks = _tokenize(text)
        self.i = 0
        self.table = table
        self.poly = poly

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, op):
        t = self.take()
        if t[0] != "op" or t[1] != op:
            raise ParseError(f"expected {op!r}", t[2])
        return t

    def parse(self):
        v = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise ParseError(f"unexpected token {t[1]!r}", t[2])
        return v

    def expr(self):
        v = self.term()
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in "+-":
                self.take()
                w = self.term()
                v = v + w if t[1] == "+" else v - w
            else:
                return v

    def term(self):
        v = self.unary()
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in "*/":
                self.take()
                w = self.unary()
                if t[1] == "*":
                    v = v * w
                else:
                    v = self._div(v, w, t[2])
            else:
                return v

    def _div(self, v, w, pos):
        if not self.poly:
            if w.is_zero():
                raise ParseError("division by zero", pos)
            return v / w
        if not w.is_constant():
            raise ParseError("division by a non-constant in polynomial position", pos)
        c = w.constant_value()
        if c == 0:
            raise ParseError("division by zero", pos)
        return v.scale(Fraction(1) / c)

    def unary(self):
        t = self.peek()
        if t[0] == "op" and t[1] in "+-":
            self.take()
            v = self.unary()
            return -v if t[1] == "-" else v
        return self.power()

    def power(self):
        base = self.atom()
        t = self.peek()
        if t[0] == "op" and t[1] == "^":
            self.take()
            e, pos = self.exponent()
            if e < 0 and self.poly:
                raise ParseError("negative exponent in polynomial position", pos)
            if e < 0 and base.is_zero():
                raise ParseError("division by zero", pos)
            return base ** e
        return base

    def exponent(self):
        t = self.take()
        paren = False
        if t[0] == "op" and t[1] == "(":
            paren = True
            t = self.take()
        sign = 1
        pos = t[2]
        if t[0] == "op" and t[1] in "+-":
            sign = -1 if t[1] == "-" else 1
            t = self.take()
        if t[0] != "int":
            raise ParseError("exponent must be an integer", t[2])
        if paren:
            self.expect(")")
        return sign * int(t[1]), pos

    def atom(self):
        t = self.take()
        kind, val, pos = t
        if kind == "int":
            v = LaurentPoly.const(self.table, int(val))
        elif kind == "id":
            if val not in self.table:
                raise ParseError(f"unknown variable {val!r}", pos)
            v = LaurentPoly.var(self.table, val)
        elif kind == "op" and val == "(":
            v = self.expr()
            self.expect(")")
            return v
        else:
            raise ParseError(f"unexpected token {val!r}" if val else "unexpected end of input", pos)
        if not self.poly:
            v = RationalFunction(v)
        return v


def parse_expr(text: str, table: VarTable) -> RationalFunction:
    """Parse text into a canonical rational function."""
    return _Parser(text, table, poly=False).parse()


def parse_poly(text: str, table: VarTable) -> LaurentPoly:
    """Parse text that must denote a polynomial (no negative exponents, no
    division by non-constants)."""
    return _Parser(text, table, poly=True).parse()
