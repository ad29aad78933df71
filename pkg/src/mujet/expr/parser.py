"""Pratt parser for the expression grammar.

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' unary)?
    atom    := NUMBER | NAME | NAME '(' args ')' | NAME '[' ints ']' '(' args ')'
             | '(' expr ')'

Jet variables are written ``u_xt``: dependent name, underscore, then the
independent names (each repeated by its derivative order).  The suffix may
list names in any order; the canonical order is the bundle's declaration
order.  ``P[1,0,2](x,t,u)`` is a formal derivative of the undefined function
``P`` with the given order per argument slot.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import sympy as sp

from ..errors import ParseError, UndeclaredSymbolError
from .core import ELEMENTARY, canonical, function_derivative

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z][A-Za-z0-9]*(?:_[A-Za-z][A-Za-z0-9]*)?)"
    r"|(?P<op>\*\*|[-+*/^(),\[\]]))"
)

_BINARY = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 40, "**": 40}
_UNARY_MINUS = 30


@dataclass
class Token:
    kind: str
    value: str
    pos: int


def tokenize(text):
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos:].lstrip()[:1]!r}", pos, text)
        kind = m.lastgroup
        tokens.append(Token(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(Token("end", "", n))
    return tokens


class _Parser:
    def __init__(self, text, context):
        self.text = text
        self.context = context
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def advance(self):
        t = self.tokens[self.i]
        self.i += 1
        return t

    def expect(self, value):
        t = self.advance()
        if t.value != value:
            found = t.value or "end of input"
            raise ParseError(f"expected {value!r}, found {found!r}", t.pos, self.text)
        return t

    def parse(self):
        e = self.expression(0)
        if self.tok.kind != "end":
            raise ParseError(f"unexpected {self.tok.value!r}", self.tok.pos, self.text)
        return e

    def expression(self, rbp):
        left = self.prefix()
        while True:
            t = self.tok
            lbp = _BINARY.get(t.value, 0) if t.kind == "op" else 0
            if lbp <= rbp:
                return left
            self.advance()
            if t.value in ("^", "**"):
                # right associative; binds tighter than unary minus on its left
                right = self.expression(_UNARY_MINUS - 1)
                left = self.power(left, right, t)
            else:
                right = self.expression(lbp)
                if t.value == "+":
                    left = left + right
                elif t.value == "-":
                    left = left - right
                elif t.value == "*":
                    left = left * right
                else:
                    if right == 0:
                        raise ParseError("division by zero", t.pos, self.text)
                    left = left / right

    def power(self, base, exponent, tok):
        if not exponent.is_Rational:
            raise ParseError("exponent must be an exact rational constant", tok.pos, self.text)
        if base == 0 and exponent < 0:
            raise ParseError("division by zero", tok.pos, self.text)
        return base**exponent

    def prefix(self):
        t = self.advance()
        if t.kind == "num":
            return sp.Integer(int(t.value))
        if t.value == "-":
            return -self.expression(_UNARY_MINUS)
        if t.value == "+":
            return self.expression(_UNARY_MINUS)
        if t.value == "(":
            e = self.expression(0)
            self.expect(")")
            return e
        if t.kind == "name":
            return self.name(t)
        found = t.value or "end of input"
        raise ParseError(f"unexpected {found!r}", t.pos, self.text)

    def arguments(self):
        self.expect("(")
        args = [self.expression(0)]
        while self.tok.value == ",":
            self.advance()
            args.append(self.expression(0))
        self.expect(")")
        return args

    def name(self, t):
        name = t.value
        if name in ELEMENTARY and self.tok.value == "(":
            args = self.arguments()
            if len(args) != 1:
                raise ParseError(f"{name} takes exactly one argument", t.pos, self.text)
            return ELEMENTARY[name](args[0])
        if self.context.is_function(name):
            orders = None
            if self.tok.value == "[":
                self.advance()
                orders = [self.integer()]
                while self.tok.value == ",":
                    self.advance()
                    orders.append(self.integer())
                self.expect("]")
            if self.tok.value != "(":
                raise ParseError(f"function {name!r} must be applied to arguments", t.pos, self.text)
            args = self.arguments()
            for a in args:
                if not isinstance(a, sp.Symbol):
                    raise ParseError(
                        f"arguments of {name!r} must be declared symbols", t.pos, self.text
                    )
            if len(set(args)) != len(args):
                raise ParseError(f"repeated argument in {name!r}", t.pos, self.text)
            app = sp.Function(name)(*args)
            if orders is None:
                return app
            if len(orders) != len(args):
                raise ParseError(
                    f"{name!r}: {len(orders)} derivative orders for {len(args)} arguments",
                    t.pos,
                    self.text,
                )
            return function_derivative(app, orders)
        try:
            sym = self.context.resolve(name)
        except ParseError as exc:
            raise type(exc)(str(exc), t.pos, self.text) from None
        if sym is None:
            raise UndeclaredSymbolError(f"undeclared symbol {name!r}", t.pos, self.text)
        return sym

    def integer(self):
        t = self.advance()
        if t.kind != "num":
            raise ParseError("expected a non-negative integer", t.pos, self.text)
        return int(t.value)


def parse(text, context):
    """Parse ``text`` into a canonical expression.

    ``context`` is a :class:`~mujet.expr.symbols.SymbolTable`.
    """
    return canonical(_Parser(text, context).parse())
