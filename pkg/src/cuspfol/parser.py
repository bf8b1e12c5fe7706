"""Recursive-descent parser for series, differential forms and quotients.

Grammar (whitespace is ignored)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("+" | "-") unary | power
    power  := atom ("^" unary)?
    atom   := number | "i" | name | "d" "(" expr ")" | "(" expr ")"

Numbers are integers, ``a/b`` through the division operator, or decimals
(decimals make the result floating point).  A name ``dv`` where ``v`` is a
coordinate is the differential of ``v``.  A product of forms is their wedge
product.  Exponents must be constant; non-integer exponents are only
accepted on coordinates in Puiseux mode, where every exponent is rescaled by
a common ramification denominator.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .forms import Form
from .scalar import QQi
from .series import DEFAULT_ORDER, TruncSeries


class ParseError(ValueError):
    """Syntax or semantic error, with the character position when known."""

    def __init__(self, message: str, position: int | None = None, text: str | None = None):
        self.position = position
        self.text = text
        if position is not None:
            message = f"{message} at position {position}"
        super().__init__(message)


_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[-+*/^()])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        kind = m.lastgroup
        if kind != "ws":
            out.append(Token(kind, m.group(), pos))
        pos = m.end()
    out.append(Token("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    def peek(self) -> Token:
        return self.toks[self.i]

    def take(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        t = self.take()
        if t.text != text:
            found = "end of input" if t.kind == "end" else repr(t.text)
            raise ParseError(f"expected {text!r}, found {found}", t.pos, self.text)
        return t

    def parse(self):
        node = self.expr()
        t = self.peek()
        if t.kind != "end":
            raise ParseError(f"unexpected token {t.text!r}", t.pos, self.text)
        return node

    def expr(self):
        node = self.term()
        while self.peek().text in ("+", "-"):
            op = self.take()
            node = (op.text, op.pos, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek().text in ("*", "/"):
            op = self.take()
            node = (op.text, op.pos, node, self.unary())
        return node

    def unary(self):
        t = self.peek()
        if t.text in ("+", "-"):
            self.take()
            inner = self.unary()
            return inner if t.text == "+" else ("neg", t.pos, inner)
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek().text == "^":
            op = self.take()
            return ("^", op.pos, base, self.unary())
        return base

    def atom(self):
        t = self.take()
        if t.kind == "num":
            return ("num", t.pos, t.text)
        if t.kind == "name":
            if t.text == "d" and self.peek().text == "(":
                self.take()
                inner = self.expr()
                self.expect(")")
                return ("d", t.pos, inner)
            return ("name", t.pos, t.text)
        if t.text == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        found = "end of input" if t.kind == "end" else repr(t.text)
        raise ParseError(f"unexpected {found}", t.pos, self.text)


def parse_tree(text: str):
    return _Parser(text).parse()


# -- evaluation ----------------------------------------------------------------

def _number(text: str):
    if re.fullmatch(r"\d+", text):
        return QQi(int(text))
    return complex(float(text))


class _Evaluator:
    def __init__(self, text, vars, env, order, puiseux):
        self.text = text
        self.vars = tuple(vars)
        self.env = dict(env or {})
        self.order = order
        self.work_order = order if order is not None else DEFAULT_ORDER
        self.puiseux = puiseux

    def err(self, msg, pos):
        raise ParseError(msg, pos, self.text)

    def const(self, c) -> Form:
        return Form.function(TruncSeries.const(c, self.vars, None))

    def ev(self, node) -> Form:
        kind, pos = node[0], node[1]
        if kind == "num":
            return self.const(_number(node[2]))
        if kind == "name":
            return self.name(node[2], pos)
        if kind == "neg":
            return -self.ev(node[2])
        if kind == "d":
            inner = self.ev(node[2])
            try:
                return inner.d()
            except ValueError as exc:
                self.err(str(exc), pos)
        if kind in ("+", "-"):
            a, b = self.ev(node[2]), self.ev(node[3])
            if a.degree != b.degree:
                self.err(f"cannot add forms of degree {a.degree} and {b.degree}", pos)
            return a + b if kind == "+" else a - b
        if kind == "*":
            a, b = self.ev(node[2]), self.ev(node[3])
            if a.degree + b.degree > len(self.vars):
                self.err("degree overflow in product of forms", pos)
            return a.wedge(b)
        if kind == "/":
            a, b = self.ev(node[2]), self.ev(node[3])
            return a.scale(self.reciprocal(b, pos))
        if kind == "^":
            return self.power(node, pos)
        self.err(f"unknown node {kind}", pos)

    def name(self, name, pos) -> Form:
        if name in self.env:
            val = self.env[name]
            if isinstance(val, Form):
                return val.with_vars(self.vars)
            if isinstance(val, TruncSeries):
                return Form.function(val.with_vars(self.vars))
            return self.const(val)
        if name in self.vars:
            if self.puiseux is not None:
                e = tuple(self.puiseux if v == name else 0 for v in self.vars)
                return Form.function(TruncSeries.monomial(e, 1, self.vars, None))
            return Form.function(TruncSeries.var(name, self.vars, None))
        if name == "i":
            return self.const(QQi(0, 1))
        if name.startswith("d") and name[1:] in self.vars:
            return Form.differential(name[1:], self.vars)
        self.err(f"unknown variable {name!r}", pos)

    def reciprocal(self, b: Form, pos) -> TruncSeries:
        if b.degree != 0:
            self.err("division by a differential form", pos)
        s = b.function_value()
        if s.is_zero():
            self.err("division by zero", pos)
        if len(s.terms) == 1 and s.valuation() == 0:
            c = s.constant_term()
            return TruncSeries.const(c.inverse() if isinstance(c, QQi) else 1 / c, self.vars, None)
        if s.constant_term() == 0:
            self.err("division by a non-unit series (use a quotient input instead)", pos)
        return s.inverse(self.work_order)

    def constant_exponent(self, node, pos) -> Fraction:
        e = _Evaluator.ev(self, node)
        if e.degree != 0:
            self.err("exponent must be a constant", pos)
        s = e.function_value()
        if s.is_zero():
            return Fraction(0)
        if any(any(k) for k in s.terms):
            self.err("exponent must be a constant", pos)
        c = s.constant_term()
        if isinstance(c, QQi) and c.im == 0:
            return c.re
        self.err("exponent must be rational", pos)

    def power(self, node, pos) -> Form:
        base = self.ev(node[2])
        expo = self.constant_exponent(node[3], node[3][1])
        if base.degree != 0:
            if expo == 1:
                return base
            self.err("powers of differential forms are not defined", pos)
        s = base.function_value()
        if expo.denominator != 1:
            if self.puiseux is None:
                self.err("fractional exponent outside Puiseux context", pos)
            # Puiseux mode: only (ramified) coordinates take fractional powers
            if len(s.terms) != 1 or next(iter(s.terms.values())) != 1 \
                    or sum(1 for k in next(iter(s.terms)) if k) != 1:
                self.err("fractional exponent allowed only on a coordinate", pos)
            e = next(iter(s.terms))
            scaled = [expo * k for k in e]
            if any(x.denominator != 1 for x in scaled):
                self.err(f"exponent {expo} incompatible with ramification {self.puiseux}", pos)
            return Form.function(TruncSeries.monomial(tuple(int(x) for x in scaled), 1, self.vars, None))
        k = int(expo)
        if k < 0:
            return Form.function(self.reciprocal(base, pos) ** (-k))
        return Form.function(s ** k)


def _finish(form: Form, order):
    if order is not None:
        form = form.truncate(order)
    return form


def parse_form(text: str, vars: Sequence[str], order: int | None = None,
               env: Mapping | None = None, puiseux: int | None = None) -> Form:
    """Parse into a ``Form`` of whatever degree the expression has."""
    tree = parse_tree(text)
    ev = _Evaluator(text, vars, env, order, puiseux)
    return _finish(ev.ev(tree), order)


def parse_expression(text: str, vars: Sequence[str], order: int | None = None,
                     env: Mapping | None = None, puiseux: int | None = None):
    """Parse a series (degree 0) or a differential form.

    Returns a ``TruncSeries`` for degree-0 input and a ``Form`` otherwise.
    With ``order=None`` polynomial input stays an exact polynomial.
    """
    w = parse_form(text, vars, order, env, puiseux)
    if w.degree == 0:
        s = w.function_value()
        if order is not None:
            s = s.truncate(order)
        return s
    return w


def parse_series(text: str, vars: Sequence[str], order: int | None = None, env=None) -> TruncSeries:
    out = parse_expression(text, vars, order, env)
    if not isinstance(out, TruncSeries):
        raise ParseError("expected a function, got a differential form")
    return out


def parse_one_form(text: str, vars: Sequence[str], order: int | None = None, env=None) -> Form:
    out = parse_form(text, vars, order, env)
    if out.degree != 1:
        raise ParseError(f"expected a 1-form, got degree {out.degree}")
    return out


# -- quotients ----------------------------------------------------------------

class _MeroEvaluator(_Evaluator):
    """Evaluates to pairs (numerator, denominator) of series."""

    def one(self):
        return TruncSeries.const(1, self.vars, None)

    def ev(self, node):
        kind, pos = node[0], node[1]
        if kind in ("num", "name"):
            f = super().ev(node)
            if f.degree != 0:
                self.err("differentials are not allowed in a function", pos)
            return f.function_value(), self.one()
        if kind == "neg":
            n, d = self.ev(node[2])
            return -n, d
        if kind == "d":
            self.err("d(...) is not allowed in a function", pos)
        if kind in ("+", "-"):
            (a, b), (c, d) = self.ev(node[2]), self.ev(node[3])
            if b == d:
                return (a + c if kind == "+" else a - c), b
            num = a * d + c * b if kind == "+" else a * d - c * b
            return num, b * d
        if kind == "*":
            (a, b), (c, d) = self.ev(node[2]), self.ev(node[3])
            return a * c, b * d
        if kind == "/":
            (a, b), (c, d) = self.ev(node[2]), self.ev(node[3])
            if c.is_zero():
                self.err("division by zero", pos)
            return a * d, b * c
        if kind == "^":
            (a, b) = self.ev(node[2])
            expo = self.constant_exponent(node[3], node[3][1])
            if expo.denominator != 1:
                self.err("fractional exponent outside Puiseux context", pos)
            k = int(expo)
            if k >= 0:
                return a ** k, b ** k
            if a.is_zero():
                self.err("division by zero", pos)
            return b ** (-k), a ** (-k)
        self.err(f"unknown node {kind}", pos)


def parse_quotient(text: str, vars: Sequence[str], env: Mapping | None = None):
    """Parse a rational expression into ``(numerator, denominator)`` polynomials."""
    tree = parse_tree(text)
    ev = _MeroEvaluator(text, vars, env, None, None)
    return ev.ev(tree)
