"""Small arithmetic expressions in ``x`` and ``y`` evaluated with numpy.

Grammar (``^`` is right-associative and binds tighter than unary minus)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("+" | "-") unary | power
    power  := atom ("^" unary)?
    atom   := NUMBER | NAME | NAME "(" expr ("," expr)* ")" | "(" expr ")"

Names are ``x``, ``y`` and ``pi``; functions are ``abs sqrt sin cos exp log``
(one argument) and ``min max`` (two or more).
"""
from __future__ import annotations

import re

import numpy as np

from .errors import InvalidInputError

__all__ = ["Expression", "parse"]

_TOKEN = re.compile(r"\s*(?:(\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)|([A-Za-z_]\w*)|(.))")

_UNARY = {"abs": np.abs, "sqrt": np.sqrt, "sin": np.sin, "cos": np.cos, "exp": np.exp, "log": np.log}
_VARIADIC = {"min": np.minimum, "max": np.maximum}
_CONST = {"pi": np.pi}


def _tokenize(src: str):
    tokens = []
    pos = 0
    src = src.rstrip()
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        num, name, op = m.groups()
        if num is not None:
            tokens.append(("num", float(num), m.start(1)))
        elif name is not None:
            tokens.append(("name", name, m.start(2)))
        else:
            if op not in "+-*/^(),":
                raise InvalidInputError(f"unexpected character {op!r} at {m.start(3)} in {src!r}")
            tokens.append(("op", op, m.start(3)))
        pos = m.end()
    tokens.append(("end", None, len(src)))
    return tokens


class _Parser:
    def __init__(self, src):
        self.src = src
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None, value=None):
        tok = self.tokens[self.i]
        if (kind and tok[0] != kind) or (value and tok[1] != value):
            want = value or kind
            raise InvalidInputError(f"expected {want!r} at {tok[2]} in {self.src!r}")
        self.i += 1
        return tok

    def at_op(self, *ops):
        tok = self.peek()
        return tok[0] == "op" and tok[1] in ops

    def expr(self):
        node = self.term()
        while self.at_op("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            node = (lambda l, r: lambda x, y: l(x, y) + r(x, y))(node, rhs) if op == "+" else \
                (lambda l, r: lambda x, y: l(x, y) - r(x, y))(node, rhs)
        return node

    def term(self):
        node = self.unary()
        while self.at_op("*", "/"):
            op = self.take()[1]
            rhs = self.unary()
            node = (lambda l, r: lambda x, y: l(x, y) * r(x, y))(node, rhs) if op == "*" else \
                (lambda l, r: lambda x, y: l(x, y) / r(x, y))(node, rhs)
        return node

    def unary(self):
        if self.at_op("-"):
            self.take()
            inner = self.unary()
            return lambda x, y: -inner(x, y)
        if self.at_op("+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.at_op("^"):
            self.take()
            exponent = self.unary()
            return lambda x, y: np.power(base(x, y), exponent(x, y))
        return base

    def atom(self):
        kind, value, pos = self.peek()
        if kind == "num":
            self.take()
            return lambda x, y: value
        if kind == "op" and value == "(":
            self.take()
            node = self.expr()
            self.take("op", ")")
            return node
        if kind == "name":
            self.take()
            if value == "x":
                return lambda x, y: x
            if value == "y":
                return lambda x, y: y
            if value in _CONST:
                c = _CONST[value]
                return lambda x, y: c
            if value in _UNARY or value in _VARIADIC:
                self.take("op", "(")
                args = [self.expr()]
                while self.at_op(","):
                    self.take()
                    args.append(self.expr())
                self.take("op", ")")
                if value in _UNARY:
                    if len(args) != 1:
                        raise InvalidInputError(f"{value} takes one argument (at {pos})")
                    fn, arg = _UNARY[value], args[0]
                    return lambda x, y: fn(arg(x, y))
                if len(args) < 2:
                    raise InvalidInputError(f"{value} takes at least two arguments (at {pos})")
                fn = _VARIADIC[value]

                def reduce(x, y, fn=fn, args=args):
                    out = args[0](x, y)
                    for a in args[1:]:
                        out = fn(out, a(x, y))
                    return out

                return reduce
            raise InvalidInputError(f"unknown name {value!r} at {pos} in {self.src!r}")
        raise InvalidInputError(f"unexpected token at {pos} in {self.src!r}")


class Expression:
    """Compiled expression; call with numpy arrays ``x`` and ``y``."""

    def __init__(self, source: str):
        self.source = source
        parser = _Parser(source)
        self._fn = parser.expr()
        parser.take("end")

    def __call__(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        with np.errstate(all="ignore"):
            out = np.asarray(self._fn(x, y), dtype=float)
        return np.broadcast_to(out, np.broadcast(x, y).shape).copy()

    def __repr__(self):
        return f"Expression({self.source!r})"


def parse(source: str) -> Expression:
    return Expression(source)
