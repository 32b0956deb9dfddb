"""Arithmetic expression trees with forward-mode derivatives.

Charts and profile curves are supplied as plain-text formulas in the
parameters ``u1 .. un``.  The grammar covers constants, parameters, the
four arithmetic operations, integer powers and the functions sin, cos,
exp, sqrt.  Precedence is power > unary minus > mul/div > add/sub.

Every tree evaluates either on floats or on second-order jets (value,
gradient, Hessian).  Jet evaluation is exact forward-mode automatic
differentiation, which is how all chart derivatives in this package are
obtained; finite differences only ever touch derived scalar fields.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np


class ParseError(ValueError):
    """Structured parse failure with a character offset into the source."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.message = message
        self.offset = offset


# ---------------------------------------------------------------------------
# second-order jets


class Jet:
    """Value, gradient and Hessian of a scalar quantity in n parameters."""

    __slots__ = ("val", "grad", "hess")

    def __init__(self, val: float, grad: np.ndarray, hess: np.ndarray):
        self.val = float(val)
        self.grad = grad
        self.hess = hess

    @classmethod
    def seed(cls, value: float, index: int, n: int) -> "Jet":
        grad = np.zeros(n)
        grad[index] = 1.0
        return cls(value, grad, np.zeros((n, n)))

    @classmethod
    def const(cls, value: float, n: int) -> "Jet":
        return cls(value, np.zeros(n), np.zeros((n, n)))

    def _lift(self, other) -> "Jet":
        if isinstance(other, Jet):
            return other
        return Jet.const(float(other), self.grad.size)

    def __add__(self, other):
        o = self._lift(other)
        return Jet(self.val + o.val, self.grad + o.grad, self.hess + o.hess)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        return Jet(self.val - o.val, self.grad - o.grad, self.hess - o.hess)

    def __rsub__(self, other):
        return self._lift(other) - self

    def __neg__(self):
        return Jet(-self.val, -self.grad, -self.hess)

    def __mul__(self, other):
        o = self._lift(other)
        cross = np.outer(self.grad, o.grad)
        return Jet(
            self.val * o.val,
            self.val * o.grad + o.val * self.grad,
            self.val * o.hess + o.val * self.hess + cross + cross.T,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        return self * _chain(o, 1.0 / o.val, -1.0 / o.val**2, 2.0 / o.val**3)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __pow__(self, k: int):
        return jet_pow(self, k)


def _chain(x: Jet, f0: float, f1: float, f2: float) -> Jet:
    """Second-order chain rule for a unary function applied to a jet."""
    return Jet(f0, f1 * x.grad, f1 * x.hess + f2 * np.outer(x.grad, x.grad))


def jet_pow(x: Jet, k: int) -> Jet:
    if k == 0:
        return Jet.const(1.0, x.grad.size)
    if k == 1:
        return Jet(x.val, x.grad.copy(), x.hess.copy())
    if k < 0 and x.val == 0.0:
        raise ZeroDivisionError("negative power of zero")
    return _chain(x, x.val**k, k * x.val ** (k - 1), k * (k - 1) * x.val ** (k - 2))


def jet_sin(x: Jet) -> Jet:
    return _chain(x, math.sin(x.val), math.cos(x.val), -math.sin(x.val))


def jet_cos(x: Jet) -> Jet:
    return _chain(x, math.cos(x.val), -math.sin(x.val), -math.cos(x.val))


def jet_exp(x: Jet) -> Jet:
    e = math.exp(x.val)
    return _chain(x, e, e, e)


def jet_sqrt(x: Jet) -> Jet:
    if x.val <= 0.0:
        raise ValueError("sqrt argument must be positive for jet evaluation")
    r = math.sqrt(x.val)
    return _chain(x, r, 0.5 / r, -0.25 / (x.val * r))


_FUNCTIONS = {
    "sin": (math.sin, jet_sin),
    "cos": (math.cos, jet_cos),
    "exp": (math.exp, jet_exp),
    "sqrt": (math.sqrt, jet_sqrt),
}


# ---------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(
    r"(?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),])"
)

_PARAM_RE = re.compile(r"^u([1-9][0-9]*)$")


@dataclass
class _Token:
    kind: str  # num | ident | op | end
    text: str
    pos: int


def _tokenize(source: str) -> list[_Token]:
    tokens = []
    i = 0
    while i < len(source):
        if source[i].isspace():
            i += 1
            continue
        m = _TOKEN_RE.match(source, i)
        if m is None:
            raise ParseError(f"unexpected character {source[i]!r}", i)
        kind = m.lastgroup
        tokens.append(_Token(kind, m.group(), i))
        i = m.end()
    tokens.append(_Token("end", "", len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.tokens = _tokenize(source)
        self.i = 0

    def peek(self) -> _Token:
        return self.tokens[self.i]

    def advance(self) -> _Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, text: str):
        tok = self.peek()
        if tok.kind != "op" or tok.text != text:
            raise ParseError(f"expected {text!r}", tok.pos)
        return self.advance()

    def parse(self):
        node = self.expr()
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"unexpected token {tok.text!r}", tok.pos)
        return node

    def expr(self):
        node = self.term()
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.advance().text
            rhs = self.term()
            node = ("+" if op == "+" else "-", node, rhs)
        return node

    def term(self):
        node = self.unary()
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.advance().text
            rhs = self.unary()
            node = ("*" if op == "*" else "/", node, rhs)
        return node

    def unary(self):
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.advance()
            return ("neg", self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        tok = self.peek()
        if tok.kind == "op" and tok.text == "^":
            self.advance()
            sign = 1
            if self.peek().kind == "op" and self.peek().text == "-":
                self.advance()
                sign = -1
            etok = self.peek()
            if etok.kind != "num" or not etok.text.isdigit():
                raise ParseError("exponent must be an integer literal", etok.pos)
            self.advance()
            return ("pow", base, sign * int(etok.text))
        return base

    def atom(self):
        tok = self.peek()
        if tok.kind == "num":
            self.advance()
            return ("num", float(tok.text))
        if tok.kind == "ident":
            self.advance()
            m = _PARAM_RE.match(tok.text)
            if m:
                return ("u", int(m.group(1)))
            if tok.text in _FUNCTIONS:
                nxt = self.peek()
                if not (nxt.kind == "op" and nxt.text == "("):
                    raise ParseError(f"expected '(' after {tok.text}", nxt.pos)
                self.advance()
                arg = self.expr()
                nxt = self.peek()
                if nxt.kind == "op" and nxt.text == ",":
                    raise ParseError(f"{tok.text} takes exactly one argument", nxt.pos)
                self.expect_op(")")
                return ("fn", tok.text, arg)
            raise ParseError(f"unknown identifier {tok.text!r}", tok.pos)
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            node = self.expr()
            self.expect_op(")")
            return node
        if tok.kind == "end":
            raise ParseError("unexpected end of input", tok.pos)
        raise ParseError(f"unexpected token {tok.text!r}", tok.pos)


def _max_param(node) -> int:
    kind = node[0]
    if kind == "u":
        return node[1]
    if kind == "num":
        return 0
    if kind in ("neg",):
        return _max_param(node[1])
    if kind == "fn":
        return _max_param(node[2])
    if kind == "pow":
        return _max_param(node[1])
    return max(_max_param(node[1]), _max_param(node[2]))


def _eval(node, vals):
    kind = node[0]
    if kind == "num":
        return node[1]
    if kind == "u":
        return vals[node[1] - 1]
    if kind == "neg":
        return -_eval(node[1], vals)
    if kind == "+":
        return _eval(node[1], vals) + _eval(node[2], vals)
    if kind == "-":
        return _eval(node[1], vals) - _eval(node[2], vals)
    if kind == "*":
        return _eval(node[1], vals) * _eval(node[2], vals)
    if kind == "/":
        return _eval(node[1], vals) / _eval(node[2], vals)
    if kind == "pow":
        base = _eval(node[1], vals)
        k = node[2]
        if isinstance(base, Jet):
            return jet_pow(base, k)
        return float(base) ** k
    if kind == "fn":
        arg = _eval(node[2], vals)
        plain, jetted = _FUNCTIONS[node[1]]
        return jetted(arg) if isinstance(arg, Jet) else plain(arg)
    raise AssertionError(f"bad node {kind}")


def _to_source(node) -> str:
    kind = node[0]
    if kind == "num":
        return repr(node[1])
    if kind == "u":
        return f"u{node[1]}"
    if kind == "neg":
        return f"(-{_to_source(node[1])})"
    if kind == "pow":
        return f"({_to_source(node[1])})^{node[2]}" if node[2] >= 0 else f"({_to_source(node[1])})^-{-node[2]}"
    if kind == "fn":
        return f"{node[1]}({_to_source(node[2])})"
    return f"({_to_source(node[1])} {kind} {_to_source(node[2])})"


def _substitute(node, mapping):
    kind = node[0]
    if kind == "u":
        return mapping.get(node[1], node)
    if kind in ("num",):
        return node
    if kind == "neg":
        return ("neg", _substitute(node[1], mapping))
    if kind == "pow":
        return ("pow", _substitute(node[1], mapping), node[2])
    if kind == "fn":
        return ("fn", node[1], _substitute(node[2], mapping))
    return (kind, _substitute(node[1], mapping), _substitute(node[2], mapping))


@dataclass(frozen=True)
class Expr:
    """Parsed expression; callable on floats, jet() for derivatives."""

    root: tuple
    source: str
    max_param: int = field(default=0)

    def __call__(self, u) -> float:
        vals = [float(x) for x in u]
        if self.max_param > len(vals):
            raise ValueError(
                f"expression uses u{self.max_param} but only {len(vals)} parameters given"
            )
        return float(_eval(self.root, vals))

    def jet(self, u) -> Jet:
        vals = [float(x) for x in u]
        n = len(vals)
        if self.max_param > n:
            raise ValueError(
                f"expression uses u{self.max_param} but only {n} parameters given"
            )
        seeds = [Jet.seed(v, i, n) for i, v in enumerate(vals)]
        out = _eval(self.root, seeds)
        if not isinstance(out, Jet):
            out = Jet.const(float(out), n)
        return out

    def substitute(self, mapping: dict[int, "Expr"]) -> "Expr":
        """Replace parameter u<k> by the tree of mapping[k]."""
        root = _substitute(self.root, {k: e.root for k, e in mapping.items()})
        return Expr(root, _to_source(root), _max_param(root))


def parse_expression(text: str) -> Expr:
    root = _Parser(text).parse()
    return Expr(root, text, _max_param(root))
