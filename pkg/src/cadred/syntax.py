"""Text form of expressions, predicates and exact values.

Grammar (whitespace-insensitive except inside rational literals such as ``1/2``)::

    expr  := term (('+' | '-') term)*
    term  := unary (('*' | '/') unary)*
    unary := '-' unary | '+' unary | power
    power := atom ('^' INT)?
    atom  := NUMBER | 'x' INT | '(' expr ')' | 'sqrt(' expr ')' | 'sign(' expr ')'
           | 'piecewise{' pred '->' expr (';' pred '->' expr)* ';' 'else' '->' expr '}'
           | 'inf'
    pred  := conj ('or' conj)*
    conj  := neg ('and' neg)*
    neg   := 'not' neg | 'true' | 'false' | '(' pred ')' | expr REL expr

A minus sign directly in front of a number literal folds into the constant.
Comparisons ``a REL b`` are stored as ``a - b REL 0``.
"""
from __future__ import annotations

import re
from fractions import Fraction

from .algebra import (
    Add, And, Atom, BoolConst, Const, Div, ExtVal, Mul, Neg, NegInf, Not, Or,
    Piecewise, PosInf, Pow, RELATIONS, Sign, Sqrt, Sub, Var, evaluate,
    format_value,
)
from .errors import ParseError

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>\d+(?:/\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>->|<=|>=|!=|==|[-+*/^()<>=,;:{}.\[\]|])
""", re.VERBOSE)

_KEYWORDS = {"sqrt", "sign", "piecewise", "else", "and", "or", "not", "true", "false", "inf", "u"}


def tokenize(text: str):
    out, pos = [], 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r} at column {pos + 1}")
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos))
        pos = m.end()
    return out


class Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    # token helpers
    def peek(self, offset=0):
        j = self.i + offset
        return self.toks[j] if j < len(self.toks) else ("eof", "", len(self.text))

    def at(self, value, offset=0):
        return self.peek(offset)[1] == value and self.peek(offset)[0] != "eof"

    def take(self, value=None):
        tok = self.peek()
        if tok[0] == "eof" or (value is not None and tok[1] != value):
            want = f"{value!r}" if value else "a token"
            raise ParseError(f"expected {want} at column {tok[2] + 1} in {self.text!r}")
        self.i += 1
        return tok

    def at_end(self):
        return self.i >= len(self.toks)

    def expect_end(self):
        if not self.at_end():
            tok = self.peek()
            raise ParseError(f"unexpected {tok[1]!r} at column {tok[2] + 1} in {self.text!r}")

    # expressions
    def expr(self):
        node = self.term()
        while self.at("+") or self.at("-"):
            op = self.take()[1]
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self):
        node = self.unary()
        while self.at("*") or self.at("/"):
            op = self.take()[1]
            rhs = self.unary()
            node = Mul(node, rhs) if op == "*" else Div(node, rhs)
        return node

    def unary(self):
        if self.at("-") or self.at("+"):
            op = self.take()[1]
            if self.at("inf"):
                self.take()
                return PosInf() if op == "+" else NegInf()
            if op == "-" and self.peek()[0] == "num" and not self.at("^", 1):
                return Const(-Fraction(self.take()[1]))
            arg = self.unary()
            return Neg(arg) if op == "-" else arg
        return self.power()

    def power(self):
        base = self.atom()
        if self.at("^"):
            self.take()
            tok = self.take()
            if tok[0] != "num" or "/" in tok[1]:
                raise ParseError(f"exponent must be a natural number, got {tok[1]!r}")
            return Pow(base, int(tok[1]))
        return base

    def atom(self):
        kind, value, pos = self.peek()
        if kind == "num":
            self.take()
            return Const(Fraction(value))
        if kind == "name":
            if re.fullmatch(r"x\d+", value):
                self.take()
                axis = int(value[1:])
                if axis < 1:
                    raise ParseError("variables are numbered from x1")
                return Var(axis)
            if value in ("sqrt", "sign"):
                self.take()
                self.take("(")
                arg = self.expr()
                self.take(")")
                return Sqrt(arg) if value == "sqrt" else Sign(arg)
            if value == "piecewise":
                return self.piecewise()
            if value == "inf":
                self.take()
                return PosInf()
            raise ParseError(f"unknown name {value!r} at column {pos + 1}")
        if value == "(":
            self.take()
            node = self.expr()
            self.take(")")
            return node
        raise ParseError(f"unexpected {value or 'end of input'!r} at column {pos + 1} in {self.text!r}")

    def piecewise(self):
        self.take("piecewise")
        self.take("{")
        branches = []
        while not self.at("else"):
            cond = self.pred()
            self.take("->")
            branches.append((cond, self.expr()))
            self.take(";")
        self.take("else")
        self.take("->")
        default = self.expr()
        self.take("}")
        return Piecewise(tuple(branches), default)

    # predicates
    def pred(self):
        args = [self.conj()]
        while self.at("or"):
            self.take()
            args.append(self.conj())
        return args[0] if len(args) == 1 else Or(tuple(args))

    def conj(self):
        args = [self.neg()]
        while self.at("and"):
            self.take()
            args.append(self.neg())
        return args[0] if len(args) == 1 else And(tuple(args))

    def neg(self):
        if self.at("not"):
            self.take()
            return Not(self.neg())
        if self.at("true") or self.at("false"):
            return BoolConst(self.take()[1] == "true")
        if self.at("("):
            saved = self.i
            try:
                return self.comparison()
            except ParseError:
                self.i = saved
            self.take("(")
            inner = self.pred()
            self.take(")")
            return inner
        return self.comparison()

    def comparison(self):
        lhs = self.expr()
        tok = self.peek()
        rel = "=" if tok[1] == "==" else tok[1]
        if rel not in RELATIONS:
            raise ParseError(f"expected a relation at column {tok[2] + 1} in {self.text!r}")
        self.take()
        rhs = self.expr()
        if rhs == Const(Fraction(0)):
            return Atom(lhs, rel)
        return Atom(Sub(lhs, rhs), rel)


def parse_expr(text: str):
    p = Parser(text)
    e = p.expr()
    p.expect_end()
    return e


def parse_pred(text: str):
    p = Parser(text)
    e = p.pred()
    p.expect_end()
    return e


def parse_value(text: str):
    """Parse a constant expression and evaluate it to an exact value."""
    from .algebra import arity
    e = parse_expr(text)
    if arity(e):
        raise ParseError(f"value {text!r} must not contain variables")
    v = evaluate(e)
    if not isinstance(v, ExtVal):
        raise ParseError(f"value {text!r} is not a finite exact number")
    return v


# printing ---------------------------------------------------------------

_ATOMIC = (Var, Sqrt, Sign, Piecewise)


def _fmt(e):
    """Return (text, precedence): 1 sum, 2 product, 3 unary, 4 power, 5 atom."""
    if isinstance(e, Const):
        v = e.value
        return (str(v), 3) if v < 0 else (str(v), 5)
    if isinstance(e, Var):
        return f"x{e.axis}", 5
    if isinstance(e, PosInf):
        return "+inf", 3
    if isinstance(e, NegInf):
        return "-inf", 3
    if isinstance(e, Neg):
        s, _ = _fmt(e.arg)
        if not isinstance(e.arg, _ATOMIC):
            s = f"({s})"
        return "-" + s, 3
    if isinstance(e, (Add, Sub)):
        op = "+" if isinstance(e, Add) else "-"
        return f"{_wrap(e.left, 1)} {op} {_wrap(e.right, 2)}", 1
    if isinstance(e, (Mul, Div)):
        op = "*" if isinstance(e, Mul) else "/"
        return f"{_wrap(e.left, 2)} {op} {_wrap(e.right, 3)}", 2
    if isinstance(e, Pow):
        return f"{_wrap(e.base, 5)}^{e.exp}", 4
    if isinstance(e, Sqrt):
        return f"sqrt({format_expr(e.arg)})", 5
    if isinstance(e, Sign):
        return f"sign({format_expr(e.arg)})", 5
    if isinstance(e, Piecewise):
        parts = [f"{format_pred(p)} -> {format_expr(b)}" for p, b in e.branches]
        parts.append(f"else -> {format_expr(e.default)}")
        return "piecewise{" + "; ".join(parts) + "}", 5
    raise TypeError(f"cannot format {e!r}")


def _wrap(e, min_prec):
    s, prec = _fmt(e)
    return s if prec >= min_prec else f"({s})"


def format_expr(e) -> str:
    return _fmt(e)[0]


def format_pred(p, _ctx=0) -> str:
    """Print a predicate; _ctx is 0 at top level, 1 inside 'or', 2 inside 'and' or 'not'."""
    if isinstance(p, Atom):
        s = f"{format_expr(p.expr)} {p.rel} 0"
        return f"({s})" if _ctx == 3 else s
    if isinstance(p, BoolConst):
        return "true" if p.value else "false"
    if isinstance(p, Not):
        return "not " + format_pred(p.arg, 3)
    if isinstance(p, Or):
        s = " or ".join(format_pred(a, 1) for a in p.args)
        return f"({s})" if _ctx >= 1 else s
    if isinstance(p, And):
        s = " and ".join(format_pred(a, 2) for a in p.args)
        return f"({s})" if _ctx >= 2 else s
    raise TypeError(f"cannot format {p!r}")


__all__ = [
    "Parser", "format_expr", "format_pred", "format_value", "parse_expr",
    "parse_pred", "parse_value", "tokenize",
]
