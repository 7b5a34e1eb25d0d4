"""Exact values in Q and Q(sqrt c), and the closed expression language.

Values are ``ExtVal`` instances ``a + b*sqrt(c)`` with rational ``a``, ``b``
and a square-free integer ``c``, plus the two markers ``Infinite`` and
``INDETERMINATE``.  Expressions are immutable term trees evaluated exactly;
predicates are boolean combinations of sign conditions on expressions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ArityMismatch, DomainError, IndeterminateSign, UndecidableAtom

TRIAL_DIVISION_BOUND = 10_000


def _sieve(limit):
    flags = bytearray([1]) * (limit + 1)
    flags[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(limit) + 1):
        if flags[i]:
            flags[i * i::i] = bytearray(len(flags[i * i::i]))
    return [i for i, f in enumerate(flags) if f]


_PRIMES = _sieve(TRIAL_DIVISION_BOUND)


def squarefree_split(n: int):
    """Return (k, m) with n = k*k*m and m free of prime squares below the bound."""
    if n <= 0:
        raise ValueError("squarefree_split expects a positive integer")
    k, m = 1, n
    for p in _PRIMES:
        pp = p * p
        if pp > m:
            break
        while m % pp == 0:
            m //= pp
            k *= p
    r = math.isqrt(m)
    if r * r == m:
        k, m = k * r, 1
    return k, m


class FieldMismatch(ArithmeticError):
    """Operands live in different quadratic fields."""


def _q(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class ExtVal:
    """An exact real number a + b*sqrt(c); c is 1 exactly when b is 0."""

    __slots__ = ("a", "b", "c")

    def __init__(self, a=0, b=0, c=1):
        a, b, c = _q(a), _q(b), _q(c)
        if c < 0:
            raise ValueError("negative radicand in ExtVal")
        if b == 0 or c == 0:
            b, c = Fraction(0), 1
        else:
            # sqrt(p/q) = sqrt(p*q)/q
            num = c.numerator * c.denominator
            b = b / c.denominator
            k, m = squarefree_split(num)
            b = b * k
            c = m
            if c == 1:
                a, b = a + b, Fraction(0)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", int(c))

    def __setattr__(self, name, value):
        raise AttributeError("ExtVal is immutable")

    @property
    def is_rational(self):
        return self.b == 0

    def rational(self) -> Fraction:
        if self.b != 0:
            raise ValueError(f"{self} is irrational")
        return self.a

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        if not isinstance(other, ExtVal):
            return NotImplemented
        return (self.a, self.b, self.c) == (other.a, other.b, other.c)

    def __hash__(self):
        return hash((self.a, self.b, self.c))

    def __repr__(self):
        if self.b == 0:
            return f"Rational({self.a})"
        return f"Radical({self.a}, {self.b}, {self.c})"

    def __str__(self):
        return format_value(self)

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.c)

    # arithmetic -------------------------------------------------------

    def _common(self, other):
        other = as_value(other)
        if not isinstance(other, ExtVal):
            raise TypeError(other)
        if self.b == 0 or other.b == 0 or self.c == other.c:
            c = self.c if self.b != 0 else other.c
            return other, c, self.b, other.b
        # Unreduced radicands beyond the trial-division bound may still agree.
        prod = self.c * other.c
        r = math.isqrt(prod)
        if r * r == prod:
            return other, self.c, self.b, other.b * Fraction(r, self.c)
        raise FieldMismatch(f"{self} and {other} lie in different fields")

    def __add__(self, other):
        other, c, b1, b2 = self._common(other)
        return ExtVal(self.a + other.a, b1 + b2, c)

    __radd__ = __add__

    def __neg__(self):
        return ExtVal(-self.a, -self.b, self.c)

    def __sub__(self, other):
        return self + (-as_value(other))

    def __rsub__(self, other):
        return as_value(other) - self

    def __mul__(self, other):
        other, c, b1, b2 = self._common(other)
        return ExtVal(self.a * other.a + b1 * b2 * c, self.a * b2 + other.a * b1, c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = as_value(other)
        if other.b == 0:
            if other.a == 0:
                raise ZeroDivisionError("division by zero")
            return ExtVal(self.a / other.a, self.b / other.a, self.c)
        norm = other.a * other.a - other.b * other.b * other.c
        conj = ExtVal(other.a / norm, -other.b / norm, other.c)
        return self * conj

    def __rtruediv__(self, other):
        return as_value(other) / self

    def __pow__(self, k: int):
        if k < 0:
            return ExtVal(1) / (self ** (-k))
        result, base = ExtVal(1), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result


class Infinite:
    """Signed infinity, used for unbounded section bounds and limits."""

    __slots__ = ("sign",)

    def __init__(self, sign: int):
        object.__setattr__(self, "sign", 1 if sign > 0 else -1)

    def __setattr__(self, name, value):
        raise AttributeError("Infinite is immutable")

    def __eq__(self, other):
        return isinstance(other, Infinite) and other.sign == self.sign

    def __hash__(self):
        return hash(("inf", self.sign))

    def __neg__(self):
        return Infinite(-self.sign)

    def __repr__(self):
        return "+inf" if self.sign > 0 else "-inf"

    __str__ = __repr__

    def __float__(self):
        return math.inf if self.sign > 0 else -math.inf


class _Indeterminate:
    __slots__ = ()

    def __repr__(self):
        return "Indeterminate"

    def __float__(self):
        return math.nan


INDETERMINATE = _Indeterminate()
POS_INF = Infinite(1)
NEG_INF = Infinite(-1)


def Rational(q) -> ExtVal:
    return ExtVal(q)


def Radical(a, b, c) -> ExtVal:
    return ExtVal(a, b, c)


def as_value(x):
    if isinstance(x, (ExtVal, Infinite, _Indeterminate)):
        return x
    if isinstance(x, (int, Fraction)):
        return ExtVal(x)
    if isinstance(x, str):
        return ExtVal(Fraction(x))
    raise TypeError(f"not an exact value: {x!r}")


def is_finite(v) -> bool:
    return isinstance(v, ExtVal)


def format_value(v) -> str:
    if isinstance(v, Infinite):
        return repr(v)
    if v is INDETERMINATE:
        return "indeterminate"
    if v.b == 0:
        return str(v.a)
    rad = f"sqrt({v.c})"
    coef = "" if v.b == 1 else ("-" if v.b == -1 else f"{v.b}*")
    if v.a == 0:
        return f"{coef}{rad}"
    if v.b > 0:
        tail = rad if v.b == 1 else f"{v.b}*{rad}"
        return f"{v.a} + {tail}"
    tail = rad if v.b == -1 else f"{-v.b}*{rad}"
    return f"{v.a} - {tail}"


# signs and comparisons ---------------------------------------------------

def _sgn(q) -> int:
    return (q > 0) - (q < 0)


def sign(val) -> int:
    """Exact sign of a value; a + b*sqrt(c) is decided by comparing a^2 with b^2*c."""
    if val is INDETERMINATE:
        raise IndeterminateSign("sign of an indeterminate value")
    if isinstance(val, Infinite):
        return val.sign
    val = as_value(val)
    sa, sb = _sgn(val.a), _sgn(val.b)
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    return sa if val.a * val.a > val.b * val.b * val.c else sb


def _sign_two_radicals(r, s, c, t, d) -> int:
    """Sign of r + s*sqrt(c) + t*sqrt(d) with rational r, s, t."""
    if s == 0 or c == 1:
        return sign(ExtVal(r + (s if c == 1 else 0), t, d))
    if t == 0 or d == 1:
        return sign(ExtVal(r + (t if d == 1 else 0), s, c))
    if c == d:
        return sign(ExtVal(r, s + t, c))
    # sign of the radical part s*sqrt(c) + t*sqrt(d)
    rad = _sgn(s) if _sgn(s) == _sgn(t) else (
        _sgn(s) if s * s * c > t * t * d else _sgn(t))
    if _sgn(r) == 0:
        return rad
    if _sgn(r) == rad:
        return rad
    # r and the radical part have opposite signs: compare r^2 with (s√c + t√d)^2
    diff = ExtVal(r * r - s * s * c - t * t * d, -2 * s * t, c * d)
    return _sgn(r) * sign(diff) if sign(diff) != 0 else 0


def compare(u, v) -> int:
    """Exact three-way comparison of two finite or infinite values."""
    if u is INDETERMINATE or v is INDETERMINATE:
        raise IndeterminateSign("comparison with an indeterminate value")
    if isinstance(u, Infinite) or isinstance(v, Infinite):
        su = u.sign * 2 if isinstance(u, Infinite) else 0
        sv = v.sign * 2 if isinstance(v, Infinite) else 0
        return _sgn(su - sv)
    if isinstance(u, (int, Fraction)) and isinstance(v, (int, Fraction)):
        return _sgn(u - v)
    u, v = as_value(u), as_value(v)
    if u.b == 0 and v.b == 0:
        return _sgn(u.a - v.a)
    try:
        return sign(u - v)
    except FieldMismatch:
        return _sign_two_radicals(u.a - v.a, u.b, u.c, -v.b, v.c)


def sqrt_value(v, term=None, point=None):
    """Square root in Q(sqrt c); INDETERMINATE when the result leaves the field."""
    if isinstance(v, Infinite):
        if v.sign < 0:
            raise DomainError(term, point, "square root of -inf")
        return v
    if v is INDETERMINATE:
        return v
    if sign(v) < 0:
        raise DomainError(term, point, "square root of a negative value")
    if v.b == 0:
        return ExtVal(0, 1, v.a)
    # (u + w*sqrt(c))^2 = u^2 + c*w^2 + 2*u*w*sqrt(c)
    disc = v.a * v.a - v.b * v.b * v.c
    if disc < 0:
        return INDETERMINATE
    s = _rational_sqrt(disc)
    if s is None:
        return INDETERMINATE
    for u2 in ((v.a + s) / 2, (v.a - s) / 2):
        u = _rational_sqrt(u2) if u2 > 0 else None
        if u is not None:
            cand = ExtVal(u, v.b / (2 * u), v.c)
            return cand if sign(cand) >= 0 else -cand
    return INDETERMINATE


def _rational_sqrt(q: Fraction):
    if q < 0:
        return None
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def rational_between(lo, hi) -> Fraction:
    """A simple rational strictly between two values (either may be infinite)."""
    lo_inf = isinstance(lo, Infinite)
    hi_inf = isinstance(hi, Infinite)
    if lo_inf and hi_inf:
        return Fraction(0)
    if lo_inf:
        return Fraction(math.floor(float(hi))) - 1
    if hi_inf:
        return Fraction(math.ceil(float(lo))) + 1
    if lo.is_rational and hi.is_rational:
        return (lo.a + hi.a) / 2
    a, b = float(lo), float(hi)
    den = 2
    while True:
        q = Fraction((a + b) / 2).limit_denominator(den)
        if compare(lo, q) < 0 and compare(q, hi) < 0:
            return q
        den *= 4
        if den > 1 << 200:
            raise ValueError(f"no rational found between {lo} and {hi}")


# expressions ------------------------------------------------------------

class Expr:
    """Base class of expression nodes; subclasses are frozen dataclasses."""

    __slots__ = ()

    def __add__(self, other):
        return Add(self, lift(other))

    def __radd__(self, other):
        return Add(lift(other), self)

    def __sub__(self, other):
        return Sub(self, lift(other))

    def __rsub__(self, other):
        return Sub(lift(other), self)

    def __mul__(self, other):
        return Mul(self, lift(other))

    def __rmul__(self, other):
        return Mul(lift(other), self)

    def __truediv__(self, other):
        return Div(self, lift(other))

    def __rtruediv__(self, other):
        return Div(lift(other), self)

    def __neg__(self):
        return Neg(self)

    def __pow__(self, k):
        return Pow(self, int(k))

    def __str__(self):
        from .syntax import format_expr
        return format_expr(self)


@dataclass(frozen=True)
class Const(Expr):
    value: Fraction


@dataclass(frozen=True)
class Var(Expr):
    axis: int


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exp: int


@dataclass(frozen=True)
class Sqrt(Expr):
    arg: Expr


@dataclass(frozen=True)
class Sign(Expr):
    arg: Expr


@dataclass(frozen=True)
class Piecewise(Expr):
    branches: tuple  # of (Pred, Expr)
    default: Expr


@dataclass(frozen=True)
class PosInf(Expr):
    pass


@dataclass(frozen=True)
class NegInf(Expr):
    pass


def lift(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction)):
        return Const(Fraction(x))
    if isinstance(x, ExtVal):
        return value_expr(x)
    raise TypeError(f"cannot use {x!r} as an expression")


def value_expr(v) -> Expr:
    """Expression denoting an exact value."""
    if isinstance(v, Infinite):
        return PosInf() if v.sign > 0 else NegInf()
    v = as_value(v)
    if v.b == 0:
        return Const(v.a)
    rad = Sqrt(Const(Fraction(v.c)))
    term = rad if v.b == 1 else Mul(Const(v.b), rad)
    return term if v.a == 0 else Add(Const(v.a), term)


# predicates ---------------------------------------------------------------

RELATIONS = ("<", "<=", "=", "!=", ">=", ">")


class Pred:
    __slots__ = ()

    def __str__(self):
        from .syntax import format_pred
        return format_pred(self)


@dataclass(frozen=True)
class Atom(Pred):
    expr: Expr
    rel: str


@dataclass(frozen=True)
class And(Pred):
    args: tuple


@dataclass(frozen=True)
class Or(Pred):
    args: tuple


@dataclass(frozen=True)
class Not(Pred):
    arg: Pred


@dataclass(frozen=True)
class BoolConst(Pred):
    value: bool


TRUE = BoolConst(True)
FALSE = BoolConst(False)


def _rel_holds(s: int, rel: str) -> bool:
    return {"<": s < 0, "<=": s <= 0, "=": s == 0,
            "!=": s != 0, ">=": s >= 0, ">": s > 0}[rel]


def negate_relation(rel: str) -> str:
    return {"<": ">=", "<=": ">", "=": "!=", "!=": "=", ">=": "<", ">": "<="}[rel]


def nnf(p: Pred, negate=False) -> Pred:
    """Push negations down to the atoms."""
    if isinstance(p, Atom):
        return Atom(p.expr, negate_relation(p.rel)) if negate else p
    if isinstance(p, BoolConst):
        return BoolConst(p.value != negate)
    if isinstance(p, Not):
        return nnf(p.arg, not negate)
    args = tuple(nnf(a, negate) for a in p.args)
    flip = isinstance(p, And) == negate
    return Or(args) if flip else And(args)


def atoms(p: Pred):
    if isinstance(p, Atom):
        yield p
    elif isinstance(p, Not):
        yield from atoms(p.arg)
    elif isinstance(p, (And, Or)):
        for a in p.args:
            yield from atoms(a)


# structural helpers ---------------------------------------------------------

def children(e):
    if isinstance(e, (Neg, Sqrt, Sign)):
        return (e.arg,)
    if isinstance(e, (Add, Sub, Mul, Div)):
        return (e.left, e.right)
    if isinstance(e, Pow):
        return (e.base,)
    if isinstance(e, Piecewise):
        out = []
        for pred, br in e.branches:
            out.extend(a.expr for a in atoms(pred))
            out.append(br)
        out.append(e.default)
        return tuple(out)
    return ()


def arity(e) -> int:
    """Largest variable index occurring in an expression or predicate."""
    if isinstance(e, Pred):
        return max((arity(a.expr) for a in atoms(e)), default=0)
    if isinstance(e, Var):
        return e.axis
    return max((arity(c) for c in children(e)), default=0)


def sqrt_depth(e) -> int:
    inner = max((sqrt_depth(c) for c in children(e)), default=0)
    return inner + 1 if isinstance(e, Sqrt) else inner


def is_guard_free(e) -> bool:
    if isinstance(e, (Piecewise, Sign)):
        return False
    return all(is_guard_free(c) for c in children(e))


# evaluation ---------------------------------------------------------------

def _coord(point, axis, term):
    if axis > len(point):
        raise ArityMismatch(f"{term} needs {axis} coordinates, got {len(point)}")
    return as_value(point[axis - 1])


class _Evaluator:
    """Exact evaluator.

    In limit mode, values are computed at ``point`` while every discrete
    decision (piecewise guards, sign) is taken at ``guard``, a nearby point
    approaching ``point``; this yields one-sided limits of piecewise
    continuous expressions.  Decisions are appended to ``trace``.
    """

    def __init__(self, point, guard=None, trace=None):
        self.point = point
        self.guard = guard
        self.limit = guard is not None
        self.trace = trace

    def decide_sign(self, e):
        if self.limit:
            s = sign_at(e, self.guard)
        else:
            v = self.ev(e)
            if v is INDETERMINATE:
                return None
            s = sign(v)
        if self.trace is not None:
            self.trace.append(("sign", s))
        return s

    def ev(self, e):
        t = type(e)
        if t is Const:
            return ExtVal(e.value)
        if t is Var:
            return _coord(self.point, e.axis, e)
        if t is PosInf:
            return POS_INF
        if t is NegInf:
            return NEG_INF
        if t is Neg:
            v = self.ev(e.arg)
            return v if v is INDETERMINATE else -v
        if t in (Add, Sub, Mul, Div):
            return self.binary(e)
        if t is Pow:
            return self.power(e)
        if t is Sqrt:
            v = self.ev(e.arg)
            if self.limit and isinstance(v, ExtVal) and sign(v) < 0:
                return INDETERMINATE
            try:
                return sqrt_value(v, e, self.point)
            except FieldMismatch:
                return INDETERMINATE
        if t is Sign:
            s = self.decide_sign(e.arg)
            return INDETERMINATE if s is None else ExtVal(s)
        if t is Piecewise:
            where = self.guard if self.limit else self.point
            for i, (pred, branch) in enumerate(e.branches):
                if holds(pred, where):
                    if self.trace is not None:
                        self.trace.append(("branch", i))
                    return self.ev(branch)
            if self.trace is not None:
                self.trace.append(("branch", len(e.branches)))
            return self.ev(e.default)
        raise TypeError(f"unknown expression node {e!r}")

    def power(self, e):
        v = self.ev(e.base)
        if v is INDETERMINATE:
            return v
        if isinstance(v, Infinite):
            if e.exp == 0:
                return ExtVal(1)
            return Infinite(v.sign ** e.exp) if e.exp > 0 else ExtVal(0)
        try:
            return v ** e.exp
        except ZeroDivisionError:
            return INDETERMINATE

    def binary(self, e):
        x, y = self.ev(e.left), self.ev(e.right)
        if x is INDETERMINATE or y is INDETERMINATE:
            return INDETERMINATE
        t = type(e)
        if isinstance(x, Infinite) or isinstance(y, Infinite):
            return _infinite_arith(t, x, y)
        try:
            if t is Add:
                return x + y
            if t is Sub:
                return x - y
            if t is Mul:
                return x * y
            if y == 0:
                if self.limit and sign(x) != 0:
                    s = self.decide_sign(e.right)
                    if not s:
                        return INDETERMINATE
                    return Infinite(sign(x) * s)
                return INDETERMINATE
            return x / y
        except FieldMismatch:
            return INDETERMINATE


def _infinite_arith(t, x, y):
    sx = x.sign if isinstance(x, Infinite) else None
    sy = y.sign if isinstance(y, Infinite) else None
    if t is Add or t is Sub:
        if t is Sub and sy is not None:
            sy = -sy
        if sx is not None and sy is not None:
            return Infinite(sx) if sx == sy else INDETERMINATE
        return Infinite(sx if sx is not None else sy)
    if t is Mul:
        fx = sx if sx is not None else sign(x)
        fy = sy if sy is not None else sign(y)
        return INDETERMINATE if fx == 0 or fy == 0 else Infinite(fx * fy)
    # division
    if sy is not None:
        return INDETERMINATE if sx is not None else ExtVal(0)
    s = sign(y)
    return INDETERMINATE if s == 0 else Infinite(sx * s)


def evaluate(expr: Expr, point=()):
    """Exact value of ``expr`` at ``point`` (a sequence of rationals or ExtVals)."""
    need = arity(expr)
    if need > len(point):
        raise ArityMismatch(f"expression of arity {need} evaluated at {len(point)} coordinates")
    return _Evaluator(point).ev(expr)


eval = evaluate  # name used by the operation contract


def evaluate_limit(expr: Expr, point, guard, trace=None):
    """One-sided limit value: arithmetic at ``point``, decisions at ``guard``."""
    return _Evaluator(point, guard, trace).ev(expr)


def sign_at(expr: Expr, point) -> int:
    v = evaluate(expr, point)
    if v is INDETERMINATE:
        raise IndeterminateSign(f"sign of {expr} at {point}")
    return sign(v)


def holds(pred: Pred, point) -> bool:
    """Exact truth value of a predicate at a point."""
    if isinstance(pred, Atom):
        try:
            v = evaluate(pred.expr, point)
        except DomainError:
            return False
        if v is INDETERMINATE:
            raise UndecidableAtom(pred, tuple(str(c) for c in point))
        return _rel_holds(sign(v), pred.rel)
    if isinstance(pred, And):
        return all(holds(a, point) for a in pred.args)
    if isinstance(pred, Or):
        return any(holds(a, point) for a in pred.args)
    if isinstance(pred, Not):
        return not holds(pred.arg, point)
    if isinstance(pred, BoolConst):
        return pred.value
    raise TypeError(f"unknown predicate node {pred!r}")


# normalization ----------------------------------------------------------------

def normalize(e: Expr) -> Expr:
    """Light canonical form: constant folding and collapse of uniform piecewise terms."""
    if isinstance(e, (Const, Var, PosInf, NegInf)):
        return e
    if isinstance(e, Piecewise):
        branches = tuple((p, normalize(b)) for p, b in e.branches)
        default = normalize(e.default)
        if all(b == default for _, b in branches):
            return default
        return Piecewise(branches, default)
    if isinstance(e, Pow):
        node = Pow(normalize(e.base), e.exp)
    elif isinstance(e, (Neg, Sqrt, Sign)):
        node = type(e)(normalize(e.arg))
    else:
        node = type(e)(normalize(e.left), normalize(e.right))
    if all(isinstance(c, Const) for c in children(node)):
        try:
            v = evaluate(node)
        except DomainError:
            return node
        if isinstance(v, ExtVal) and v.is_rational:
            return Const(v.a)
    return node
