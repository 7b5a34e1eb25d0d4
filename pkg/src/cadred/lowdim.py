"""Dimension one: exact subsets of the line, minimum CADs, fibers and behaviours.

A subset of R is stored in elementary form: the sorted boundary candidates
``points`` and one membership bit per elementary cell, in the order
sector, point, sector, ..., sector.  Normal form drops every point whose
bit agrees with both neighbouring sectors; what is left is exactly the
topological boundary.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .algebra import (
    Add, Atom, Const, Div, ExtVal, Infinite, Mul, NEG_INF, Neg, POS_INF, Pow,
    Sqrt, Sub, Var, And, Or, Not, BoolConst, arity, as_value, atoms, compare,
    format_value, holds, rational_between, value_expr,
)
from .cad import ConcreteCad, Family, cell_samples, make_cad, DEFAULT_PLAN
from .errors import (
    ArityMismatch, CadError, IncomparableEndpoints, IndeterminateSign,
    NonPolynomialFiber, ParseError, ZeroPolynomial,
)
from .sturm import isolate_roots, padd, pmul, pscale, psub, trim
from .syntax import parse_value
from .tree import CadTree, from_leaves


def _cmp(a, b):
    try:
        return compare(a, b)
    except IndeterminateSign as exc:
        raise IncomparableEndpoints(f"cannot order {format_value(a)} and {format_value(b)}") from exc


def _sorted_unique(vals):
    out = []
    for v in vals:
        v = as_value(v)
        lo, hi = 0, len(out)
        while lo < hi:
            mid = (lo + hi) // 2
            c = _cmp(out[mid], v)
            if c == 0:
                lo = -1
                break
            if c < 0:
                lo = mid + 1
            else:
                hi = mid
        if lo >= 0:
            out.insert(lo, v)
    return out


def _sector_sample(points, i):
    """A rational inside the i-th sector (0-based) cut by ``points``."""
    lo = points[i - 1] if i > 0 else NEG_INF
    hi = points[i] if i < len(points) else POS_INF
    return rational_between(lo, hi)


@dataclass(frozen=True)
class Piece:
    """An interval with exact or infinite endpoints; a point when lo == hi."""
    lo: object
    hi: object
    lo_closed: bool = True
    hi_closed: bool = True

    @classmethod
    def point(cls, v):
        v = as_value(v)
        return cls(v, v, True, True)

    def contains(self, v) -> bool:
        if not isinstance(self.lo, Infinite):
            c = _cmp(self.lo, v)
            if c > 0 or (c == 0 and not self.lo_closed):
                return False
        if not isinstance(self.hi, Infinite):
            c = _cmp(v, self.hi)
            if c > 0 or (c == 0 and not self.hi_closed):
                return False
        return True

    def covers_sector(self, a, b) -> bool:
        """Whether the open interval (a, b) lies in the piece."""
        left = isinstance(self.lo, Infinite) or (not isinstance(a, Infinite) and _cmp(self.lo, a) <= 0)
        right = isinstance(self.hi, Infinite) or (not isinstance(b, Infinite) and _cmp(b, self.hi) <= 0)
        return left and right

    def __str__(self):
        if not isinstance(self.lo, Infinite) and self.lo == self.hi:
            return "{" + format_value(self.lo) + "}"
        lb = "[" if self.lo_closed and not isinstance(self.lo, Infinite) else "("
        rb = "]" if self.hi_closed and not isinstance(self.hi, Infinite) else ")"
        return f"{lb}{format_value(self.lo)},{format_value(self.hi)}{rb}"


@dataclass(frozen=True)
class SaSet1D:
    points: tuple
    labels: tuple

    def __post_init__(self):
        if len(self.labels) != 2 * len(self.points) + 1:
            raise ValueError("need one label per elementary cell")

    @classmethod
    def empty(cls):
        return cls((), (0,))

    @classmethod
    def line(cls):
        return cls((), (1,))

    def normalized(self) -> "SaSet1D":
        pts, labs = [], [self.labels[0]]
        for i, p in enumerate(self.points):
            here, right = self.labels[2 * i + 1], self.labels[2 * i + 2]
            if labs[-1] == here == right:
                continue
            pts.append(p)
            labs += [here, right]
        return SaSet1D(tuple(pts), tuple(labs))

    def boundary(self):
        return list(self.normalized().points)

    def complement(self) -> "SaSet1D":
        return SaSet1D(self.points, tuple(1 - b for b in self.labels))

    def contains(self, v) -> bool:
        v = as_value(v)
        for i, p in enumerate(self.points):
            c = _cmp(v, p)
            if c < 0:
                return bool(self.labels[2 * i])
            if c == 0:
                return bool(self.labels[2 * i + 1])
        return bool(self.labels[-1])

    def sector_label(self, a, b) -> int:
        """Bit of the open interval (a, b), which must avoid the boundary."""
        return int(self.contains(rational_between(a, b)))

    def pieces(self):
        """Maximal disjoint pieces in increasing order."""
        s = self.normalized()
        cells = []  # (elementary cell number, piece) for each cell with bit 1
        pts = s.points
        for j, bit in enumerate(s.labels):
            if not bit:
                continue
            if j % 2:
                p = pts[j // 2]
                cells.append((j, Piece(p, p, True, True)))
            else:
                i = j // 2
                lo = pts[i - 1] if i > 0 else NEG_INF
                hi = pts[i] if i < len(pts) else POS_INF
                cells.append((j, Piece(lo, hi, False, False)))
        merged, last_j = [], None
        for j, c in cells:
            # only neighbouring elementary cells join; a gap cell keeps pieces apart
            if merged and j == last_j + 1:
                last = merged[-1]
                merged[-1] = Piece(last.lo, c.hi, last.lo_closed, c.hi_closed)
            else:
                merged.append(c)
            last_j = j
        return merged

    def __eq__(self, other):
        if not isinstance(other, SaSet1D):
            return NotImplemented
        a, b = self.normalized(), other.normalized()
        return a.points == b.points and a.labels == b.labels

    def __hash__(self):
        s = self.normalized()
        return hash((s.points, s.labels))

    def __str__(self):
        return format_set(self)


def normalize_1d(pieces) -> SaSet1D:
    """Canonical form of a finite union of pieces."""
    pieces = list(pieces)
    ends = []
    for p in pieces:
        ends += [e for e in (p.lo, p.hi) if not isinstance(e, Infinite)]
    pts = _sorted_unique(ends)
    labels = []
    for i in range(len(pts) + 1):
        lo = pts[i - 1] if i > 0 else NEG_INF
        hi = pts[i] if i < len(pts) else POS_INF
        labels.append(int(any(p.covers_sector(lo, hi) for p in pieces)))
        if i < len(pts):
            labels.append(int(any(p.contains(pts[i]) for p in pieces)))
    return SaSet1D(tuple(pts), tuple(labels)).normalized()


def _endpoint(text):
    t = text.strip().replace(" ", "")
    if t in ("inf", "+inf", "oo", "+oo"):
        return POS_INF
    if t in ("-inf", "-oo"):
        return NEG_INF
    return as_value(parse_value(t))


def _split_top(text):
    """Split on commas outside parentheses."""
    parts, depth, cur = [], 0, ""
    for ch in text:
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
            continue
        depth += (ch == "(") - (ch == ")")
        cur += ch
    return parts + [cur]


def parse_set(text: str) -> SaSet1D:
    """Read text such as ``[-2,0) u {1}``, ``R`` or ``empty``."""
    t = text.strip()
    if t in ("", "empty", "{}", "0"):
        return SaSet1D.empty()
    if t in ("R", "(-inf,inf)"):
        return SaSet1D.line()
    pieces = []
    for part in re.split(r"\s+u\s+|\s+U\s+", t):
        part = part.strip()
        if part.startswith("{") and part.endswith("}"):
            pieces += [Piece.point(_endpoint(v)) for v in _split_top(part[1:-1]) if v.strip()]
            continue
        ends = _split_top(part[1:-1]) if part[:1] in "[(" and part[-1:] in "])" else []
        if len(ends) != 2:
            raise ParseError(f"cannot read piece {part!r}")
        lo, hi = _endpoint(ends[0]), _endpoint(ends[1])
        if not isinstance(lo, Infinite) and not isinstance(hi, Infinite) and _cmp(lo, hi) > 0:
            raise ParseError(f"empty interval {part!r}")
        pieces.append(Piece(lo, hi, part[0] == "[", part[-1] == "]"))
    return normalize_1d(pieces)


def format_set(s: SaSet1D) -> str:
    pieces = s.pieces()
    if not pieces:
        return "empty"
    if len(pieces) == 1 and isinstance(pieces[0].lo, Infinite) and isinstance(pieces[0].hi, Infinite):
        return "R"
    return " u ".join(str(p) for p in pieces)


def boundary(s: SaSet1D):
    return s.boundary()


def complement(s: SaSet1D) -> SaSet1D:
    return s.complement()


def minimum_cad_1d(fam1d, names=None):
    """The minimum CAD of R adapted to a list of subsets, with its labelled tree.

    Sections are the union of the boundaries.  In dimension one the minimum
    does not depend on the regularity class.
    """
    fam1d = list(fam1d)
    pts = _sorted_unique([b for s in fam1d for b in s.boundary()])
    labels = {}
    for j in range(1, 2 * len(pts) + 2):
        if j % 2 == 0:
            x = pts[j // 2 - 1]
        else:
            x = _sector_sample(pts, (j - 1) // 2)
        labels[(j,)] = tuple(int(s.contains(x)) for s in fam1d)
    cad = make_cad(1, pts, {}, name="min1d")
    tree = from_leaves(1, len(fam1d), labels, {(): 2 * len(pts) + 1})
    return cad, tree


def flat_labels(tree: CadTree):
    return [label for _, label in tree.leaves()]


# fibers ----------------------------------------------------------------------

@dataclass(frozen=True)
class _Form:
    """(P + S*sqrt(Q)) / D with P, S, Q, D polynomials in the fiber variable."""
    P: tuple
    S: tuple = ()
    Q: tuple = ()
    D: tuple = (Fraction(1),)

    @property
    def radical(self):
        return bool(trim(self.S))


def _const(c):
    return _Form(trim((Fraction(c),)))


def _same_radicand(f, g):
    if not f.radical:
        return g.Q
    if not g.radical or trim(f.Q) == trim(g.Q):
        return f.Q
    raise NonPolynomialFiber("two different radicals in one fiber expression")


def _f_add(f, g, sign=1):
    Q = _same_radicand(f, g)
    P = padd(pmul(f.P, g.D), pscale(pmul(g.P, f.D), sign))
    S = padd(pmul(f.S, g.D), pscale(pmul(g.S, f.D), sign))
    return _Form(trim(P), trim(S), trim(Q) if trim(S) else (), trim(pmul(f.D, g.D)))


def _f_mul(f, g):
    Q = _same_radicand(f, g)
    P = padd(pmul(f.P, g.P), pmul(pmul(f.S, g.S), Q))
    S = padd(pmul(f.P, g.S), pmul(f.S, g.P))
    return _Form(trim(P), trim(S), trim(Q) if trim(S) else (), trim(pmul(f.D, g.D)))


def _f_div(f, g):
    if not g.radical:
        num = _Form(pmul(f.P, g.D), pmul(f.S, g.D), f.Q, (Fraction(1),))
        return _Form(trim(num.P), trim(num.S), f.Q if trim(num.S) else (), trim(pmul(f.D, g.P)))
    conj = _Form(g.P, pscale(g.S, -1), g.Q)
    num = _f_mul(_Form(f.P, f.S, f.Q), conj)
    den = psub(pmul(g.P, g.P), pmul(pmul(g.S, g.S), g.Q))
    return _Form(trim(pmul(num.P, g.D)), trim(pmul(num.S, g.D)), num.Q,
                 trim(pmul(f.D, den)))


def _as_form(e, x, crit):
    """Radical form of ``e`` with x1..x_{n-1} fixed; critical polynomials go to ``crit``."""
    t = type(e)
    if t is Const:
        return _const(e.value)
    if t is Var:
        if e.axis <= len(x):
            return _const(x[e.axis - 1])
        if e.axis == len(x) + 1:
            return _Form((Fraction(0), Fraction(1)))
        raise ArityMismatch(f"x{e.axis} in a fiber over R^{len(x)}")
    if t is Neg:
        f = _as_form(e.arg, x, crit)
        return _Form(pscale(f.P, -1), pscale(f.S, -1), f.Q, f.D)
    if t in (Add, Sub, Mul, Div):
        f, g = _as_form(e.left, x, crit), _as_form(e.right, x, crit)
        if t is Add:
            out = _f_add(f, g)
        elif t is Sub:
            out = _f_add(f, g, -1)
        elif t is Mul:
            out = _f_mul(f, g)
        else:
            crit.append(g.P)
            crit.append(g.D)
            if g.radical:
                crit.append(psub(pmul(g.P, g.P), pmul(pmul(g.S, g.S), g.Q)))
            out = _f_div(f, g)
        crit.append(out.D)
        return out
    if t is Pow:
        if e.exp < 0:
            return _f_div(_const(1), _as_form(Pow(e.base, -e.exp), x, crit))
        out = _const(1)
        base = _as_form(e.base, x, crit)
        for _ in range(e.exp):
            out = _f_mul(out, base)
        return out
    if t is Sqrt:
        f = _as_form(e.arg, x, crit)
        if f.radical:
            raise NonPolynomialFiber("nested radical in a fiber expression")
        if len(trim(f.D)) != 1:
            raise NonPolynomialFiber("square root of a quotient in the fiber variable")
        Q = pscale(f.P, 1 / f.D[0])
        crit.append(Q)
        if len(Q) <= 1:
            # constant radicand: fold to an exact value when it is a square
            c = Q[0] if Q else Fraction(0)
            if c < 0:
                raise NonPolynomialFiber("square root of a negative constant")
            v = ExtVal(0, 1, c)
            if v.is_rational:
                return _const(v.a)
        return _Form((), (Fraction(1),), Q)
    raise NonPolynomialFiber(f"{t.__name__} of the fiber variable has no polynomial form")


def _free_of(e, axis):
    return arity(e) < axis


def fiber(pred, x) -> SaSet1D:
    """Exact fiber {y : (x, y) in S} above a rational point x."""
    x = tuple(Fraction(c) if not isinstance(c, ExtVal) else as_value(c).rational() for c in x)
    axis = len(x) + 1
    if arity(pred) > axis:
        raise ArityMismatch(f"predicate of arity {arity(pred)} has no fiber over R^{len(x)}")
    polys = []
    for atom in atoms(pred):
        crit = []
        f = _as_form(atom.expr, x, crit)
        polys += crit + [f.P, f.S, f.Q, f.D]
        if f.radical:
            polys.append(psub(pmul(f.P, f.P), pmul(pmul(f.S, f.S), f.Q)))
    roots = []
    for p in polys:
        p = trim(p)
        if len(p) <= 1:
            continue
        for r in isolate_roots(p):
            if r.exact is None:
                raise NonPolynomialFiber(f"fiber boundary is a root of degree > 2 near {float(r.hi):.6g}")
            roots.append(r.exact)
    pts = _sorted_unique(roots)
    labels = []
    for j in range(2 * len(pts) + 1):
        y = pts[j // 2] if j % 2 else _sector_sample(pts, j // 2)
        labels.append(int(holds(pred, x + (y,))))
    return SaSet1D(tuple(pts), tuple(labels)).normalized()


def behaviour(fam: Family, x):
    """Flat labels of the minimum CAD of the fibers of every set above x."""
    fibers = [fiber(p, x) for p in fam.preds]
    _, tree = minimum_cad_1d(fibers)
    return tuple(flat_labels(tree))


def format_behaviour(b) -> str:
    return "(" + ", ".join("".join(str(bit) for bit in lab) for lab in b) + ")"


@dataclass
class BehaviourPartition:
    classes: dict          # behaviour -> sorted list of base cell indices
    violations: list       # (cell, [(sample, behaviour), ...])
    note: str = "behaviours are computed at rational plan samples only"

    @property
    def constant(self):
        return not self.violations


def behaviour_partition(fam: Family, base: ConcreteCad, plan=DEFAULT_PLAN) -> BehaviourPartition:
    """Behaviour of each cell of a CAD of R^(n-1), with a constancy report."""
    if base.n != fam.n - 1:
        raise CadError(f"base CAD lives in R^{base.n}, family in R^{fam.n}")
    classes, violations = {}, []
    for idx in base.leaves():
        pts = [p for p in cell_samples(base, idx, plan)
               if all(isinstance(c, Fraction) for c in p)][:plan.audit]
        if not pts:
            raise CadError(f"no rational sample in base cell {idx}")
        seen = [(p, behaviour(fam, p)) for p in pts]
        if len({b for _, b in seen}) > 1:
            violations.append((idx, seen))
        classes.setdefault(seen[0][1], []).append(idx)
    return BehaviourPartition(classes, violations)


def to_pred(s: SaSet1D, axis: int = 1):
    """A predicate in x_axis defining the set."""
    v = Var(axis)
    parts = []
    for p in s.pieces():
        if not isinstance(p.lo, Infinite) and p.lo == p.hi:
            parts.append(Atom(Sub(v, value_expr(p.lo)), "="))
            continue
        conj = []
        if not isinstance(p.lo, Infinite):
            conj.append(Atom(Sub(v, value_expr(p.lo)), ">=" if p.lo_closed else ">"))
        if not isinstance(p.hi, Infinite):
            conj.append(Atom(Sub(v, value_expr(p.hi)), "<=" if p.hi_closed else "<"))
        parts.append(And(tuple(conj)) if conj else BoolConst(True))
    if not parts:
        return BoolConst(False)
    return parts[0] if len(parts) == 1 else Or(tuple(parts))
