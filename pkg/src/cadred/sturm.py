"""Univariate polynomials over Q and real root isolation by Sturm sequences.

Polynomials are tuples of Fractions, lowest degree first.  Roots of degree
at most two (after splitting off rational roots) are returned exactly.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .algebra import ExtVal, Infinite, NEG_INF, POS_INF, compare
from .errors import ZeroPolynomial


def trim(p):
    p = [Fraction(c) for c in p]
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def degree(p) -> int:
    return len(trim(p)) - 1


def peval(p, x):
    acc = 0
    for c in reversed(p):
        acc = acc * x + c
    return acc


def padd(p, q):
    n = max(len(p), len(q))
    return trim([(p[i] if i < len(p) else 0) + (q[i] if i < len(q) else 0) for i in range(n)])


def pscale(p, k):
    return trim([c * k for c in p])


def psub(p, q):
    return padd(p, pscale(q, -1))


def pmul(p, q):
    if not p or not q:
        return ()
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return trim(out)


def pderiv(p):
    return trim([i * p[i] for i in range(1, len(p))])


def pdivmod(p, q):
    p, q = list(trim(p)), trim(q)
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    quot = [Fraction(0)] * max(len(p) - len(q) + 1, 1)
    while len(p) >= len(q) and p:
        k = p[-1] / q[-1]
        shift = len(p) - len(q)
        quot[shift] = k
        for i, c in enumerate(q):
            p[shift + i] -= k * c
        p = list(trim(p))
    return trim(quot), tuple(p)


def pgcd(p, q):
    p, q = trim(p), trim(q)
    while q:
        p, q = q, pdivmod(p, q)[1]
    return pscale(p, 1 / p[-1]) if p else ()


def squarefree(p):
    p = trim(p)
    g = pgcd(p, pderiv(p))
    if len(g) <= 1:
        return p
    return pdivmod(p, g)[0]


def sturm_sequence(p):
    seq = [trim(p), pderiv(p)]
    while seq[-1]:
        r = pdivmod(seq[-2], seq[-1])[1]
        if not r:
            break
        seq.append(pscale(r, -1))
    return [s for s in seq if s]


def _sign_at(p, x) -> int:
    if isinstance(x, Infinite):
        if not p:
            return 0
        lead = 1 if p[-1] > 0 else -1
        return lead if x.sign > 0 or (len(p) - 1) % 2 == 0 else -lead
    v = peval(p, x)
    return (v > 0) - (v < 0)


def variations(seq, x) -> int:
    signs = [s for s in (_sign_at(p, x) for p in seq) if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots(p, lo, hi) -> int:
    """Number of distinct real roots in the half-open interval (lo, hi]."""
    seq = sturm_sequence(squarefree(p))
    return variations(seq, lo) - variations(seq, hi)


def cauchy_bound(p) -> Fraction:
    p = trim(p)
    return 1 + max(abs(c / p[-1]) for c in p[:-1]) if len(p) > 1 else Fraction(1)


@dataclass(frozen=True)
class Root:
    lo: Fraction
    hi: Fraction
    exact: object = None  # ExtVal when known exactly

    def __str__(self):
        return str(self.exact) if self.exact is not None else f"({self.lo}, {self.hi}]"


def _divisors(n: int, limit=10**12):
    n = abs(n)
    if n == 0 or n > limit:
        return []
    small = [d for d in range(1, math.isqrt(n) + 1) if n % d == 0]
    return sorted(set(small + [n // d for d in small]))


def rational_roots(p):
    """Rational roots by the rational root test on an integer multiple of p."""
    p = trim(p)
    if not p:
        raise ZeroPolynomial("zero polynomial")
    lcm = 1
    for c in p:
        lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
    ints = [int(c * lcm) for c in p]
    roots = set()
    while ints and ints[0] == 0:
        roots.add(Fraction(0))
        ints = ints[1:]
    if len(ints) <= 1:
        return sorted(roots)
    for num in _divisors(ints[0]):
        for den in _divisors(ints[-1]):
            for cand in (Fraction(num, den), Fraction(-num, den)):
                if peval(ints, cand) == 0:
                    roots.add(cand)
    return sorted(roots)


def exact_roots(p):
    """Exact real roots as ExtVals where the leftover factor has degree <= 2."""
    p = squarefree(p)
    out = [ExtVal(r) for r in rational_roots(p)]
    rest = p
    for r in out:
        rest = pdivmod(rest, (-r.a, Fraction(1)))[0]
    if len(rest) == 3:
        c0, c1, c2 = rest
        disc = c1 * c1 - 4 * c2 * c0
        if disc > 0:
            out += [ExtVal(-c1 / (2 * c2), s / (2 * c2), disc) for s in (-1, 1)]
    elif len(rest) == 2:
        out.append(ExtVal(-rest[0] / rest[1]))
    elif len(rest) > 3:
        return None, out
    return rest, out


def isolate_roots(poly, bracket=(NEG_INF, POS_INF)):
    """Isolating intervals (with exact values when available) of the roots in bracket.

    The bracket is closed at finite endpoints.  Each returned ``Root`` has
    rational ``lo < hi`` containing exactly one root in (lo, hi], or
    ``lo == hi`` for a rational root.
    """
    p = trim(poly)
    if not p:
        raise ZeroPolynomial("isolate_roots of the zero polynomial")
    if len(p) == 1:
        return []
    sf = squarefree(p)
    seq = sturm_sequence(sf)
    b = cauchy_bound(sf)
    lo_b, hi_b = bracket
    lo = -b if isinstance(lo_b, Infinite) else Fraction(lo_b)
    hi = b if isinstance(hi_b, Infinite) else Fraction(hi_b)
    if lo > hi:
        return []
    _, exact = exact_roots(sf)
    # closed bracket: start just left of lo when lo is itself a root
    start = lo
    if peval(sf, lo) == 0:
        start = lo - (hi - lo + 1) / 2
        while variations(seq, start) - variations(seq, lo) != 1:
            start = (start + lo) / 2
    intervals = []
    stack = [(start, hi)]
    while stack:
        a, c = stack.pop()
        n = variations(seq, a) - variations(seq, c)
        if n == 0:
            continue
        if n == 1:
            intervals.append((a, c))
            continue
        m = (a + c) / 2
        stack.append((m, c))
        stack.append((a, m))
    intervals.sort()
    roots = []
    for a, c in intervals:
        val = None
        for e in exact:
            if compare(e, a) > 0 and compare(e, c) <= 0:
                val = e
                break
        if val is not None and val.is_rational:
            roots.append(Root(val.a, val.a, val))
        else:
            roots.append(Root(a, c, val))
    return roots
