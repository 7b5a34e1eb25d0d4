from fractions import Fraction as F

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from cadred.algebra import ExtVal, POS_INF, compare
from cadred.errors import ZeroPolynomial
from cadred.sturm import (
    count_roots, exact_roots, isolate_roots, pdivmod, pgcd, pmul, rational_roots, squarefree, trim,
)

X = sympy.Symbol("x")
coeffs = st.lists(st.integers(-6, 6), min_size=1, max_size=6)


def to_sympy(p):
    return sum(sympy.Rational(c.numerator, c.denominator) * X ** i for i, c in enumerate(map(F, p)))


def test_polynomial_arithmetic():
    p = [F(-1), F(0), F(1)]                 # x^2 - 1
    q, r = pdivmod(p, [F(-1), F(1)])
    assert list(q) == [1, 1] and not trim(r)
    assert list(pgcd(pmul(p, [F(2), F(1)]), [F(2), F(1)])) == [2, 1]
    assert list(squarefree(pmul(p, p))) == p


def test_rational_and_exact_roots():
    assert sorted(rational_roots([F(6), F(-5), F(1)])) == [2, 3]
    _, roots = exact_roots([F(-2), F(0), F(1)])
    assert sorted(roots, key=float) == [ExtVal(0, -1, 2), ExtVal(0, 1, 2)]


def test_isolation_respects_bracket():
    p = [F(-2), F(0), F(1)]
    roots = isolate_roots(p, (F(0), POS_INF))
    assert len(roots) == 1 and roots[0].exact == ExtVal(0, 1, 2)
    assert [r.exact for r in isolate_roots([F(0), F(1)], (F(0), F(1)))] == [ExtVal(0)]
    with pytest.raises(ZeroPolynomial):
        isolate_roots([F(0)])


@settings(max_examples=150, deadline=None)
@given(coeffs)
def test_root_count_matches_sympy(cs):
    p = trim([F(c) for c in cs])
    if len(p) < 2:
        return
    want = sympy.Poly(to_sympy(p), X).real_roots()
    distinct = sorted(set(want), key=lambda r: float(r))
    roots = isolate_roots(p)
    assert len(roots) == len(distinct)
    for root, w in zip(roots, distinct):
        if root.lo == root.hi:
            assert sympy.Rational(root.lo.numerator, root.lo.denominator) == w
        else:
            assert root.lo < w <= root.hi
        if root.exact is not None:
            e = root.exact
            val = sympy.Rational(e.a.numerator, e.a.denominator) + \
                sympy.Rational(e.b.numerator, e.b.denominator) * sympy.sqrt(e.c)
            assert sympy.simplify(val - w) == 0


@settings(max_examples=80, deadline=None)
@given(coeffs, st.integers(-5, 5), st.integers(1, 6))
def test_count_roots_on_interval(cs, a, width):
    p = squarefree(trim([F(c) for c in cs]))
    if len(p) < 2:
        return
    lo, hi = F(a), F(a + width)
    want = [r for r in set(sympy.Poly(to_sympy(p), X).real_roots()) if lo < r <= hi]
    assert count_roots(p, lo, hi) == len(want)
