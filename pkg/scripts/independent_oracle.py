"""Recompute frozen test values with sympy and brute force, independently of cadred's
own algebra.  Prints one line per check and exits non-zero on any disagreement.

    python3 scripts/independent_oracle.py [--samples N]
"""
import argparse
import random
import sys
from fractions import Fraction

import sympy
from sympy.utilities.iterables import multiset_partitions

from cadred import corpus
from cadred.algebra import ExtVal, compare
from cadred.cad import locate
from cadred.lowdim import fiber, format_set
from cadred.oracle import bell, poset_below
from cadred.syntax import parse_pred

x, y, z = sympy.symbols("x y z", real=True)
failures = []


def check(label, ok, detail=""):
    print(f"{'ok  ' if ok else 'FAIL'} {label}{': ' + detail if detail else ''}")
    if not ok:
        failures.append(label)


def sym(q):
    q = Fraction(q)
    return sympy.Rational(q.numerator, q.denominator)


def bell_numbers():
    for k in range(1, 16):
        if bell(k) != sympy.bell(k):
            check(f"bell({k})", False)
            return
    brute = sum(1 for _ in multiset_partitions(list(range(9))))
    check("bell 1..15 against sympy; bell(9) by listing partitions", brute == bell(9), str(brute - 1))


def radicals(samples, rng):
    bad = 0
    for _ in range(samples):
        a1, b1, a2, b2 = (Fraction(rng.randint(-30, 30), rng.randint(1, 6)) for _ in range(4))
        c1, c2 = rng.randint(2, 30), rng.randint(2, 30)
        u, v = ExtVal(a1, b1, c1), ExtVal(a2, b2, c2)
        diff = (sym(a1) + sym(b1) * sympy.sqrt(c1)) - (sym(a2) + sym(b2) * sympy.sqrt(c2))
        want = 0 if sympy.simplify(diff) == 0 else (1 if diff.evalf(60) > 0 else -1)
        try:
            bad += compare(u, v) != want
        except Exception:
            bad += 1
    check(f"{samples} radical comparisons against sympy", bad == 0, f"{bad} mismatches")


def sympy_fiber(expr_text, at):
    """Fiber {t : pred(at, t)} from sympy's real solver."""
    pred = sympy.sympify(expr_text.replace("^", "**"), locals={"x1": x, "x2": y, "x3": z})
    subs = dict(zip((x, y, z), map(sym, at)))
    var = (x, y, z)[len(at)]
    return sympy.solveset(pred.subs(subs), var, sympy.S.Reals)


def fibers():
    cases = [
        ("x1^2 + x2^2 <= 1", (Fraction(3, 5),)),
        ("x1^2 + x2^2 <= 1", (Fraction(1, 3),)),
        ("x1^2 + x2^2 <= 1", (Fraction(2),)),
        ("x2^3 - x2 > 0", (Fraction(2),)),
        ("x2^2 < 1/x1", (Fraction(2),)),
        ("x1^2 + x2^2 + x3^2 <= 1", (Fraction(1, 2), Fraction(0))),
        ("x1 + x2*x3 <= 0", (Fraction(1), Fraction(2))),
    ]
    for text, at in cases:
        ours = fiber(parse_pred(text), at)
        theirs = sympy_fiber(text, at)
        probes = [sym(Fraction(k, 7)) for k in range(-21, 22)] + list(theirs.boundary)
        agree = all(ours.contains(Fraction(str(p)) if p.is_Rational else _ext(p)) == (p in theirs)
                    for p in probes)
        check(f"fiber of {text} at {tuple(map(str, at))}", agree, f"{format_set(ours)} vs {theirs}")


def _ext(p):
    """A sympy number a + b*sqrt(c) as an ExtVal."""
    a, rest = p.as_coeff_Add()
    b, root = rest.as_coeff_Mul()
    c = root.args[0] if root.is_Pow else 1
    return ExtVal(Fraction(str(a)), Fraction(str(b)), int(c))


def analytic_identity():
    g = -sympy.sign(y) * sympy.sqrt((x + sympy.sqrt(x ** 2 + y ** 2)) / 2)
    bad = 0
    pts = corpus.pythagorean_points(60)
    for px, py in pts:
        gz = g.subs({x: sym(px), y: sym(py)})
        bad += sympy.simplify(4 * gz ** 4 - 4 * gz ** 2 * sym(px) - sym(py) ** 2) != 0
    check(f"4z^4 - 4z^2x - y^2 = 0 at {len(pts)} points with sympy", bad == 0)


def trousers_limit():
    # fibers of the trousers above (1, y): a single point, -1/2 for y > 0 and 0 at y = 0
    T = sympy.Or(sympy.And(sympy.Or(x <= 0, y <= 0), sympy.Eq(z, 0)),
                 sympy.And(x > 0, y > 0, sympy.Eq(z, -x / 2)))
    above = [sympy.solveset(T.subs({x: 1, y: sympy.Rational(1, 2 ** m)}), z, sympy.S.Reals)
             for m in (4, 8, 16)]
    at = sympy.solveset(T.subs({x: 1, y: 0}), z, sympy.S.Reals)
    ok = all(f == sympy.FiniteSet(sympy.Rational(-1, 2)) for f in above) and at == sympy.FiniteSet(0)
    check("trousers fibers at (1, 0+) and (1, 0)", ok, f"{above[-1]} vs {at}")


def frozen_counts():
    e = corpus.load("disk")
    poset = poset_below(e.cad("Csecond"), e.family)
    check("disk Csecond coarsening poset: 10 elements, 15 covers",
          (len(poset.elements), len(poset.covers())) == (10, 15),
          f"{len(poset.elements)}, {len(poset.covers())}")
    check_adapted("box-fin", box_fin, 3000)
    check_adapted("trousers", trousers, 2000)


def box_fin(px, py, pz):
    box = -1 <= px <= 1 and -1 <= py <= 1 and 0 <= pz <= 1
    fin = py == 0 and 0 <= px <= 1 and 1 <= pz <= px + 1
    return box or fin


def trousers(px, py, pz):
    return ((px <= 0 or py <= 0) and pz == 0) or (px > 0 and py > 0 and pz == -px / 2)


def check_adapted(name, member, count):
    """Random points (biased onto the set's planes) must give each leaf one label."""
    rng = random.Random(1)
    e = corpus.load(name)
    grid = [Fraction(k, 4) for k in range(-8, 9)]
    for cad_name, cad in e.cads.items():
        seen, bad = {}, 0
        for _ in range(count):
            pt = [rng.choice(grid + [Fraction(rng.randint(-99, 99), 37)]) for _ in range(3)]
            if rng.random() < 0.3:
                pt[2] = -pt[0] / 2 if name == "trousers" else pt[0] + 1
            pt = tuple(pt)
            idx = locate(cad, pt)
            bit = member(*pt)
            bad += seen.setdefault(idx, bit) != bit
        check(f"{name} {cad_name} adapted at {count} random points", bad == 0,
              f"{len(seen)} of {cad.leaf_count} cells hit")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    bell_numbers()
    radicals(args.samples, rng)
    fibers()
    analytic_identity()
    trousers_limit()
    frozen_counts()
    print(f"{len(failures)} failure(s)")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
