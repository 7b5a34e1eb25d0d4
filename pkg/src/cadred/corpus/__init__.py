"""Worked examples shipped as CADSPEC fixtures, with their expected facts.

Entries are loaded only through the CADSPEC parser.  Complement families are
derived with ``Family.complement`` rather than stored.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from ..algebra import ExtVal, INDETERMINATE, evaluate
from ..cad import ConcreteCad, Family, check_cad_structure, cylinder_product
from ..cadspec import Document, parse_document
from ..errors import BadParameter, UnknownEntry
from ..syntax import format_value, parse_expr

# expected facts are keyed by CAD name; pivots are index tuples
EXPECTED = {
    "trousers": {
        "leaves": {"C": 9, "Cprime": 15, "Cbar": 27},
        "red": {"C": [(1, 2)], "Cprime": [(3, 2)]},
        "fails": {"C": ((1, 2), (1, 0), Fraction(-1, 2), 0),
                  "Cprime": ((3, 2), (1, 0), Fraction(-1, 2), 0)},
        "minimal": ["C", "Cprime"],
        "dag": {"Cbar": ["C", "Cprime"]},
    },
    "analytic-trousers": {
        "leaves": {"C": 9, "Cprime": 15, "Cbar": 27},
        "red": {"C": [(1, 2)], "Cprime": [(3, 2)]},
        "minimal": ["C", "Cprime"],
        "dag": {"Cbar": ["C", "Cprime"]},
    },
    "disk": {
        "leaves": {"C": 13, "Cprime": 23, "Csecond": 29},
        "red": {"C": [], "Cprime": [(4,)]},
        "minimal": ["C"],
        "dag": {"Cprime": ["C"], "Csecond": ["C"]},
    },
    "box-fin": {"leaves": {"C": 73, "Cprime": 107}, "minimal": ["C", "Cprime"]},
    "under-trousers": {"leaves": {"C": 9, "Cprime": 15}, "minimal": ["C", "Cprime"]},
    "quadric": {"leaves": {"C": 9, "Cprime": 21}, "minimal": ["C", "Cprime"]},
    "folded-plane": {"leaves": {"C": 9, "Cprime": 21}, "minimal": ["C", "Cprime"]},
    "closedball": {"leaves": {"M": 25}, "minimal": ["M"], "dag": {"Fine": ["M"]}},
    "doubleparabolas": {"leaves": {"M": 15, "Fine": 45}, "minimal": ["M"], "dag": {"Fine": ["M"]},
                        "components": {"P": ["P1", "P2"]}},
    "pointless-ball": {
        "minimal": ["M"],
        "behaviours": {((0,),), ((0,), (1,), (0,)), ((0,), (1,), (1,), (1,), (0,)),
                       ((0,), (1,), (1,), (0,), (0,))},
    },
    "halfspace0": {"leaves": {"C": 9}, "minimal": ["C"]},
    "line-family": {
        "leaves": {"C": 7, "Fine": 9},
        "minimal": ["C"],
        "dag": {"Fine": ["C"]},
        "labels": {"C": [(0, 0), (1, 0), (1, 0), (0, 1), (0, 1), (1, 1), (0, 1)]},
    },
}

NOTES = {
    "trousers": "semi-linear trousers; two minimal CADs of class 0 and their common refinement",
    "analytic-trousers": "analytic trousers; the same skeletons sliced by the function g",
    "disk": "closed unit disk; a minimum CAD, a refinement by x = 0 and a further slicing",
    "box-fin": "closed box with a fin; two distinct minimal CADs of class 0",
    "under-trousers": "closed unbounded set below the trousers; sections built from -x/y",
    "quadric": "quadric x^2 + 4yz = 0 with the x-axis; two minimal CADs of every class",
    "folded-plane": "plane with the x-axis replaced by z = -x; two minimal CADs of every class",
    "closedball": "closed unit ball; minimum CAD and a finer start",
    "doubleparabolas": "two parabolic cylinders; minimum CAD, components and a finer start",
    "pointless-ball": "unit ball without its north pole; minimum CAD and its base",
    "halfspace0": "closed half-plane minus the origin; the base must contain x = 0",
    "line-family": "two subsets of the line; minimum CAD and a refinement",
}


@dataclass
class CorpusEntry:
    name: str
    document: Document
    family: Family
    cads: dict
    expected: dict = field(default_factory=dict)
    notes: str = ""

    def cad(self, name):
        return self.document.cad(name)


def names():
    return sorted(list(NOTES) + ["trousers4"])


def fixture_text(name: str) -> str:
    try:
        return resources.files(__package__).joinpath("fixtures", f"{name}.cadspec").read_text()
    except FileNotFoundError:
        raise UnknownEntry(f"no corpus entry {name!r}; known: {', '.join(names())}") from None


def load(name: str, check=True) -> CorpusEntry:
    if name == "trousers4":
        return _trousers4()
    if name not in NOTES:
        raise UnknownEntry(f"no corpus entry {name!r}; known: {', '.join(names())}")
    doc = parse_document(fixture_text(name))
    fam = doc.family()
    if name == "doubleparabolas":
        fam = fam.select(["P"])
    if check:
        for cad in doc.cads.values():
            report = check_cad_structure(cad)
            if not report.ok:
                raise ValueError(f"corpus entry {name}, CAD {cad.name}: {report}")
    return CorpusEntry(name, doc, fam, dict(doc.cads), EXPECTED.get(name, {}), NOTES[name])


def _trousers4() -> CorpusEntry:
    base = load("trousers")
    cads = {k: cylinder_product(c) for k, c in base.cads.items()}
    doc = Document(cads, list(base.family.names), list(base.family.preds))
    expected = {"leaves": {"C": 9, "Cprime": 15, "Cbar": 27}, "minimal": ["C", "Cprime"],
                "dag": {"Cbar": ["C", "Cprime"]}}
    return CorpusEntry("trousers4", doc, base.family.with_dim(4), cads, expected,
                       "trousers times a line, built with cylinder_product")


def d_t_text(t) -> str:
    t = Fraction(t)
    return "\n".join([
        f"cad D dim=3 class=0",
        f"level1: {t}",
        "cell 1: u=0",
        "cell 2: u=0",
        "cell 3: u=1; xi2=0",
        "cell 1.1: u=1; xi2=0",
        "cell 2.1: u=1; xi2=0",
        "cell 3.1: u=1; xi2=0",
        "cell 3.2: u=1; xi2=0",
        "cell 3.3: u=1; xi2=piecewise{x1 > 0 -> -1/2*x1; else -> 0}",
    ]) + "\n"


def d_t_generator(t) -> ConcreteCad:
    """A minimal CAD adapted to the trousers whose only level-1 section is t <= 0."""
    t = Fraction(t)
    if t > 0:
        raise BadParameter(f"t must be <= 0, got {t}")
    return parse_document(d_t_text(t)).cad("D")


G_EXPR = parse_expr("-sign(x2)*sqrt((x1 + sqrt(x1^2 + x2^2))/2)")
QUARTIC = parse_expr("4*x3^4 - 4*x3^2*x1 - x2^2")


def pythagorean_points(count: int):
    """Points (x, y) with x^2 + y^2 and (x + |(x,y)|)/2 both rational squares.

    From a primitive triple (a, b, c) with a = m^2 - k^2, b = 2mk we use
    (x, y) = (a/s, +-b/s) scaled by s = c/(m^2 or k^2); then (x + r)/2 is a square.
    """
    out = []
    m = 2
    while len(out) < count:
        for k in range(1, m):
            a, b, c = m * m - k * k, 2 * m * k, m * m + k * k
            for x, y in ((Fraction(a, c), Fraction(b, c)), (Fraction(-a, c), Fraction(b, c)),
                         (Fraction(a, 4), Fraction(b, 4)), (Fraction(b, c), Fraction(a, c))):
                for sy in (1, -1):
                    pt = (x, sy * y)
                    if pt not in out:
                        out.append(pt)
        m += 1
    return out[:count]


@dataclass
class AnalyticReport:
    checked: list
    failures: list

    @property
    def ok(self):
        return not self.failures


def verify_analytic_trousers(count: int = 100) -> AnalyticReport:
    """Check 4z^4 - 4z^2x - y^2 = 0 exactly on the graph of g at points where g is exact."""
    checked, failures = [], []
    # some generated points leave g a nested radical; draw extra candidates
    for x, y in pythagorean_points(3 * count):
        if len(checked) >= count:
            break
        z = evaluate(G_EXPR, (x, y))
        if z is INDETERMINATE or not isinstance(z, ExtVal):
            continue
        if y != 0 and not (y * z.a < 0 or (z.a == 0 and y * z.b < 0)):
            failures.append(((x, y), format_value(z), "yz is not negative"))
            continue
        val = evaluate(QUARTIC, (x, y, z))
        checked.append(((x, y), z))
        if val != 0:
            failures.append(((x, y), format_value(z), format_value(val)))
    return AnalyticReport(checked, failures)
