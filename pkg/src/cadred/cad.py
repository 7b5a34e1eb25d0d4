"""Concrete CADs, families of semi-algebraic sets, sampling and adaptedness.

All geometric checks here are sample-based: a clean report certifies
consistency at the resolution of the sample plan, nothing more.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import islice

from .algebra import (
    ExtVal, INDETERMINATE, Infinite, NEG_INF, Not, POS_INF, arity, as_value,
    compare, evaluate, holds, rational_between, value_expr,
)
from .errors import (
    AdaptednessViolation, BadIndex, BadLevel, CadError, DomainError,
    IndeterminateSign, NoRationalWitness, SectionOutOfRange,
)
from .tree import from_leaves, format_index

REGULARITIES = ("inf", "omega")


def parse_regularity(text):
    text = str(text).strip()
    if text in REGULARITIES:
        return text
    try:
        r = int(text)
    except ValueError:
        raise CadError(f"bad regularity class {text!r}") from None
    if r < 0:
        raise CadError("regularity must be non-negative")
    return r


@dataclass(frozen=True, eq=False)
class ConcreteCad:
    """Level-by-level CAD of R^n.

    ``level1`` holds the exact level-1 section values; ``sections`` maps each
    cell index of level 1..n-1 to its ordered tuple of section expressions.
    """
    n: int
    r: object
    level1: tuple
    sections: dict
    name: str = ""
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __eq__(self, other):
        if not isinstance(other, ConcreteCad):
            return NotImplemented
        return (self.n, self.r, self.level1, self.sections) == (
            other.n, other.r, other.level1, other.sections)

    __hash__ = None

    def u(self, index=()) -> int:
        index = tuple(index)
        if not index:
            return len(self.level1)
        try:
            return len(self.sections[index])
        except KeyError:
            raise BadIndex(f"{format_index(index)} is not a cell below the top level") from None

    def arity(self, index=()) -> int:
        return 2 * self.u(index) + 1

    def cells(self, level: int):
        """Indices of all cells of a level, in lexicographic order."""
        if not 0 <= level <= self.n:
            raise BadLevel(f"level {level} outside 0..{self.n}")
        out = [()]
        for _ in range(level):
            out = [I + (j,) for I in out for j in range(1, self.arity(I) + 1)]
        return out

    def leaves(self):
        return self.cells(self.n)

    @property
    def leaf_count(self) -> int:
        return len(self.leaves())

    def is_cell(self, index) -> bool:
        index = tuple(index)
        if len(index) > self.n:
            return False
        for k in range(len(index)):
            if not 1 <= index[k] <= self.arity(index[:k]):
                return False
        return True

    def section_exprs(self, base=()):
        base = tuple(base)
        if not base:
            return tuple(value_expr(v) for v in self.level1)
        return self.sections[base]

    def replace(self, **changes):
        data = dict(n=self.n, r=self.r, level1=self.level1, sections=self.sections, name=self.name)
        data.update(changes)
        return ConcreteCad(**data)

    def skeleton(self) -> str:
        parts = [f"n={self.n}", "()=" + str(len(self.level1))]
        for idx in sorted(self.sections):
            parts.append(f"{format_index(idx)}={len(self.sections[idx])}")
        return ";".join(parts)


def make_cad(n, level1, sections, r=0, name=""):
    level1 = tuple(as_value(v) for v in level1)
    sections = {tuple(k): tuple(v) for k, v in sections.items()}
    return ConcreteCad(n, r, level1, sections, name)


@dataclass(frozen=True)
class Family:
    """Ordered finite family of semi-algebraic sets sharing an ambient dimension."""
    names: tuple
    preds: tuple
    n: int

    def __post_init__(self):
        if not self.preds:
            raise CadError("a family needs at least one set")
        if len(self.names) != len(self.preds):
            raise CadError("names and predicates differ in length")
        for name, p in zip(self.names, self.preds):
            if arity(p) > self.n:
                raise CadError(f"set {name} uses x{arity(p)} in dimension {self.n}")

    def __len__(self):
        return len(self.preds)

    def complement(self):
        return Family(tuple("~" + s for s in self.names), tuple(Not(p) for p in self.preds), self.n)

    def with_dim(self, n):
        return Family(self.names, self.preds, n)

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.names, self.preds, self.n))
            object.__setattr__(self, "_hash", h)
        return h

    def select(self, names):
        pos = [self.names.index(s) for s in names]
        return Family(tuple(self.names[i] for i in pos), tuple(self.preds[i] for i in pos), self.n)


def contains(pred, point) -> bool:
    """Exact membership of a point in the set defined by a predicate."""
    return holds(pred, point)


# sampling -----------------------------------------------------------------

def pythagorean_grid(limit=6):
    """Collapse-friendly rationals: simple values first, then Pythagorean ratios."""
    vals = [Fraction(0), Fraction(1), Fraction(-1), Fraction(1, 2), Fraction(-1, 2),
            Fraction(2), Fraction(-2)]
    for m in range(2, limit + 1):
        for k in range(1, m):
            if math.gcd(m, k) != 1 or (m - k) % 2 == 0:
                continue
            a, b, c = m * m - k * k, 2 * m * k, m * m + k * k
            for q in (Fraction(a, c), Fraction(b, c), Fraction(a, b), Fraction(b, a),
                      Fraction(a), Fraction(b)):
                vals += [q, -q]
    seen, out = set(), []
    for v in vals:
        if v not in seen:
            seen.add(v)
            out.append(v)
    return tuple(out)


DEFAULT_GRID = pythagorean_grid()


@dataclass(frozen=True)
class SamplePlan:
    """Deterministic sampling policy.

    audit: samples per cell when building trees and checking structure.
    witnesses: boundary witnesses per removed section in gluing checks.
    m_max: finest dyadic offset 2^-m_max used to approach a boundary.
    overrides: (index, points) pairs tried before generated samples.
    """
    audit: int = 3
    witnesses: int = 8
    fingerprint_samples: int = 5
    m_max: int = 20
    base_breadth: int = 12
    fiber_breadth: int = 3
    grid: tuple = DEFAULT_GRID
    overrides: tuple = ()

    def offsets(self):
        return [Fraction(1, 2 ** m) for m in range(1, self.m_max + 1)]

    def __hash__(self):
        # plans key many caches; hashing the grid every time is costly
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.audit, self.witnesses, self.fingerprint_samples, self.m_max,
                      self.base_breadth, self.fiber_breadth, self.grid, self.overrides))
            object.__setattr__(self, "_hash", h)
        return h


DEFAULT_PLAN = SamplePlan()


def _as_coord(v):
    v = as_value(v)
    return v.a if v.is_rational else v


def _is_rational_point(pt):
    return all(isinstance(c, Fraction) for c in pt)


def interval_candidates(lo, hi, plan=DEFAULT_PLAN, limit=24):
    """Rationals strictly inside (lo, hi), canonical choice first."""
    flo = -math.inf if isinstance(lo, Infinite) else float(lo)
    fhi = math.inf if isinstance(hi, Infinite) else float(hi)
    eps = 1e-9 * (1 + max(abs(x) for x in (flo, fhi) if math.isfinite(x))) if (
        math.isfinite(flo) or math.isfinite(fhi)) else 0.0

    def inside(q):
        fq = float(q)
        if fq <= flo - eps or fq >= fhi + eps:
            return False
        if flo + eps < fq < fhi - eps:
            return True
        return (isinstance(lo, Infinite) or compare(lo, q) < 0) and (
            isinstance(hi, Infinite) or compare(q, hi) < 0)

    first = rational_between(lo, hi)
    out = [first]
    for q in plan.grid:
        if len(out) >= limit:
            return out
        if q != first and inside(q):
            out.append(q)
    extra = []
    if isinstance(lo, ExtVal) and lo.is_rational and isinstance(hi, ExtVal) and hi.is_rational:
        w = hi.a - lo.a
        extra = [lo.a + w / 4, lo.a + 3 * w / 4, lo.a + w / 8, lo.a + 7 * w / 8]
    elif isinstance(hi, Infinite) and not isinstance(lo, Infinite):
        extra = [first + 1, first + 3, first + 7]
    elif isinstance(lo, Infinite) and not isinstance(hi, Infinite):
        extra = [first - 1, first - 3, first - 7]
    for q in extra:
        if q not in out and inside(q):
            out.append(q)
    return out[:limit]


def section_values(cad: ConcreteCad, base, point):
    """Values of the sections over a base cell at a point of that cell."""
    base = tuple(base)
    if not base:
        return list(cad.level1)
    out = []
    for e in cad.sections[base]:
        try:
            out.append(evaluate(e, point))
        except DomainError:
            out.append(INDETERMINATE)
    return out


def fiber_bounds(vals, j):
    """Bounds of the j-th cell (1-based) of a fiber cut by ``vals``."""
    if j % 2 == 0:
        v = vals[j // 2 - 1]
        return v, v
    lo = vals[(j - 1) // 2 - 1] if j > 1 else NEG_INF
    hi = vals[(j - 1) // 2] if j < 2 * len(vals) + 1 else POS_INF
    return lo, hi


_SHARED_POINTS = {}
_SHARED_LIMIT = 50_000


def _points_key(cad, index, plan):
    """Everything the samples of a cell depend on: the sections along its path."""
    path = tuple(cad.sections[index[:i]] for i in range(1, len(index)))
    return (plan, cad.level1, path, index)


def _cell_points(cad: ConcreteCad, index, plan: SamplePlan):
    key = ("points", index, plan)
    if key in cad._cache:
        return cad._cache[key]
    shared = _points_key(cad, index, plan)
    if shared in _SHARED_POINTS:
        cad._cache[key] = _SHARED_POINTS[shared]
        return cad._cache[key]
    if not index:
        pts = [()]
    else:
        pts = _generate_points(cad, index, plan)
        forced = dict(plan.overrides).get(index)
        if forced:
            pts = [tuple(p) for p in forced] + [p for p in pts if p not in forced]
    if len(_SHARED_POINTS) > _SHARED_LIMIT:
        _SHARED_POINTS.clear()
    _SHARED_POINTS[shared] = cad._cache[key] = pts
    return pts


def _generate_points(cad, index, plan):
    base, j = index[:-1], index[-1]
    bases = _cell_points(cad, base, plan)[:plan.base_breadth]
    columns = []
    breadth = max(plan.fiber_breadth, plan.base_breadth // max(len(bases), 1))
    for x in bases:
        vals = section_values(cad, base, x)
        if j > 2 * len(vals) + 1:
            raise BadIndex(f"{format_index(index)} is not a cell")
        lo, hi = fiber_bounds(vals, j)
        if lo is INDETERMINATE or hi is INDETERMINATE:
            continue
        if j % 2 == 0:
            columns.append([x + (_as_coord(lo),)])
            continue
        try:
            if not (isinstance(lo, Infinite) or isinstance(hi, Infinite)) and compare(lo, hi) >= 0:
                continue
            cands = interval_candidates(lo, hi, plan, breadth)
        except (IndeterminateSign, ValueError):
            continue
        columns.append([x + (t,) for t in cands])
    ordered = []
    depth = max((len(c) for c in columns), default=0)
    for r in range(depth):
        ordered += [c[r] for c in columns if r < len(c)]
    rational = [p for p in ordered if _is_rational_point(p)]
    radical = [p for p in ordered if not _is_rational_point(p)]
    return rational + radical


def cell_samples(cad: ConcreteCad, index, plan: SamplePlan = DEFAULT_PLAN, count=None):
    index = tuple(index)
    if not cad.is_cell(index):
        raise BadIndex(f"{format_index(index)} is not a cell of the CAD")
    pts = _cell_points(cad, index, plan)
    return list(pts if count is None else pts[:count])


def cell_sample(cad: ConcreteCad, index, plan: SamplePlan = DEFAULT_PLAN, base=None):
    """One point of cell ``index``; rational coordinates are preferred.

    With ``base`` given, the point lies above that base point.
    """
    index = tuple(index)
    if base is None:
        pts = cell_samples(cad, index, plan, 1)
        if not pts:
            raise NoRationalWitness(f"no exactly representable point in cell {format_index(index)}")
        return pts[0]
    base = tuple(Fraction(c) if not isinstance(c, ExtVal) else _as_coord(c) for c in base)
    if locate(cad, base) != index[:-1]:
        raise BadIndex(f"{base} does not lie in cell {format_index(index[:-1])}")
    vals = section_values(cad, index[:-1], base)
    lo, hi = fiber_bounds(vals, index[-1])
    if lo is INDETERMINATE or hi is INDETERMINATE:
        raise NoRationalWitness(f"section values undecidable above {base}")
    if index[-1] % 2 == 0:
        return base + (_as_coord(lo),)
    return base + (interval_candidates(lo, hi, plan)[0],)


def locate(cad: ConcreteCad, point):
    """Index of the cell containing a point of R^k, k <= n."""
    idx = ()
    for k, coord in enumerate(point):
        vals = section_values(cad, idx, point[:k])
        j = 1
        for v in vals:
            if v is INDETERMINATE:
                raise IndeterminateSign(f"section value undecidable at {point[:k]}")
            c = compare(coord, v)
            if c < 0:
                break
            j += 1 if c == 0 else 2
            if c == 0:
                break
        idx += (j,)
    return idx


# structure, trees, adaptedness ---------------------------------------------------

@dataclass
class StructureReport:
    entries: list
    note: str = ("checked at the sample points of the plan only; "
                 "regularity of the section functions is declared, not verified")

    @property
    def ok(self):
        return not self.entries

    def __str__(self):
        lines = [f"{len(self.entries)} problem(s); {self.note}"]
        lines += [f"  {format_index(i)} at {pt}: {msg}" for i, pt, msg in self.entries]
        return "\n".join(lines)


def check_cad_structure(cad: ConcreteCad, plan: SamplePlan = DEFAULT_PLAN) -> StructureReport:
    entries = []
    for a, b in zip(cad.level1, cad.level1[1:]):
        if compare(a, b) >= 0:
            entries.append(((), None, f"level-1 sections {a} and {b} not strictly increasing"))
    for idx in sorted(cad.sections):
        exprs = cad.sections[idx]
        for pos, e in enumerate(exprs):
            if arity(e) > len(idx):
                entries.append((idx, None, f"section {2 * pos + 2} uses x{arity(e)} above level {len(idx)}"))
        if not exprs:
            continue
        try:
            points = cell_samples(cad, idx, plan)
        except CadError as exc:
            entries.append((idx, None, f"cannot sample: {exc}"))
            continue
        # nested radicals leave some sample points undecidable; audit the others
        decided = []
        for pt in points:
            vals = section_values(cad, idx, pt)
            if not any(v is INDETERMINATE for v in vals):
                decided.append((pt, vals))
            if len(decided) == plan.audit:
                break
        if not decided:
            entries.append((idx, None, "no sample point with decidable section values"))
        for pt, vals in decided:
            for pos in range(len(vals) - 1):
                a, b = vals[pos], vals[pos + 1]
                try:
                    bad = compare(a, b) >= 0
                except IndeterminateSign:
                    entries.append((idx, pt, f"sections {2 * pos + 2} and {2 * pos + 4} incomparable"))
                    continue
                if bad:
                    entries.append((idx, pt, f"sections {2 * pos + 2} and {2 * pos + 4} not increasing"))
    return StructureReport(entries)


def leaf_labels(cad: ConcreteCad, fam: Family, plan: SamplePlan = DEFAULT_PLAN):
    """Membership bits of every leaf cell, with an adaptedness audit."""
    key = ("labels", fam, plan)
    if key in cad._cache:
        return cad._cache[key]
    labels = {}
    for idx in cad.leaves():
        pts = cell_samples(cad, idx, plan, plan.audit)
        if not pts:
            raise NoRationalWitness(f"no decidable sample in cell {format_index(idx)}")
        bits = []
        for i, pred in enumerate(fam.preds):
            vals = [holds(pred, pt) for pt in pts]
            if len(set(vals)) > 1:
                raise AdaptednessViolation(idx, i, pts)
            bits.append(int(vals[0]))
        labels[idx] = tuple(bits)
    cad._cache[key] = labels
    return labels


def build_tree(cad: ConcreteCad, fam: Family, plan: SamplePlan = DEFAULT_PLAN):
    labels = leaf_labels(cad, fam, plan)
    arities = {idx: cad.arity(idx) for k in range(cad.n) for idx in cad.cells(k)}
    return from_leaves(cad.n, len(fam), labels, arities)


def project(cad: ConcreteCad, k: int) -> ConcreteCad:
    if not 1 <= k <= cad.n:
        raise BadLevel(f"cannot project a CAD of R^{cad.n} to level {k}")
    sections = {i: s for i, s in cad.sections.items() if len(i) < k}
    return cad.replace(n=k, sections=sections)


def cylinder_product(cad: ConcreteCad) -> ConcreteCad:
    """The CAD of R^(n+1) whose cells are the cylinders D x R."""
    sections = dict(cad.sections)
    for idx in cad.leaves():
        sections[idx] = ()
    return cad.replace(n=cad.n + 1, sections=sections)


def refine_with_section(cad: ConcreteCad, index, expr, plan: SamplePlan = DEFAULT_PLAN) -> ConcreteCad:
    """Split a sector by a new section, copying the cylinders above it."""
    index = tuple(index)
    if not cad.is_cell(index) or not index or index[-1] % 2 == 0 or len(index) > cad.n:
        raise BadIndex(f"{format_index(index)} is not a sector of the CAD")
    k, base, j = len(index), index[:-1], index[-1]
    if arity(expr) > k - 1:
        raise SectionOutOfRange(f"section over a level-{k - 1} cell may only use x1..x{k - 1}")
    pos = (j - 1) // 2
    probes = cell_samples(cad, base, plan, plan.audit) if base else [()]
    for x in probes:
        vals = section_values(cad, base, x)
        lo, hi = fiber_bounds(vals, j)
        v = evaluate(expr, x)
        if v is INDETERMINATE:
            raise SectionOutOfRange(f"new section undecidable at {x}")
        if (not isinstance(lo, Infinite) and compare(lo, v) >= 0) or (
                not isinstance(hi, Infinite) and compare(v, hi) >= 0):
            raise SectionOutOfRange(f"new section value {v} not inside ({lo}, {hi}) at {x}")
    if not base:
        level1 = cad.level1[:pos] + (evaluate(expr),) + cad.level1[pos:]
        sections = {}
    else:
        level1 = cad.level1
        sections = {base: cad.sections[base][:pos] + (expr,) + cad.sections[base][pos:]}
    for idx, exprs in cad.sections.items():
        if len(idx) < k or idx[:k - 1] != base:
            sections.setdefault(idx, exprs)
            continue
        e = idx[k - 1]
        rest = idx[k:]
        if e < j:
            sections[idx] = exprs
        elif e > j:
            sections[base + (e + 2,) + rest] = exprs
        else:
            for shift in (0, 1, 2):
                sections[base + (j + shift,) + rest] = exprs
    return cad.replace(level1=level1, sections=sections)
