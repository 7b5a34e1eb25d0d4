"""Geometric reductions: lifting tree reductions, Minimal, reduction DAGs, confluence.

A tree reduction at pivot A merges the sector/section/sector triple
(A - e, A, A + e) together with everything above it.  It lifts when every
merged section triple glues into one function of the CAD's class.  The
gluing test compares, at witness points w of a removed cell, the one-sided
limit of the neighbouring section function with the value of the section
over the removed cell.
"""
from __future__ import annotations

import hashlib
import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx

from .algebra import (
    Atom, ExtVal, FieldMismatch, INDETERMINATE, Infinite, POS_INF, Piecewise, Sub,
    Var, compare, evaluate, evaluate_limit, format_value, normalize, value_expr,
)
from .cad import (
    DEFAULT_PLAN, ConcreteCad, SamplePlan, build_tree, cell_samples, locate,
)
from .errors import (
    CadError, DomainError, IncompleteDag, IndeterminateSign, LimitExceeded,
    NotLiftable, NotReducible, PlanExhausted,
)
from .syntax import format_expr
from .tree import TreeReduction, apply_tree_reduction, format_index, psi, tree_reductions


@dataclass(frozen=True)
class LiftConfig:
    """Tolerance and derivative order for the heuristic C^r (r >= 1) evidence."""
    tau: float = 2.0 ** -40
    d_max: int = 3
    stable_runs: int = 3


DEFAULT_LIFT = LiftConfig()


# verdicts -------------------------------------------------------------------

@dataclass(frozen=True)
class Lifts:
    reason: str = ""
    kind = "lifts"

    def __str__(self):
        return "Lifts" + (f" ({self.reason})" if self.reason else "")


@dataclass(frozen=True)
class Fails:
    """Gluing failure: ``left`` is the one-sided limit of the neighbouring
    section, ``right`` the value of the section over the removed cell."""
    witness: tuple
    level: int
    left: object
    right: object
    gap: object
    neighbour: tuple = ()
    cell: tuple = ()
    order: int = 0
    kind = "fails"

    def __str__(self):
        pt = "(" + ", ".join(_fmt(c) for c in self.witness) + ")"
        what = "values" if self.order == 0 else f"order-{self.order} differences"
        return (f"Fails at {pt}, level {self.level}: {what} {_fmt(self.left)} vs "
                f"{_fmt(self.right)} (gap {_fmt(self.gap)})")


@dataclass(frozen=True)
class Unknown:
    reason: str
    kind = "unknown"

    def __str__(self):
        return f"Unknown ({self.reason})"


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, Fraction):
        return str(v)
    return format_value(v) if isinstance(v, (ExtVal, Infinite)) or v is INDETERMINATE else str(v)


# approach points and one-sided limits ------------------------------------------

def approach_point(cad: ConcreteCad, w, k: int, side: int, delta, target):
    """A point of cell ``target`` near ``w``, shifted along axis k by side*delta.

    Sector coordinates above level k are kept, section coordinates are
    recomputed from the target's own section functions.  Returns None when
    the construction leaves the target cell.
    """
    p = list(w[:k])
    p[k - 1] = p[k - 1] + side * delta
    for i in range(k, len(w)):
        j = target[i]
        if j % 2:
            p.append(w[i])
            continue
        try:
            v = evaluate(cad.sections[target[:i]][j // 2 - 1], tuple(p))
        except DomainError:
            return None
        if not isinstance(v, ExtVal):
            return None
        p.append(v.a if v.is_rational else v)
    p = tuple(p)
    try:
        if locate(cad, p) != tuple(target[:len(p)]):
            return None
    except (IndeterminateSign, FieldMismatch, CadError):
        return None
    return p


def one_sided_limit(cad, expr, w, k, side, target, plan: SamplePlan, runs=3):
    """Limit of ``expr`` (a section over ``target``) when approaching ``w`` from the target.

    The value is accepted once ``runs`` consecutive dyadic offsets give the
    same branch decisions; returns None when no stable value is found.
    """
    streak = []
    for delta in plan.offsets():
        guard = approach_point(cad, w, k, side, delta, target)
        if guard is None:
            streak = []
            continue
        trace = []
        try:
            v = evaluate_limit(expr, w, guard, trace)
        except (DomainError, IndeterminateSign, FieldMismatch, CadError):
            streak = []
            continue
        if v is INDETERMINATE:
            streak = []
            continue
        key = (tuple(trace), v)
        streak = streak + [key] if streak and streak[-1] == key else [key]
        if len(streak) >= runs:
            return v
    return None


def _gap(a, b):
    if isinstance(a, Infinite) or isinstance(b, Infinite):
        return POS_INF
    try:
        d = a - b
    except FieldMismatch:
        return float(a) - float(b)
    return -d if compare(d, 0) < 0 else d


def _same(a, b):
    if isinstance(a, Infinite) or isinstance(b, Infinite):
        return a == b
    try:
        return compare(a, b) == 0
    except (IndeterminateSign, FieldMismatch):
        return None


def _derivative_estimate(cad, expr, w, base_value, k, side, target, order, delta):
    """Order-th one-sided forward difference quotient along axis k, as a float."""
    vals = [base_value]
    for i in range(1, order + 1):
        p = approach_point(cad, w, k, side, delta * i, target)
        if p is None:
            return None
        try:
            v = evaluate(expr, p)
        except (DomainError, CadError):
            return None
        if not isinstance(v, ExtVal):
            return None
        vals.append(v)
    # binomial forward difference, computed exactly when the field allows it
    from math import comb
    try:
        acc = ExtVal(0)
        for i, v in enumerate(vals):
            acc = acc + comb(order, i) * (-1) ** (order - i) * v
        num = float(acc)
    except FieldMismatch:
        num = sum(comb(order, i) * (-1) ** (order - i) * float(v) for i, v in enumerate(vals))
    return num / float((side * delta) ** order)


def glue_pair(cad: ConcreteCad, k: int, middle, neighbour, side: int, pos: int, plan: SamplePlan,
              nb_pos=None):
    """Check the closure of section ``pos`` over ``neighbour`` against the one over ``middle``.

    ``middle`` and ``neighbour`` are cells at the same level differing only at
    position k (the middle has an even entry there).  The neighbour's section
    is ``nb_pos`` when given, else ``pos``.  Returns (verdict, checked) where
    verdict is a Fails or None and checked counts decided witnesses.
    """
    mid_expr = cad.sections[middle][pos]
    nb_expr = cad.sections[neighbour][pos if nb_pos is None else nb_pos]
    checked = 0
    for w in cell_samples(cad, middle, plan, plan.witnesses):
        try:
            own = evaluate(mid_expr, w)
        except DomainError:
            continue
        if not isinstance(own, ExtVal):
            continue
        lim = one_sided_limit(cad, nb_expr, w, k, side, neighbour, plan)
        if lim is None:
            continue
        same = _same(lim, own)
        if same is None:
            continue
        checked += 1
        if not same:
            return Fails(tuple(w), len(middle) + 1, lim, own, _gap(lim, own), neighbour, middle), checked
    return None, checked


def _smooth_evidence(cad, k, middle, left, right, pos, r, plan, config: LiftConfig):
    """Divided-difference comparison across the removed cell; Fails or None."""
    orders = range(1, min(r, config.d_max) + 1)
    lexpr, rexpr = cad.sections[left][pos], cad.sections[right][pos]
    for w in cell_samples(cad, middle, plan, plan.witnesses):
        lv = one_sided_limit(cad, lexpr, w, k, -1, left, plan)
        rv = one_sided_limit(cad, rexpr, w, k, +1, right, plan)
        if not isinstance(lv, ExtVal) or not isinstance(rv, ExtVal):
            continue
        for order in orders:
            diffs = []
            for delta in plan.offsets()[6:]:
                dl = _derivative_estimate(cad, lexpr, w, lv, k, -1, left, order, delta)
                dr = _derivative_estimate(cad, rexpr, w, rv, k, +1, right, order, delta)
                if dl is None or dr is None:
                    continue
                diffs.append((dl, dr))
            tail = diffs[-config.stable_runs:]
            if len(tail) < config.stable_runs:
                continue
            gaps = [abs(a - b) for a, b in tail]
            if min(gaps) > max(config.tau, 1e-6) and max(gaps) < 1.5 * min(gaps):
                dl, dr = tail[-1]
                return Fails(tuple(w), len(middle) + 1, dl, dr, abs(dl - dr), left, middle, order)
    return None


def _merged_cells(cad: ConcreteCad, pivot):
    """Triples (left, middle, right) of cells of level >= |A| that carry sections."""
    k, a = len(pivot), pivot[-1]
    parent = pivot[:-1]
    out = []
    for idx in sorted(cad.sections):
        if len(idx) >= k and idx[:k - 1] == parent and idx[k - 1] == a:
            rest = idx[k:]
            out.append((parent + (a - 1,) + rest, idx, parent + (a + 1,) + rest))
    return out


def liftable(cad: ConcreteCad, fam, A, plan: SamplePlan = DEFAULT_PLAN, r=None,
             config: LiftConfig = DEFAULT_LIFT, check_tree=True):
    """Decide whether the tree reduction at pivot A lifts to a CAD reduction of class r."""
    pivot = tuple(A.pivot) if isinstance(A, TreeReduction) else tuple(A)
    if check_tree and TreeReduction(pivot) not in tree_reductions(build_tree(cad, fam, plan)):
        raise NotReducible(f"{format_index(pivot)} is not a tree reduction of this CAD")
    r = cad.r if r is None else r
    k = len(pivot)
    if k == cad.n:
        return Lifts("top-level merge")
    triples = [t for t in _merged_cells(cad, pivot) if cad.sections[t[1]]]
    if not triples:
        return Lifts("no sections above the merged cells")
    decided = 0
    for left, middle, right in triples:
        for pos in range(len(cad.sections[middle])):
            for nb, side in ((left, -1), (right, +1)):
                fail, checked = glue_pair(cad, k, middle, nb, side, pos, plan)
                if fail is not None:
                    return fail
                if not checked:
                    raise PlanExhausted(
                        f"no decidable witness on cell {format_index(middle)} for section {2 * pos + 2}")
                decided += checked
    if r == 0:
        return Lifts(f"continuous gluing at {decided} witness evaluations")
    if r in ("inf", "omega"):
        for left, middle, right in triples:
            for pos in range(len(cad.sections[middle])):
                pieces = {normalize(cad.sections[c][pos]) for c in (left, middle, right)}
                if len(pieces) > 1:
                    return Unknown(f"C{r} gluing not syntactically evident over {format_index(middle)}")
        return Lifts("glued pieces are syntactically identical")
    for left, middle, right in triples:
        for pos in range(len(cad.sections[middle])):
            fail = _smooth_evidence(cad, k, middle, left, right, pos, r, plan, config)
            if fail is not None:
                return fail
    return Unknown(f"C0 gluing exact; order <= {min(r, config.d_max)} differences agree to tolerance")


# applying reductions ---------------------------------------------------------

def _merge(left, mid, right, axis, cut):
    if left == mid == right:
        return left
    return Piecewise(((Atom(Sub(Var(axis), cut), "<"), left), (Atom(Sub(Var(axis), cut), "="), mid)), right)


def apply_reduction(cad: ConcreteCad, A, fam=None, plan: SamplePlan = DEFAULT_PLAN, r=None) -> ConcreteCad:
    """Merge the triple at pivot A.  With ``fam`` given, the lift is checked first."""
    pivot = tuple(A.pivot) if isinstance(A, TreeReduction) else tuple(A)
    if fam is not None:
        verdict = liftable(cad, fam, pivot, plan, r)
        if not isinstance(verdict, Lifts):
            raise NotLiftable(f"{format_index(pivot)}: {verdict}")
    k, a = len(pivot), pivot[-1]
    parent = pivot[:-1]
    if not 1 <= k <= cad.n or a % 2 or a // 2 > cad.u(parent):
        raise NotReducible(f"{format_index(pivot)} is not an even cell of the CAD")
    pos = a // 2 - 1
    if k == 1:
        cut = value_expr(cad.level1[pos])
        level1 = cad.level1[:pos] + cad.level1[pos + 1:]
        sections = {}
    else:
        cut = cad.sections[parent][pos]
        level1 = cad.level1
        sections = {parent: cad.sections[parent][:pos] + cad.sections[parent][pos + 1:]}
    for idx, exprs in cad.sections.items():
        if len(idx) < k or idx[:k - 1] != parent:
            sections.setdefault(idx, exprs)
            continue
        e, rest = idx[k - 1], idx[k:]
        if e < a - 1:
            sections[idx] = exprs
        elif e > a + 1:
            sections[parent + (e - 2,) + rest] = exprs
        elif e == a - 1:
            mid = cad.sections[parent + (a,) + rest]
            right = cad.sections[parent + (a + 1,) + rest]
            sections[idx] = tuple(_merge(l, m, rr, k, cut) for l, m, rr in zip(exprs, mid, right))
    return cad.replace(level1=level1, sections=sections)


# Minimal ------------------------------------------------------------------------

@dataclass(frozen=True)
class TraceEntry:
    step: int
    pivot: tuple
    verdict: object
    applied: bool

    def as_dict(self):
        return {"step": self.step, "pivot": format_index(self.pivot),
                "verdict": self.verdict.kind, "applied": self.applied,
                "detail": str(self.verdict)}


def minimal(cad: ConcreteCad, fam, plan: SamplePlan = DEFAULT_PLAN, r=None, config=DEFAULT_LIFT):
    """Reduce greedily until no tree reduction lifts; returns (cad, trace)."""
    trace, step = [], 0
    while True:
        tree = build_tree(cad, fam, plan)
        applied = False
        for red in sorted(tree_reductions(tree)):
            verdict = liftable(cad, fam, red, plan, r, config, check_tree=False)
            ok = isinstance(verdict, Lifts)
            trace.append(TraceEntry(step, red.pivot, verdict, ok))
            if ok:
                cad = apply_reduction(cad, red)
                applied = True
                break
        step += 1
        if not applied:
            return cad, trace


def trace_to_jsonl(trace) -> str:
    return "".join(json.dumps(t.as_dict(), sort_keys=True) + "\n" for t in trace)


# fingerprints -------------------------------------------------------------------

def canonical_fingerprint(cad: ConcreteCad, plan: SamplePlan = DEFAULT_PLAN) -> str:
    """Digest of the skeleton, level-1 values and section values at fixed samples.

    Two CADs with the same cells get the same digest even when their section
    functions are written differently, since only values enter.
    """
    key = ("fingerprint", plan)
    if key in cad._cache:
        return cad._cache[key]
    h = hashlib.sha256()
    h.update(f"n={cad.n};".encode())
    h.update(cad.skeleton().encode())
    h.update(("|" + ",".join(format_value(v) for v in cad.level1)).encode())
    for idx in sorted(cad.sections):
        exprs = cad.sections[idx]
        if not exprs:
            continue
        for pt in cell_samples(cad, idx, plan, plan.fingerprint_samples):
            vals = []
            for e in exprs:
                try:
                    vals.append(format_value(evaluate(e, pt)))
                except DomainError:
                    vals.append("domain")
            h.update(f"|{format_index(idx)}@{','.join(map(str, pt))}:{','.join(vals)}".encode())
    out = h.hexdigest()[:24]
    cad._cache[key] = out
    return out


def expression_digest(cad: ConcreteCad) -> str:
    h = hashlib.sha256()
    for idx in sorted(cad.sections):
        h.update(f"{format_index(idx)}:".encode())
        h.update(";".join(format_expr(normalize(e)) for e in cad.sections[idx]).encode())
    return h.hexdigest()[:24]


# reduction DAG -------------------------------------------------------------------

@dataclass
class ReductionDag:
    root: str
    cads: dict = field(default_factory=dict)
    cellmaps: dict = field(default_factory=dict)
    edges: list = field(default_factory=list)
    unknown: dict = field(default_factory=dict)
    collisions: list = field(default_factory=list)
    complete: bool = True

    @property
    def nodes(self):
        return list(self.cads)

    def successors(self, fp):
        return [dst for src, _, dst in self.edges if src == fp]

    def normal_forms(self):
        sources = {src for src, _, _ in self.edges}
        return [fp for fp in self.cads if fp not in sources]

    def graph(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(self.cads)
        g.add_edges_from((s, d) for s, _, d in self.edges)
        return g

    def partition(self, fp):
        """Blocks of root leaves merged into each leaf of node ``fp``."""
        blocks = {}
        for leaf, image in self.cellmaps[fp].items():
            blocks.setdefault(image, set()).add(leaf)
        return frozenset(frozenset(b) for b in blocks.values())


def reduction_dag(cad: ConcreteCad, fam, plan: SamplePlan = DEFAULT_PLAN, r=None,
                  max_nodes=10 ** 5, max_edges=10 ** 6, config=DEFAULT_LIFT) -> ReductionDag:
    root = canonical_fingerprint(cad, plan)
    dag = ReductionDag(root)
    dag.cads[root] = cad
    dag.cellmaps[root] = {leaf: leaf for leaf in cad.leaves()}
    digests = {root: expression_digest(cad)}
    queue = deque([root])
    while queue:
        fp = queue.popleft()
        src = dag.cads[fp]
        tree = build_tree(src, fam, plan)
        for red in sorted(tree_reductions(tree)):
            verdict = liftable(src, fam, red, plan, r, config, check_tree=False)
            if isinstance(verdict, Unknown):
                dag.unknown.setdefault(fp, []).append((red.pivot, verdict.reason))
            if not isinstance(verdict, Lifts):
                continue
            dst = apply_reduction(src, red)
            dfp = canonical_fingerprint(dst, plan)
            if dfp not in dag.cads:
                if len(dag.cads) >= max_nodes:
                    dag.complete = False
                    raise LimitExceeded(f"more than {max_nodes} nodes", dag)
                dag.cads[dfp] = dst
                dag.cellmaps[dfp] = {leaf: psi(red.pivot, img) for leaf, img in dag.cellmaps[fp].items()}
                digests[dfp] = expression_digest(dst)
                queue.append(dfp)
            elif digests[dfp] != expression_digest(dst):
                dag.collisions.append((dfp, fp, red.pivot))
            dag.edges.append((fp, red.pivot, dfp))
            if len(dag.edges) > max_edges:
                dag.complete = False
                raise LimitExceeded(f"more than {max_edges} edges", dag)
    return dag


# confluence ------------------------------------------------------------------------

SCOPE_LOCAL = ("scope: a unique normal form certifies a minimum below this root only; "
               "it is evidence, not proof, that the family admits a minimum")
SCOPE_LOW_DIM = ("scope: in dimension n <= 2 a minimum always exists, so the unique "
                 "normal form is the minimum adapted CAD")
SCOPE_MULTIPLE = ("scope: two distinct normal forms are two distinct minimal adapted CADs, "
                  "so the family admits no minimum")


@dataclass
class ConfluenceReport:
    normal_forms: list
    peaks: list
    joinable: list
    verdict: str
    scope: str
    caveats: list = field(default_factory=list)

    @property
    def witnesses(self):
        return self.normal_forms if self.verdict == "MultipleNormalForms" else []

    def __str__(self):
        lines = [f"verdict: {self.verdict}", f"normal forms: {len(self.normal_forms)}"]
        lines += [f"  {fp}" for fp in self.normal_forms]
        lines.append(f"local peaks: {len(self.peaks)}, joinable: {sum(self.joinable)}")
        lines.append(self.scope)
        lines += [f"caveat: {c}" for c in self.caveats]
        return "\n".join(lines)


def confluence_report(dag: ReductionDag) -> ConfluenceReport:
    if not dag.complete:
        raise IncompleteDag("confluence needs a complete reduction DAG")
    g = dag.graph()
    reach = {fp: nx.descendants(g, fp) | {fp} for fp in g}
    peaks, joinable = [], []
    out = {}
    for src, pivot, dst in dag.edges:
        out.setdefault(src, []).append((pivot, dst))
    for src, succ in out.items():
        for i in range(len(succ)):
            for j in range(i + 1, len(succ)):
                (a1, t1), (a2, t2) = succ[i], succ[j]
                peaks.append((src, a1, a2))
                joinable.append(bool(reach[t1] & reach[t2]))
    nfs = sorted(dag.normal_forms())
    n = next(iter(dag.cads.values())).n
    if len(nfs) >= 2:
        verdict, scope = "MultipleNormalForms", SCOPE_MULTIPLE
    else:
        verdict = "UniqueNormalForm"
        scope = SCOPE_LOW_DIM if n <= 2 else SCOPE_LOCAL
    caveats = []
    if dag.unknown:
        caveats.append(f"{sum(len(v) for v in dag.unknown.values())} reduction(s) with unknown "
                       "liftability were not applied; normal forms are minimal modulo these")
    if dag.collisions:
        caveats.append(f"{len(dag.collisions)} fingerprint collision(s) between differently written CADs")
    return ConfluenceReport(nfs, peaks, joinable, verdict, scope, caveats)


def transitive_reduction_check(dag: ReductionDag) -> bool:
    if not dag.complete:
        raise IncompleteDag("transitive reduction needs a complete reduction DAG")
    g = dag.graph()
    if not nx.is_directed_acyclic_graph(g):
        return False
    return set(nx.transitive_reduction(g).edges) == set(g.edges)


def dag_to_dot(dag: ReductionDag, comment="", names=None) -> str:
    names = names or {}
    lines = [f"// {comment}"] if comment else []
    lines.append("digraph reductions {")
    lines.append("  rankdir=TB; node [shape=box, fontsize=10];")
    nfs = set(dag.normal_forms())
    for fp, cad in dag.cads.items():
        label = names.get(fp, fp[:8])
        style = ", style=bold" if fp in nfs else ""
        lines.append(f'  "{fp}" [label="{label}\\n{cad.leaf_count} cells"{style}];')
    for src, pivot, dst in dag.edges:
        lines.append(f'  "{src}" -> "{dst}" [label="Phi_{format_index(pivot)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
