"""Brute-force ground truth on small CADs.

A coarsening of a CAD is a partition of its leaf cells.  The oracle decides
which coarsenings are themselves CADs adapted to the family, builds the
refinement poset below a CAD and compares it with the reduction DAG.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product

import networkx as nx

from .cad import ConcreteCad, Family, DEFAULT_PLAN, leaf_labels
from .algebra import normalize
from .errors import TooLarge
from .reduction import ReductionDag, glue_pair
from .tree import format_index

EXHAUSTIVE_LIMIT = 9
ENUMERATION_GUARD = 12


def bell(K: int) -> int:
    """K-th Bell number from the Bell triangle."""
    if K < 0:
        raise ValueError("K must be non-negative")
    if K == 0:
        return 1
    row = [1]
    for _ in range(K - 1):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        row = nxt
    return row[-1]


def _rgs(K):
    """Restricted growth strings of length K in lexicographic order."""
    a = [0] * K
    m = [0] * K  # m[i] = max(a[:i+1])
    while True:
        yield tuple(a)
        i = K - 1
        while i > 0 and a[i] > m[i - 1]:
            i -= 1
        if i == 0:
            return
        a[i] += 1
        m[i] = max(m[i - 1], a[i])
        for j in range(i + 1, K):
            a[j] = 0
            m[j] = m[i]


def _blocks(leaves, rgs):
    out = {}
    for leaf, b in zip(leaves, rgs):
        out.setdefault(b, []).append(leaf)
    return frozenset(frozenset(v) for v in out.values())


def enumerate_coarsenings(cad: ConcreteCad, cap=None):
    """Every partition of the leaves except the discrete one, in RGS order."""
    leaves = cad.leaves()
    K = len(leaves)
    if K > ENUMERATION_GUARD and cap is None:
        raise TooLarge(f"{K} leaves: bell({K}) - 1 = {bell(K) - 1} partitions; pass a cap")
    count = 0
    for rgs in _rgs(K):
        if K and max(rgs) == K - 1:
            continue  # the discrete partition
        if cap is not None and count >= cap:
            return
        count += 1
        yield _blocks(leaves, rgs)


# checking a single coarsening -----------------------------------------------------

@dataclass
class CoarseningCheck:
    ok: bool
    reason: str = ""
    flagged: bool = False  # rejected only because some gluing was undecided

    def __bool__(self):
        return self.ok


def _level_blocks(cad, blocks):
    """Projection blocks at every level, or the first cylindricity failure."""
    n = cad.n
    levels = {n: {leaf: b for b in blocks for leaf in b}}
    for m in range(n - 1, -1, -1):
        owner = {}
        for b in set(levels[m + 1].values()):
            proj = frozenset(c[:m] for c in b)
            for c in proj:
                if owner.get(c, proj) != proj:
                    return None, f"projections to level {m} overlap at {format_index(c)}"
                owner[c] = proj
        levels[m] = owner
    return levels, ""


def _runs(cad, levels, I, m):
    """Compressed sequence of level-(m+1) blocks over cell I: [(block, first, last)]."""
    runs = []
    for j in range(1, 2 * cad.u(I) + 2):
        b = levels[m + 1][I + (j,)]
        if runs and runs[-1][0] == b:
            runs[-1][2] = j
        else:
            runs.append([b, j, j])
    return runs


def _shape(cad, levels):
    for m in range(cad.n):
        for beta in set(levels[m].values()):
            pattern = None
            for I in sorted(beta):
                runs = _runs(cad, levels, I, m)
                ids = [r[0] for r in runs]
                if len(set(ids)) != len(ids):
                    return f"a block above {format_index(I)} is not contiguous"
                for _, a, b in runs:
                    if (a != b or a % 2) and (a % 2 == 0 or b % 2 == 0):
                        return f"run {a}..{b} above {format_index(I)} is neither a section nor sectors"
                if pattern is None:
                    pattern = ids
                elif ids != pattern:
                    return f"stacks over the block of {format_index(I)} differ"
    return ""


def _kept(cad, levels, I, m):
    """Map block -> section position (0-based) for the sections kept above I."""
    return {b: a // 2 - 1 for b, a, e in _runs(cad, levels, I, m) if a == e and a % 2 == 0}


def _gluing(cad, levels, fam, plan, r, cache):
    flagged = False
    for m in range(1, cad.n):
        for beta in set(levels[m].values()):
            if len(beta) < 2:
                continue
            for X in sorted(beta):
                if not cad.u(X):
                    continue
                kx = _kept(cad, levels, X, m)
                for k in range(1, m + 1):
                    if X[k - 1] % 2:
                        continue
                    for side in (-1, 1):
                        Y = X[:k - 1] + (X[k - 1] + side,) + X[k:]
                        if Y not in beta:
                            continue
                        ky = _kept(cad, levels, Y, m)
                        for b, pos in kx.items():
                            key = (k, X, Y, side, pos, ky[b])
                            if key not in cache:
                                cache[key] = _glue_verdict(cad, k, X, Y, side, pos, ky[b], plan, r)
                            verdict = cache[key]
                            if verdict == "fails":
                                return CoarseningCheck(False, f"gluing fails between {format_index(X)} "
                                                              f"and {format_index(Y)}")
                            if verdict == "unknown":
                                flagged = True
    if flagged:
        return CoarseningCheck(False, "gluing undecided", flagged=True)
    return CoarseningCheck(True)


def _glue_verdict(cad, k, X, Y, side, pos, nb_pos, plan, r):
    fail, checked = glue_pair(cad, k, X, Y, side, pos, plan, nb_pos)
    if fail is not None:
        return "fails"
    if not checked:
        return "unknown"
    if r != 0 and normalize(cad.sections[X][pos]) != normalize(cad.sections[Y][nb_pos]):
        return "unknown"  # only continuity is decided exactly
    return "ok"


def is_cad_coarsening(cad: ConcreteCad, blocks, fam: Family, plan=DEFAULT_PLAN, r=None,
                      _cache=None, _labels=None) -> CoarseningCheck:
    """Whether a partition of the leaves is an adapted CAD coarser than ``cad``."""
    r = cad.r if r is None else r
    blocks = frozenset(frozenset(b) for b in blocks)
    labels = _labels if _labels is not None else leaf_labels(cad, fam, plan)
    for b in blocks:
        if len({labels[leaf] for leaf in b}) > 1:
            return CoarseningCheck(False, "a block mixes labels")
    levels, why = _level_blocks(cad, blocks)
    if levels is None:
        return CoarseningCheck(False, why)
    why = _shape(cad, levels)
    if why:
        return CoarseningCheck(False, why)
    return _gluing(cad, levels, fam, plan, r, {} if _cache is None else _cache)


def _set_partitions(items):
    """All set partitions of a list, as lists of lists, in RGS order."""
    for rgs in _rgs(len(items)):
        out = {}
        for x, b in zip(items, rgs):
            out.setdefault(b, []).append(x)
        yield list(out.values())


def _label_homogeneous(cad, leaves, labels):
    """Exhaustive stream restricted to label-homogeneous partitions.

    These are products of set partitions of the label classes, so the
    mixed partitions are never generated.
    """
    K = len(leaves)
    if K > ENUMERATION_GUARD:
        raise TooLarge(f"{K} leaves is beyond exhaustive enumeration")
    classes = {}
    for leaf in leaves:
        classes.setdefault(labels[leaf], []).append(leaf)
    groups = [list(_set_partitions(c)) for _, c in sorted(classes.items())]
    for combo in product(*groups):
        blocks = [b for part in combo for b in part]
        if len(blocks) < K:
            yield frozenset(frozenset(b) for b in blocks)


# structural search ----------------------------------------------------------------

def _structural_candidates(cad: ConcreteCad, labels):
    """Partitions that pass label homogeneity, cylindricity and shape.

    Kept-section subsets are chosen level by level with equal sizes over each
    base block, and kept sections are matched by rank.
    """
    n = cad.n

    def choices(beta):
        """Kept-section choices over a base block: one subset per cell, equal sizes."""
        cells = sorted(beta)
        us = [cad.u(I) for I in cells]
        for size in range(min(us) + 1):
            for pick in product(*[combinations(range(1, u + 1), size) for u in us]):
                yield dict(zip(cells, pick))

    def stacks(beta, kept):
        """Blocks of level-(m+1) cells over beta: a list of frozensets in stack order."""
        out = None
        for I in sorted(beta):
            cuts = [2 * s for s in kept[I]]
            bounds = [0] + cuts + [2 * cad.u(I) + 2]
            pieces = []
            for i in range(len(cuts) + 1):
                lo, hi = bounds[i] + 1, bounds[i + 1] - 1
                pieces.append([I + (j,) for j in range(lo, hi + 1)])
                if i < len(cuts):
                    pieces.append([I + (cuts[i],)])
            if out is None:
                out = [list(p) for p in pieces]
            else:
                for acc, p in zip(out, pieces):
                    acc.extend(p)
        return [frozenset(p) for p in out]

    def leaf_ok(block):
        return len({labels[leaf] for leaf in block}) == 1

    def expand(m, base_blocks):
        if m == n:
            yield frozenset(base_blocks)
            return
        per_block = []
        for beta in base_blocks:
            opts = []
            for kept in choices(beta):
                st = stacks(beta, kept)
                if m + 1 == n and not all(leaf_ok(b) for b in st):
                    continue
                opts.append(st)
            per_block.append(opts)
        for combo in product(*per_block):
            yield from expand(m + 1, [b for st in combo for b in st])

    yield from expand(0, [frozenset([()])])


# posets ---------------------------------------------------------------------------

def refines(fine, coarse) -> bool:
    """Whether every block of ``fine`` lies inside a block of ``coarse``."""
    owner = {leaf: b for b in coarse for leaf in b}
    return all(len({owner[leaf] for leaf in b}) == 1 for b in fine)


@dataclass
class Poset:
    cad: ConcreteCad
    elements: list
    flagged: list = field(default_factory=list)
    method: str = ""

    @property
    def top(self):
        return frozenset(frozenset([leaf]) for leaf in self.cad.leaves())

    def graph(self) -> nx.DiGraph:
        """Strict order as edges finer -> coarser."""
        g = nx.DiGraph()
        g.add_nodes_from(self.elements)
        for a in self.elements:
            for b in self.elements:
                if a != b and refines(a, b):
                    g.add_edge(a, b)
        return g

    def covers(self):
        return set(nx.transitive_reduction(self.graph()).edges())

    def minimal_elements(self):
        g = self.graph()
        return [e for e in self.elements if g.out_degree(e) == 0]


def poset_below(cad: ConcreteCad, fam: Family, plan=DEFAULT_PLAN, r=None, exhaustive=None) -> Poset:
    """Adapted CAD coarsenings of ``cad`` together with ``cad`` itself.

    Up to nine leaves every set partition is tested.  Larger CADs use the
    structural search, which only proposes partitions already cylindrical and
    well shaped; each proposal still goes through ``is_cad_coarsening``.
    """
    leaves = cad.leaves()
    labels = leaf_labels(cad, fam, plan)
    if exhaustive is None:
        exhaustive = len(leaves) <= EXHAUSTIVE_LIMIT
    cache = {}
    top = frozenset(frozenset([leaf]) for leaf in leaves)
    elements, flagged = [top], []
    if exhaustive:
        source, method = _label_homogeneous(cad, leaves, labels), "exhaustive"
    else:
        source, method = _structural_candidates(cad, labels), "structural"
    for blocks in source:
        if blocks == top:
            continue
        check = is_cad_coarsening(cad, blocks, fam, plan, r, cache, labels)
        if check:
            elements.append(blocks)
        elif check.flagged:
            flagged.append(blocks)
    return Poset(cad, elements, flagged, method)


def coarsening_cad(poset_or_cad, blocks, dag: ReductionDag = None):
    """The DAG node realizing a coarsening, if the DAG has one."""
    if dag is None:
        return None
    for fp in dag.nodes:
        if dag.partition(fp) == frozenset(blocks):
            return dag.cads[fp]
    return None


@dataclass
class CrossReport:
    missing_in_dag: list
    missing_in_poset: list
    edge_mismatch: list
    order_mismatch: list
    inconclusive: int

    @property
    def agree(self):
        return not (self.missing_in_dag or self.missing_in_poset or self.edge_mismatch or self.order_mismatch)

    def __str__(self):
        if self.agree:
            return f"agreement (inconclusive oracle rejections: {self.inconclusive})"
        parts = []
        if self.missing_in_dag:
            parts.append(f"(i) {len(self.missing_in_dag)} poset element(s) not reached by the DAG")
        if self.missing_in_poset:
            parts.append(f"(i) {len(self.missing_in_poset)} DAG node(s) rejected by the oracle")
        if self.edge_mismatch:
            parts.append(f"(ii) {len(self.edge_mismatch)} edge(s) differ from the poset covers")
        if self.order_mismatch:
            parts.append(f"(iii) {len(self.order_mismatch)} pair(s) ordered differently")
        return "; ".join(parts)


def cross_validate(dag: ReductionDag, poset: Poset) -> CrossReport:
    part = {fp: dag.partition(fp) for fp in dag.nodes}
    dag_nodes = set(part.values())
    pos_nodes = set(poset.elements)
    flagged = set(poset.flagged)
    missing_in_dag = sorted(map(_key, pos_nodes - dag_nodes))
    missing_in_poset = sorted(_key(p) for p in dag_nodes - pos_nodes if p not in flagged)
    dag_edges = {(part[s], part[d]) for s, _, d in dag.edges}
    covers = poset.covers()
    edge_mismatch = sorted((_key(a), _key(b)) for a, b in dag_edges ^ covers)
    g = dag.graph()
    reach = {(part[a], part[b]) for a in g for b in nx.descendants(g, a)}
    order = set(poset.graph().edges())
    order_mismatch = sorted((_key(a), _key(b)) for a, b in reach ^ order)
    return CrossReport(missing_in_dag, missing_in_poset, edge_mismatch, order_mismatch, len(poset.flagged))


def _key(blocks):
    return tuple(sorted(tuple(sorted(b)) for b in blocks))


def format_blocks(blocks) -> str:
    return " | ".join(",".join(format_index(c) for c in b) for b in _key(blocks))


def poset_to_dot(poset: Poset, comment="") -> str:
    names = {e: f"n{i}" for i, e in enumerate(sorted(poset.elements, key=lambda e: (-len(e), _key(e))))}
    lines = [f"// {comment}"] if comment else []
    lines.append("digraph poset {")
    lines.append("  node [shape=box, fontsize=9];")
    for e, nm in sorted(names.items(), key=lambda t: t[1]):
        lines.append(f'  {nm} [label="{len(e)} cells"];')
    for a, b in sorted(poset.covers(), key=lambda t: (names[t[0]], names[t[1]])):
        lines.append(f"  {names[a]} -> {names[b]};")
    lines.append("}")
    return "\n".join(lines) + "\n"
