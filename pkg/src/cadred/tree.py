"""CAD trees and their reduction rules.

A tree node is a ``Node`` holding a tuple of children; a leaf is a label,
i.e. a tuple of 0/1 bits.  The label of an internal node is the node
itself, so label equality is structural equality of subtrees.  Indices are
1-based tuples and are recomputed from child positions, never stored.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import BadIndex, NotReducible

Index = tuple


@dataclass(frozen=True)
class Node:
    children: tuple

    @property
    def u(self) -> int:
        return (len(self.children) - 1) // 2


@dataclass(frozen=True)
class CadTree:
    n: int
    p: int
    root: object

    def subtree(self, index):
        node = self.root
        for j in index:
            if not isinstance(node, Node) or not 1 <= j <= len(node.children):
                raise BadIndex(f"{format_index(index)} is not a node of the tree")
            node = node.children[j - 1]
        return node

    label = subtree

    def __contains__(self, index):
        try:
            self.subtree(index)
        except BadIndex:
            return False
        return True

    def nodes(self):
        """All (index, subtree) pairs in depth-first order, root first."""
        stack = [((), self.root)]
        while stack:
            idx, node = stack.pop()
            yield idx, node
            if isinstance(node, Node):
                for j in range(len(node.children), 0, -1):
                    stack.append((idx + (j,), node.children[j - 1]))

    def leaves(self):
        return [(i, node) for i, node in self.nodes() if not isinstance(node, Node)]

    @property
    def leaf_count(self) -> int:
        return count_leaves(self.root)


def count_leaves(node) -> int:
    if isinstance(node, Node):
        return sum(count_leaves(c) for c in node.children)
    return 1


def from_leaves(n: int, p: int, labels: dict, arities: dict) -> CadTree:
    """Build a tree from leaf labels and per-node child counts (``arities[I] = 2u+1``)."""
    def build(idx):
        if len(idx) == n:
            return tuple(labels[idx])
        return Node(tuple(build(idx + (j,)) for j in range(1, arities[idx] + 1)))
    return CadTree(n, p, build(()))


def format_index(index) -> str:
    return ".".join(str(j) for j in index) if index else "()"


def parse_index(text: str) -> Index:
    text = text.strip().strip("()")
    if not text:
        return ()
    try:
        idx = tuple(int(t) for t in text.replace(",", ".").split(".") if t.strip())
    except ValueError as exc:
        raise BadIndex(f"bad index {text!r}") from exc
    if any(j < 1 for j in idx):
        raise BadIndex(f"index entries must be positive: {text!r}")
    return idx


def prefix(index, k: int):
    return tuple(index[:k])


def psi(pivot, index):
    """Relabelling map attached to an even pivot."""
    k = len(pivot)
    if k == 0 or pivot[-1] % 2:
        raise ValueError(f"pivot {pivot} must be even")
    head = tuple(index[:k])
    if len(index) < k or head[:-1] != tuple(pivot[:-1]):
        return tuple(index)
    last = head[-1]
    if last == pivot[-1]:
        return tuple(index[:k - 1]) + (last - 1,) + tuple(index[k:])
    if last > pivot[-1]:
        return tuple(index[:k - 1]) + (last - 2,) + tuple(index[k:])
    return tuple(index)


@dataclass(frozen=True, order=True)
class TreeReduction:
    pivot: tuple

    def __str__(self):
        return f"Psi_{format_index(self.pivot)}"


def is_reducible(tree: CadTree, pivot) -> bool:
    pivot = tuple(pivot)
    if not pivot or pivot[-1] % 2 or pivot not in tree:
        return False
    parent = tree.subtree(pivot[:-1])
    a = pivot[-1]
    ch = parent.children
    return ch[a - 2] == ch[a - 1] == ch[a]


def tree_reductions(tree: CadTree):
    """All even nodes whose two neighbours carry the same recursive label."""
    out = set()
    for idx, node in tree.nodes():
        if isinstance(node, Node):
            for a in range(2, len(node.children), 2):
                if node.children[a - 2] == node.children[a - 1] == node.children[a]:
                    out.add(TreeReduction(idx + (a,)))
    return out


def _pivot_of(A):
    return tuple(A.pivot) if isinstance(A, TreeReduction) else tuple(A)


def apply_tree_reduction(tree: CadTree, A) -> CadTree:
    pivot = _pivot_of(A)
    if not is_reducible(tree, pivot):
        raise NotReducible(f"{format_index(pivot)} does not satisfy the label condition")
    a = pivot[-1]

    def rebuild(node, depth):
        if depth == len(pivot) - 1:
            ch = node.children
            return Node(ch[:a - 1] + ch[a + 1:])
        j = pivot[depth]
        ch = list(node.children)
        ch[j - 1] = rebuild(ch[j - 1], depth + 1)
        return Node(tuple(ch))

    return CadTree(tree.n, tree.p, rebuild(tree.root, 0))


def apply_by_relabelling(tree: CadTree, A) -> CadTree:
    """Reference implementation through the index map: leaves L'(psi(I)) = L(I)."""
    pivot = _pivot_of(A)
    if not is_reducible(tree, pivot):
        raise NotReducible(f"{format_index(pivot)} does not satisfy the label condition")
    labels, arities = {}, {}
    for idx, node in tree.nodes():
        new = psi(pivot, idx)
        if isinstance(node, Node):
            arities[new] = max(arities.get(new, 0), len(node.children))
        else:
            labels[new] = node
    arities[pivot[:-1]] = len(tree.subtree(pivot[:-1]).children) - 2
    return from_leaves(tree.n, tree.p, labels, arities)


def validate_tree(tree: CadTree):
    """List every violated tree invariant; an empty list means the tree is valid."""
    problems = []

    def walk(node, idx):
        if isinstance(node, Node):
            if len(idx) >= tree.n:
                problems.append(f"node below depth {tree.n} at {format_index(idx)}")
            if len(node.children) % 2 == 0:
                problems.append(f"even arity at node {format_index(idx)}")
            for j, c in enumerate(node.children, 1):
                walk(c, idx + (j,))
            return
        if len(idx) < tree.n:
            problems.append(f"short leaf at {format_index(idx)}")
        if not isinstance(node, tuple) or len(node) != tree.p or any(b not in (0, 1) for b in node):
            problems.append(f"bad label {node!r} at {format_index(idx)}")

    if tree.root is None:
        return ["missing root"]
    walk(tree.root, ())
    return problems


def format_label(label) -> str:
    return "[" + ",".join(str(b) for b in label) + "]"


def dump_tree(tree: CadTree) -> str:
    lines = []
    for idx, node in tree.nodes():
        pad = "  " * len(idx)
        name = format_index(idx) if idx else "root"
        if isinstance(node, Node):
            lines.append(f"{pad}{name} u={node.u}")
        else:
            lines.append(f"{pad}{name} {format_label(node)}")
    return "\n".join(lines) + "\n"


def tree_to_dot(tree: CadTree, comment="") -> str:
    lines = []
    if comment:
        lines.append(f"// {comment}")
    lines.append("digraph cadtree {")
    lines.append('  node [shape=circle, style=filled, fillcolor=white, fontsize=10];')
    for idx, node in tree.nodes():
        name = '"' + (format_index(idx) if idx else "root") + '"'
        if isinstance(node, Node):
            lines.append(f"  {name};")
        else:
            if all(node):
                color = "green"
            elif not any(node):
                color = "red"
            else:
                color = "gold"
            lines.append(f'  {name} [fillcolor={color}, xlabel="{format_label(node)}"];')
        if idx:
            parent = '"' + (format_index(idx[:-1]) if idx[:-1] else "root") + '"'
            lines.append(f"  {parent} -> {name};")
    lines.append("}")
    return "\n".join(lines) + "\n"
