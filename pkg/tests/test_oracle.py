import copy
import time
from fractions import Fraction

import pytest

from cadred.cad import make_cad
from cadred.errors import TooLarge
from cadred.oracle import (
    bell, cross_validate, enumerate_coarsenings, format_blocks, is_cad_coarsening,
    poset_below, poset_to_dot, refines,
)
from cadred.reduction import reduction_dag
from cadred.tree import psi


def test_bell_numbers():
    # independent recurrence: B(n+1) = sum C(n,k) B(k)
    from math import comb
    b = [1]
    for n in range(15):
        b.append(sum(comb(n, k) * b[k] for k in range(n + 1)))
    assert [bell(k) for k in range(16)] == b
    assert bell(9) - 1 == 21146


@pytest.mark.parametrize("k", [1, 3, 5, 7, 9])
def test_enumeration_counts(k):
    cad = make_cad(1, [Fraction(i) for i in range((k - 1) // 2)], {})
    assert cad.leaf_count == k
    parts = list(enumerate_coarsenings(cad))
    assert len(parts) == bell(k) - 1
    assert len(set(parts)) == len(parts)
    assert all(sorted(l for b in p for l in b) == sorted(cad.leaves()) for p in parts)


def test_enumeration_guard(entry):
    big = entry("disk").cad("C")  # 13 leaves
    with pytest.raises(TooLarge):
        next(enumerate_coarsenings(big))
    assert len(list(enumerate_coarsenings(big, cap=5))) == 5


def _image_partition(cad, pivot):
    blocks = {}
    for leaf in cad.leaves():
        blocks.setdefault(psi(pivot, leaf), set()).add(leaf)
    return frozenset(frozenset(b) for b in blocks.values())


def test_filter_examples(entry):
    disk = entry("disk")
    assert is_cad_coarsening(disk.cad("Cprime"), _image_partition(disk.cad("Cprime"), (4,)), disk.family)
    t = entry("trousers")
    check = is_cad_coarsening(t.cad("C"), _image_partition(t.cad("C"), (1, 2)), t.family)
    assert not check and "glu" in check.reason
    leaves = t.cad("C").leaves()
    mixed = frozenset([frozenset(leaves[:2])] + [frozenset([l]) for l in leaves[2:]])
    check = is_cad_coarsening(t.cad("C"), mixed, t.family)
    assert not check and check.reason == "a block mixes labels"


def test_non_cylindrical_partition_rejected(entry):
    e = entry("line-family")
    fine = e.cad("Fine")
    leaves = fine.leaves()
    # merging two sectors that are not neighbours is not a cell
    blocks = frozenset([frozenset([leaves[0], leaves[2]])] + [frozenset([l]) for l in leaves if l not in (leaves[0], leaves[2])])
    assert not is_cad_coarsening(fine, blocks, e.family)


def test_pruning_is_neutral(entry):
    # the label-homogeneous stream finds exactly what filtering every partition finds
    e = entry("line-family")
    cad = e.cad("Fine")
    full = {p for p in enumerate_coarsenings(cad) if is_cad_coarsening(cad, p, e.family)}
    poset = poset_below(cad, e.family, exhaustive=True)
    assert full == set(poset.elements) - {poset.top}


def test_structural_search_matches_exhaustive(entry):
    for name, cad_name in (("line-family", "Fine"), ("halfspace0", "C"), ("trousers", "C")):
        e = entry(name)
        a = poset_below(e.cad(cad_name), e.family, exhaustive=True)
        b = poset_below(e.cad(cad_name), e.family, exhaustive=False)
        assert set(a.elements) == set(b.elements), name


def test_exhaustive_is_fast_enough(entry):
    e = entry("trousers")
    t0 = time.perf_counter()
    poset_below(e.cad("C"), e.family, exhaustive=True)
    assert time.perf_counter() - t0 < 5


def test_poset_structure(entry):
    e = entry("disk")
    poset = poset_below(e.cad("Csecond"), e.family)
    assert poset.method == "structural"
    assert len(poset.elements) == 10
    assert len(poset.covers()) == 15
    (bottom,) = poset.minimal_elements()
    assert len(bottom) == e.cad("C").leaf_count
    assert all(refines(x, bottom) for x in poset.elements)


def test_mutated_dag_is_caught(entry):
    e = entry("disk")
    dag = reduction_dag(e.cad("Csecond"), e.family)
    poset = poset_below(e.cad("Csecond"), e.family)
    assert cross_validate(dag, poset).agree
    broken = copy.copy(dag)
    broken.edges = [edge for edge in dag.edges if edge[0] != dag.root]
    report = cross_validate(broken, poset)
    assert not report.agree
    assert report.edge_mismatch and report.order_mismatch
    assert "(iii)" in str(report)


def test_poset_dot(entry):
    e = entry("trousers")
    poset = poset_below(e.cad("C"), e.family)
    dot = poset_to_dot(poset)
    assert "digraph" in dot
    assert dot.count("->") == len(poset.covers())
    assert format_blocks(poset.top).count(" | ") == 8
