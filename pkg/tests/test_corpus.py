from fractions import Fraction as F

import pytest

from cadred import corpus
from cadred.cad import build_tree, check_cad_structure, leaf_labels, project
from cadred.errors import BadParameter, UnknownEntry
from cadred.reduction import (
    Lifts, canonical_fingerprint, confluence_report, liftable, reduction_dag,
    transitive_reduction_check,
)
from cadred.tree import tree_reductions

ENTRIES = corpus.names()
DIRECT = [n for n in ENTRIES if n != "trousers4"]


def test_names():
    assert len(ENTRIES) == 13
    assert "trousers4" in ENTRIES and "disk" in ENTRIES


@pytest.mark.parametrize("name", ENTRIES)
def test_entry_facts(entry, name):
    e = entry(name)
    assert e.notes
    for cad_name, leaves in e.expected.get("leaves", {}).items():
        assert e.cad(cad_name).leaf_count == leaves
    for cad_name, pivots in e.expected.get("red", {}).items():
        reds = tree_reductions(build_tree(e.cad(cad_name), e.family))
        assert sorted(r.pivot for r in reds) == sorted(pivots)


@pytest.mark.parametrize("name", ENTRIES)
def test_minimal_cads_are_normal_forms(entry, name):
    e = entry(name)
    for cad_name in e.expected.get("minimal", []):
        cad = e.cad(cad_name)
        for red in tree_reductions(build_tree(cad, e.family)):
            assert not isinstance(liftable(cad, e.family, red), Lifts), (cad_name, red)


@pytest.mark.parametrize("name", ["box-fin", "under-trousers", "quadric", "folded-plane"])
def test_two_distinct_minimal_cads(entry, name):
    e = entry(name)
    a, b = (e.cad(n) for n in e.expected["minimal"])
    assert canonical_fingerprint(a) != canonical_fingerprint(b)
    for cad in (a, b):
        assert tree_reductions(build_tree(cad, e.family))


def test_closed_ball_dag(entry):
    e = entry("closedball")
    dag = reduction_dag(e.cad("Fine"), e.family)
    assert (len(dag.nodes), len(dag.edges)) == (10, 15)
    assert dag.normal_forms() == [canonical_fingerprint(e.cad("M"))]
    assert transitive_reduction_check(dag)
    assert confluence_report(dag).verdict == "UniqueNormalForm"


def test_pointless_ball_has_no_tree_reductions(entry):
    e = entry("pointless-ball")
    assert not tree_reductions(build_tree(e.cad("M"), e.family))


def test_double_parabolas_components(entry):
    e = entry("doubleparabolas")
    full = e.document.family()
    assert full.names == ("P", "P1", "P2")
    for cad in e.cads.values():
        labels = leaf_labels(cad, full)          # raises if not adapted to a component
        for bits in labels.values():
            assert bits[0] == (bits[1] or bits[2])


@pytest.mark.parametrize("name", DIRECT)
def test_projections_are_cads(entry, name):
    for cad in entry(name).cads.values():
        for k in range(1, cad.n):
            assert check_cad_structure(project(cad, k)).ok


def test_d_t(entry):
    e = entry("trousers")
    d = corpus.d_t_generator(-2)
    assert d.level1 == (-2,)
    assert canonical_fingerprint(corpus.d_t_generator(0)) == canonical_fingerprint(e.cad("Cprime"))
    assert check_cad_structure(d).ok
    with pytest.raises(BadParameter):
        corpus.d_t_generator(F(1, 2))


def test_unknown_entry():
    with pytest.raises(UnknownEntry):
        corpus.load("nonesuch")
    with pytest.raises(UnknownEntry):
        corpus.fixture_text("nonesuch")


def test_analytic_trousers_identity():
    report = corpus.verify_analytic_trousers(120)
    assert len(report.checked) >= 100 and report.ok
    pts = corpus.pythagorean_points(10)
    assert len(set(pts)) == len(pts)
