from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from cadred.algebra import ExtVal, holds
from cadred.cad import (
    SamplePlan, build_tree, cell_samples, check_cad_structure, cylinder_product, leaf_labels,
    locate, make_cad, parse_regularity, project, refine_with_section,
)
from cadred.errors import AdaptednessViolation, BadIndex, BadLevel, CadError, SectionOutOfRange
from cadred.syntax import parse_expr
from cadred.tree import validate_tree

coord = st.fractions(min_value=-3, max_value=3, max_denominator=8)


def test_disk_skeleton_and_locate(entry):
    c = entry("disk").cad("C")
    assert c.skeleton() == "n=2;()=2;1=0;2=1;3=2;4=1;5=0"
    assert c.leaf_count == 13
    assert locate(c, (F(0), F(0))) == (3, 3)
    assert locate(c, (F(1), F(0))) == (4, 2)
    assert locate(c, (F(3, 5), F(4, 5))) == (3, 4)
    assert locate(c, (F(2),)) == (5,)


@settings(max_examples=100, deadline=None)
@given(coord, coord)
def test_locate_agrees_with_labels(entry, x, y):
    e = entry("disk")
    c = e.cad("C")
    idx = locate(c, (x, y))
    inside = holds(e.family.preds[0], (x, y))
    assert leaf_labels(c, e.family)[idx] == (int(inside),)


@pytest.mark.parametrize("name", ["trousers", "disk", "closedball", "pointless-ball",
                                  "under-trousers", "quadric", "halfspace0"])
def test_samples_lie_in_their_cells(entry, name):
    for cad in entry(name).cads.values():
        for idx in cad.leaves():
            for pt in cell_samples(cad, idx, count=3):
                if all(isinstance(c, F) for c in pt):
                    assert locate(cad, pt) == idx


def test_corpus_cads_are_well_formed(entry):
    for name in ("trousers", "analytic-trousers", "disk", "doubleparabolas"):
        for cad in entry(name).cads.values():
            assert check_cad_structure(cad).ok
            assert validate_tree(build_tree(cad, entry(name).family)) == []


def test_structure_problems_are_reported():
    crossing = make_cad(2, [], {(1,): (parse_expr("x1"), parse_expr("0"))})
    report = check_cad_structure(crossing)
    assert not report.ok and "not increasing" in str(report)
    assert "declared, not verified" in report.note


def test_projection_and_product(entry):
    c = entry("trousers").cad("Cprime")
    p = project(c, 1)
    assert p.n == 1 and p.leaf_count == 3
    assert project(c, 3) == c
    with pytest.raises(BadLevel):
        project(c, 0)
    q = cylinder_product(c)
    assert q.n == 4 and q.leaf_count == c.leaf_count
    assert all(idx[-1] == 1 for idx in q.leaves())


def test_refine_with_section(entry):
    e = entry("disk")
    fine = refine_with_section(e.cad("C"), (3,), parse_expr("0"))
    assert fine == e.cad("Cprime")
    with pytest.raises(SectionOutOfRange):
        refine_with_section(e.cad("C"), (3,), parse_expr("2"))
    with pytest.raises(BadIndex):
        refine_with_section(e.cad("C"), (2,), parse_expr("1"))


def test_complement_flips_every_bit(entry):
    for name in ("trousers", "disk", "line-family"):
        e = entry(name)
        for cad in e.cads.values():
            a = leaf_labels(cad, e.family)
            b = leaf_labels(cad, e.family.complement())
            assert all(tuple(1 - x for x in a[i]) == b[i] for i in a)


def test_adaptedness_is_audited(entry):
    e = entry("disk")
    trivial = make_cad(2, [], {(1,): ()})
    # the default audit sees three points, all in the disk; a wider audit does not
    assert leaf_labels(trivial, e.family) == {(1, 1): (1,)}
    with pytest.raises(AdaptednessViolation):
        leaf_labels(trivial, e.family, SamplePlan(audit=12))


def test_regularity_classes():
    assert parse_regularity("omega") == "omega"
    assert parse_regularity("2") == 2
    with pytest.raises(CadError):
        parse_regularity("-1")
    with pytest.raises(CadError):
        parse_regularity("smooth")


def test_radical_samples_on_sections(entry):
    c = entry("disk").cad("C")
    pts = cell_samples(c, (3, 4))
    assert (F(3, 5), F(4, 5)) in pts
    assert all(isinstance(p[1], (F, ExtVal)) for p in pts)
