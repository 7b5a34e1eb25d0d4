from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from cadred.algebra import ExtVal, holds
from cadred.cad import Family, build_tree, make_cad
from cadred.errors import NonPolynomialFiber, ParseError
from cadred.lowdim import (
    Piece, SaSet1D, behaviour, behaviour_partition, boundary, complement, fiber, flat_labels,
    format_behaviour, format_set, minimum_cad_1d, normalize_1d, parse_set, to_pred,
)
from cadred.syntax import parse_pred
from cadred.tree import tree_reductions

ends = st.integers(-8, 8).map(lambda k: F(k, 2))


@st.composite
def sets(draw):
    pts = sorted(set(draw(st.lists(ends, max_size=5))))
    labels = draw(st.lists(st.integers(0, 1), min_size=2 * len(pts) + 1, max_size=2 * len(pts) + 1))
    return SaSet1D(tuple(ExtVal(p) for p in pts), tuple(labels))


probes = [F(k, 4) for k in range(-40, 41)]


def test_line_family_example():
    s1, s2 = parse_set("[-2, 0) u {1}"), parse_set("[0, inf)")
    cad, tree = minimum_cad_1d([s1, s2])
    assert list(cad.level1) == [-2, 0, 1]
    assert flat_labels(tree) == [(0, 0), (1, 0), (1, 0), (0, 1), (0, 1), (1, 1), (0, 1)]
    assert not tree_reductions(tree)


def test_set_text():
    s = parse_set("[-2, 0) u {1}")
    assert format_set(s) == "[-2,0) u {1}"
    assert format_set(complement(s)) == "(-inf,-2) u [0,1) u (1,+inf)"
    assert boundary(s) == [-2, 0, 1]
    assert format_set(parse_set("(1, sqrt(2)]")) == "(1,sqrt(2)]"
    assert format_set(parse_set("R")) == "R"
    assert parse_set("empty") == SaSet1D.empty() == parse_set("{}")
    assert format_set(parse_set("(0,1) u (1,2)")) == "(0,1) u (1,2)"
    assert format_set(parse_set("(0,1) u [1,2)")) == "(0,2)"
    with pytest.raises(ParseError):
        parse_set("[1, 0]")
    with pytest.raises(ParseError):
        parse_set("[1, 2")


def test_normalize_merges_pieces():
    s = normalize_1d([Piece.point(F(0)), parse_set("(0,1)").pieces()[0]])
    assert format_set(s) == "[0,1)"
    assert boundary(s) == [0, 1]


@settings(max_examples=200, deadline=None)
@given(sets())
def test_set_invariants(s):
    n = s.normalized()
    assert n.normalized() == n
    assert boundary(complement(s)) == boundary(s)
    assert complement(complement(s)) == s
    assert parse_set(format_set(s)) == s
    assert normalize_1d(s.pieces()) == s
    pred = to_pred(s)
    for x in probes:
        assert holds(pred, (x,)) == s.contains(x)


@settings(max_examples=100, deadline=None)
@given(st.lists(sets(), min_size=1, max_size=3))
def test_minimum_has_no_removable_point(family):
    cad, tree = minimum_cad_1d(family)
    labels = flat_labels(tree)
    # no section whose two neighbouring sectors and itself carry the same labels
    for i in range(1, len(labels) - 1, 2):
        assert not labels[i - 1] == labels[i] == labels[i + 1]
    bounds = sorted({b for s in family for b in boundary(s)}, key=float)
    assert list(cad.level1) == bounds


def test_fibers(entry):
    disk = entry("disk").family.preds[0]
    assert format_set(fiber(disk, (F(3, 5),))) == "[-4/5,4/5]"
    assert fiber(disk, (F(2),)) == SaSet1D.empty()
    pb = entry("pointless-ball").family.preds[0]
    assert format_set(fiber(pb, (F(0), F(0)))) == "[-1,1)"
    assert format_set(fiber(parse_pred("x2^3 - x2 > 0"), (F(2),))) == "(-1,0) u (1,+inf)"
    assert format_set(fiber(parse_pred("x2 < sqrt(x1)"), (F(2),))) == "(-inf,sqrt(2))"


@pytest.mark.parametrize("text", ["sign(x2) > 0", "x2^5 - 3*x2 + 1 > 0"])
def test_unsupported_fibers(text):
    with pytest.raises(NonPolynomialFiber):
        fiber(parse_pred(text), (F(2),))


@pytest.mark.parametrize("x", [F(0), F(1, 2), F(-1, 3), F(2)])
def test_fiber_matches_minimal_cad_sections(entry, x):
    # the fiber boundary of the disk above x is where the minimum CAD puts sections
    e = entry("disk")
    s = fiber(e.family.preds[0], (x,))
    for y in probes:
        assert s.contains(y) == holds(e.family.preds[0], (x, y))


def test_behaviours(entry):
    h = entry("halfspace0")
    assert format_behaviour(behaviour(h.family, (F(1),))) == "(0, 1, 1)"
    assert format_behaviour(behaviour(h.family, (F(0),))) == "(0, 0, 1)"
    part = behaviour_partition(h.family, h.cad("Base"))
    assert part.classes == {((0,), (1,), (1,)): [(1,), (3,)], ((0,), (0,), (1,)): [(2,)]}
    assert part.constant
    assert not behaviour_partition(h.family, h.cad("Trivial")).constant
    pb = entry("pointless-ball")
    assert format_behaviour(behaviour(pb.family, (F(1, 2), F(0)))) == "(0, 1, 1, 1, 0)"


def test_pointless_ball_classes(entry):
    pb = entry("pointless-ball")
    part = behaviour_partition(pb.family, pb.cad("Base"))
    sizes = {format_behaviour(b): len(cells) for b, cells in part.classes.items()}
    assert sizes == {"(0)": 12, "(0, 1, 0)": 8, "(0, 1, 1, 1, 0)": 4, "(0, 1, 1, 0, 0)": 1}


def test_minimum_matches_reduction_on_the_line(entry):
    e = entry("line-family")
    sets1 = [parse_set("[-2, 0) u {1}"), parse_set("[0, inf)")]
    cad, tree = minimum_cad_1d(sets1)
    assert cad.level1 == e.cad("C").level1
    assert flat_labels(build_tree(e.cad("C"), e.family)) == flat_labels(tree)
    fam = Family(("A", "B"), tuple(map(to_pred, sets1)), 1)
    assert flat_labels(build_tree(make_cad(1, cad.level1, {}), fam)) == flat_labels(tree)
