from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from cadred import corpus
from cadred.algebra import (
    Add, Const, Div, Mul, Neg, Pow, Sign, Sqrt, Var, evaluate, holds,
)
from cadred.cad import check_cad_structure
from cadred.cadspec import format_cad, format_document, parse_cad, parse_document
from cadred.errors import CadError, ParseError
from cadred.reduction import canonical_fingerprint
from cadred.syntax import format_expr, format_pred, parse_expr, parse_pred, parse_value

leaf = st.one_of(
    st.builds(Const, st.fractions(min_value=-9, max_value=9, max_denominator=5)),
    st.builds(Var, st.integers(1, 3)),
)
exprs = st.recursive(leaf, lambda sub: st.one_of(
    st.builds(Add, sub, sub), st.builds(Mul, sub, sub), st.builds(Neg, sub),
    st.builds(Div, sub, sub), st.builds(Pow, sub, st.integers(1, 3)),
    st.builds(Sqrt, sub), st.builds(Sign, sub),
), max_leaves=6)
points = st.tuples(*[st.fractions(min_value=-3, max_value=3, max_denominator=4)] * 3)


@settings(max_examples=150, deadline=None)
@given(exprs, points)
def test_format_parse_preserves_values(e, pt):
    back = parse_expr(format_expr(e))
    assert format_expr(back) == format_expr(e)
    assert _outcome(back, pt) == _outcome(e, pt)


def _outcome(e, pt):
    try:
        return evaluate(e, pt)
    except (CadError, ArithmeticError) as exc:
        return type(exc)


@pytest.mark.parametrize("text", [
    "piecewise{x1 > 0 -> -1/2*x1; else -> 0}",
    "-sign(x2)*sqrt((x1 + sqrt(x1^2 + x2^2))/2)",
    "x1^2 + 4*x2*x3",
    "1/x1 - 2",
])
def test_expression_round_trip(text):
    e = parse_expr(text)
    assert parse_expr(format_expr(e)) == e


def test_pred_round_trip_and_normal_form():
    p = parse_pred("x2 > 1 and not (x1 = 0 or x1 != 2)")
    assert format_pred(parse_pred("x2 > 1")) == "x2 - 1 > 0"
    q = parse_pred(format_pred(p))
    for pt in [(F(0), F(2)), (F(2), F(2)), (F(2), F(0))]:
        assert holds(p, pt) == holds(q, pt)


def test_values():
    assert parse_value("-3/4") == F(-3, 4)
    assert str(parse_value("1 + sqrt(8)")) == "1 + 2*sqrt(2)"


@pytest.mark.parametrize("text", ["x1 +", "sqrt(", "x0", "1 ** 2", "piecewise{x1>0 -> 1}", "x1 >"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_pred(text) if ">" in text and "piecewise" not in text else parse_expr(text)


@pytest.mark.parametrize("text", [
    "cad X dim=2\nlevel1: 0\ncell 4: u=0\n",
    "set A x1 > 0\n",
    "cad X dim=1 class=0\nlevel1: 0\ncell 1: u=0\n",
    "cad X dim=2 class=0\nlevel1: 0\ncell 1: u=1\n",
    "cad X dim=2 class=0\nlevel1: 0\ncell 1: u=0\n",
])
def test_cadspec_errors(text):
    with pytest.raises(ParseError):
        parse_document(text)


def test_non_increasing_level1_is_a_structure_problem():
    cad = parse_cad("cad X dim=1 class=0\nlevel1: 1, 0\n")
    assert not check_cad_structure(cad).ok


@pytest.mark.parametrize("name", [n for n in corpus.names() if n != "trousers4"])
def test_corpus_documents_round_trip(name, entry):
    e = entry(name)
    doc = parse_document(format_document(e.document))
    assert doc.family().names == e.document.family().names
    for cad_name, cad in e.cads.items():
        again = doc.cad(cad_name)
        assert again == cad
        assert parse_cad(format_cad(cad)) == cad
        if cad.leaf_count <= 30:
            assert canonical_fingerprint(again) == canonical_fingerprint(cad)
